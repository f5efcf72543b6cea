#include "kp5/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kp5/errors.hpp"

namespace kp5::io {

namespace {

std::vector<double> parse_numbers(const std::string& line) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(line);
  for (char c; in.get(c);) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!tok.empty()) {
        out.push_back(std::stod(tok));
        tok.clear();
      }
    } else {
      tok.push_back(c);
    }
  }
  if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      rows.push_back(parse_numbers(line));
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::Io, "malformed number in " + path);
  }
  if (rows.empty()) throw Error(ErrorKind::Io, path + " is empty");
  return rows;
}

std::string comment_lines(const std::string& comment) {
  if (comment.empty()) return {};
  std::string out = "# ";
  for (char c : comment) out += c == '\n' ? std::string("\n# ") : std::string(1, c);
  return out + '\n';
}

std::string format_rows(const std::vector<double>& values, std::size_t row_len) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << values[i];
    out << ((i + 1) % row_len == 0 ? '\n' : ',');
  }
  return out.str();
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp);
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

void write_snapshot(const std::string& path, const Grid2D& grid, const std::vector<double>& values,
                    const std::string& comment) {
  if (values.size() != grid.size()) throw Error(ErrorKind::Dimension, "snapshot does not match grid");
  std::ostringstream out;
  out << comment_lines(comment);
  out << std::setprecision(17) << grid.nx() << ' ' << grid.ny() << ' ' << grid.lx() << ' ' << grid.ly() << '\n';
  out << format_rows(values, grid.ny());
  write_text_atomic(path, out.str());
}

Snapshot read_snapshot(const std::string& path) {
  auto rows = read_rows(path);
  const auto& h = rows[0];
  if (h.size() != 4) throw Error(ErrorKind::Io, path + ": header must be `nx ny Lx Ly`");
  Grid2D grid(static_cast<int>(h[0]), static_cast<int>(h[1]), h[2], h[3]);
  std::vector<double> values;
  values.reserve(grid.size());
  for (std::size_t r = 1; r < rows.size(); ++r) values.insert(values.end(), rows[r].begin(), rows[r].end());
  if (values.size() != grid.size())
    throw Error(ErrorKind::Dimension, path + ": expected " + std::to_string(grid.size()) + " values, found " +
                                          std::to_string(values.size()));
  return {grid, std::move(values)};
}

void write_spectral_dump(const std::string& path, const SpectralField2D& field) {
  std::ostringstream out;
  out << std::setprecision(17) << "j,k,re,im\n";
  const Grid2D& g = field.grid;
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k) {
      const cplx v = field.at(j, k);
      out << g.mode_x(j) << ',' << g.mode_y(k) << ',' << v.real() << ',' << v.imag() << '\n';
    }
  write_text_atomic(path, out.str());
}

void write_boundary(const std::string& path, const BoundaryFile& b, const std::string& comment) {
  if (b.values.size() != static_cast<std::size_t>(b.nx) * b.nt)
    throw Error(ErrorKind::Dimension, "boundary samples do not match nx x nt");
  std::ostringstream out;
  out << comment_lines(comment);
  out << std::setprecision(17) << b.nx << ' ' << b.nt << ' ' << b.lx << ' ' << b.t0 << ' ' << b.dt << '\n';
  out << format_rows(b.values, b.nx);
  write_text_atomic(path, out.str());
}

BoundaryFile read_boundary(const std::string& path) {
  auto rows = read_rows(path);
  const auto& h = rows[0];
  if (h.size() != 5) throw Error(ErrorKind::Io, path + ": header must be `nx nt Lx t0 dt`");
  BoundaryFile b;
  b.nx = static_cast<int>(h[0]);
  b.nt = static_cast<int>(h[1]);
  b.lx = h[2];
  b.t0 = h[3];
  b.dt = h[4];
  if (b.nx <= 0 || b.nt <= 0 || !(b.lx > 0) || !(b.dt > 0)) throw Error(ErrorKind::Io, path + ": bad header");
  for (std::size_t r = 1; r < rows.size(); ++r) b.values.insert(b.values.end(), rows[r].begin(), rows[r].end());
  if (b.values.size() != static_cast<std::size_t>(b.nx) * b.nt)
    throw Error(ErrorKind::Dimension, path + ": value count does not match header");
  return b;
}

}  // namespace kp5::io
