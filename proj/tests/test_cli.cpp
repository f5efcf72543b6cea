#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "kp5/config.hpp"
#include "kp5/errors.hpp"
#include "kp5/io.hpp"

using namespace kp5;
using nlohmann::json;

namespace {

int call(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "kp5");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "kp5_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(cli::parse_config({"solve", "--s", "0.5"}), Error);
  CHECK_THROWS_AS(cli::parse_config({"solve", "--s", "0.3", "--a", "0.4"}), Error);
  CHECK_THROWS_AS(cli::parse_config({"solve", "--s", "3"}), Error);
  CHECK_THROWS_AS(cli::parse_config({"verify", "nothing"}), Error);
  CHECK_THROWS_AS(cli::parse_config({"bogus"}), Error);

  const auto cfg = cli::parse_config({"solve", "--s", "1", "--a", "0.25", "--b", "0.45", "--T", "0.5"});
  CHECK(cfg.command == cli::Command::Solve);
  CHECK(cfg.params.a == 0.25);
  const json d = json::parse(cli::describe(cfg));
  CHECK(d["command"] == "solve");
  CHECK(d["T"] == 0.5);

  std::string err;
  CHECK(call({"solve", "--s", "0.5"}, nullptr, &err) == 2);
  CHECK(json::parse(err).contains("message"));
}

TEST_CASE("config file supplies defaults") {
  const auto path = scratch("run.cfg");
  io::write_text_atomic(path.string(), "s = 2\nT = 0.3\n");
  const auto cfg = cli::parse_config({"linear", "--config", path.string(), "--T", "0.4"});
  CHECK(cfg.params.s == 2.0);
  CHECK(cfg.params.T == 0.4);
}

TEST_CASE("verify resonance") {
  std::string out;
  CHECK(call({"verify", "resonance", "--trials", "2000"}, &out) == 0);
  const json r = json::parse(out);
  CHECK(r["max_relative_error"].get<double>() < 1e-9);
}

TEST_CASE("norms of a Gaussian snapshot") {
  const Grid2D g(64, 64, 20.0, 20.0);
  std::vector<double> v(g.size());
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < g.ny(); ++n) v[g.index(m, n)] = std::exp(-0.5 * (g.x(m) * g.x(m) + g.y(n) * g.y(n)));
  const auto path = scratch("gauss.csv");
  io::write_snapshot(path.string(), g, v, "gaussian");
  std::string out;
  CHECK(call({"norms", "--snapshot", path.string(), "--s", "0"}, &out) == 0);
  CHECK(json::parse(out)["value"].get<double>() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(call({"norms", "--snapshot", path.string(), "--norm", "l2"}, &out) == 0);
  CHECK(json::parse(out)["value"].get<double>() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(call({"norms", "--snapshot", path.string(), "--norm", "h9"}) == 2);
}

TEST_CASE("snapshot and boundary files round-trip") {
  const Grid2D g(8, 10, 2.0, 3.0);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i) - 1.0 / 3.0;
  const auto sp = scratch("snap.csv");
  io::write_snapshot(sp.string(), g, v, "line one\nline two");
  const io::Snapshot s = io::read_snapshot(sp.string());
  CHECK(s.grid.nx() == 8);
  CHECK(s.grid.ly() == 3.0);
  CHECK(s.values == v);

  io::BoundaryFile b;
  b.nx = 3;
  b.nt = 2;
  b.lx = 6.0;
  b.t0 = 0.0;
  b.dt = 0.5;
  b.values = {1.0, 2.0, 3.0, -1e-17, 0.25, 7.0 / 9.0};
  const auto bp = scratch("h.csv");
  io::write_boundary(bp.string(), b);
  const io::BoundaryFile r = io::read_boundary(bp.string());
  CHECK(r.nx == 3);
  CHECK(r.dt == 0.5);
  CHECK(r.values == b.values);

  CHECK_THROWS_AS(io::read_snapshot(scratch("missing.csv").string()), Error);
}
