#include "kp5/data_prep.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kp5/cutoffs.hpp"
#include "kp5/errors.hpp"
#include "kp5/fft.hpp"
#include "kp5/quadrature.hpp"

namespace kp5 {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kBetaOversample = 8;
}  // namespace

InitialData::InitialData(const Grid2D& g, double s_index)
    : grid(g), upper(static_cast<std::size_t>(g.nx()) * (g.ny() / 2), 0.0), s(s_index) {}

InitialData InitialData::from_function(const Grid2D& g, const std::function<double(double, double)>& fn,
                                       double s_index) {
  InitialData d(g, s_index);
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < d.rows(); ++n) d.at(m, n) = fn(g.x(m), n * g.dy());
  return d;
}

InitialData InitialData::from_full(const Grid2D& g, std::span<const double> values, double s_index) {
  if (values.size() != g.size()) throw Error(ErrorKind::Dimension, "initial data do not match the grid");
  InitialData d(g, s_index);
  for (int m = 0; m < g.nx(); ++m)
    for (int n = 0; n < d.rows(); ++n) d.at(m, n) = values[g.index(m, g.y0_index() + n)];
  return d;
}

std::vector<double> reflection_coefficients(std::span<const double> lambdas) {
  const int n = static_cast<int>(lambdas.size());
  if (n == 0) throw Error(ErrorKind::Precondition, "reflection needs at least one scale");
  Eigen::MatrixXd v(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) v(k, j) = std::pow(-lambdas[j], k);
  Eigen::VectorXd a = v.fullPivLu().solve(Eigen::VectorXd::Ones(n));
  return {a.data(), a.data() + n};
}

std::vector<double> hestenes_extension(const InitialData& g) {
  static const double scales[3] = {1.0, 2.0, 3.0};
  static const std::vector<double> coef = reflection_coefficients(scales);
  const Grid2D& grid = g.grid;
  const int rows = g.rows();
  const int y0 = grid.y0_index();
  std::vector<double> out(grid.size(), 0.0);
  for (int m = 0; m < grid.nx(); ++m) {
    for (int n = 0; n < rows; ++n) out[grid.index(m, y0 + n)] = g.at(m, n);
    // y = -n dy for n = 1 .. ny/2
    for (int n = 1; n <= y0; ++n) {
      double v = 0.0;
      for (int j = 0; j < 3; ++j) {
        const int src = (j + 1) * n;
        if (src < rows) v += coef[j] * g.at(m, src);
      }
      out[grid.index(m, y0 - n)] = v;
    }
  }
  return out;
}

std::vector<double> extend_initial_values(const InitialData& g, const Extension& ext) {
  auto v = ext(g);
  if (v.size() != g.grid.size()) throw Error(ErrorKind::Dimension, "extension returned the wrong size");
  return v;
}

SpectralField2D extend_initial(const InitialData& g, std::vector<std::string>* warnings, const Extension& ext) {
  if (warnings) {
    double peak = 0.0, top = 0.0;
    const int band = std::max(2, g.rows() / 8);
    for (int m = 0; m < g.grid.nx(); ++m)
      for (int n = 0; n < g.rows(); ++n) {
        peak = std::max(peak, std::abs(g.at(m, n)));
        if (n >= g.rows() - band) top = std::max(top, std::abs(g.at(m, n)));
      }
    if (peak > 0.0 && top > 1e-8 * peak) {
      std::ostringstream msg;
      msg << "initial data not decayed near y = Ly/2 (relative " << top / peak << ")";
      warnings->push_back(msg.str());
    }
  }
  return project_zero_mode(forward_transform(g.grid, extend_initial_values(g, ext)));
}

// ---------------------------------------------------------------------------

BoundarySamples::BoundarySamples(int nx_, double lx_, const TimeWindow& w)
    : nx(nx_), lx(lx_), window(w), values(static_cast<std::size_t>(nx_) * w.nt(), 0.0) {}

BoundarySamples BoundarySamples::from_function(int nx, double lx, const TimeWindow& w,
                                               const std::function<double(double, double)>& fn) {
  BoundarySamples b(nx, lx, w);
  for (int n = 0; n < w.nt(); ++n)
    for (int m = 0; m < nx; ++m) b.at(n, m) = fn(b.x(m), w.t(n));
  return b;
}

BoundarySamples& BoundarySamples::operator-=(const BoundarySamples& o) {
  if (o.nx != nx || o.lx != lx || !(o.window == window))
    throw Error(ErrorKind::Dimension, "boundary samples on different grids");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

BoundarySamples boundary_from_file(const io::BoundaryFile& file, const TimeWindow& w) {
  if (file.nt < 4) throw Error(ErrorKind::Io, "boundary file needs at least 4 time samples");
  const double t_end = file.t0 + (file.nt - 1) * file.dt;
  if (file.t0 > 1e-12 || t_end < 1.0 - 1e-12)
    throw Error(ErrorKind::Io, "boundary file must cover t in [0, 1]");
  static const double scales[3] = {1.0 / 3.0, 2.0 / 3.0, 1.0};
  static const std::vector<double> coef = reflection_coefficients(scales);

  BoundarySamples b(file.nx, file.lx, w);
  std::vector<double> column(file.nt);
  for (int m = 0; m < file.nx; ++m) {
    for (int n = 0; n < file.nt; ++n) column[n] = file.values[static_cast<std::size_t>(n) * file.nx + m];
    auto sample = [&](double t) {
      double v = 0.0;
      cubic_uniform<double>(std::span<const double>(column), file.t0, file.dt, t, &v);
      return v;
    };
    for (int n = 0; n < w.nt(); ++n) {
      const double t = w.t(n);
      if (t < 0.0 || t >= 1.5) continue;
      if (t <= 1.0) {
        b.at(n, m) = sample(t);
      } else {
        const double d = t - 1.0;
        double v = 0.0;
        for (int j = 0; j < 3; ++j) v += coef[j] * sample(1.0 - scales[j] * d);
        b.at(n, m) = v;
      }
    }
  }
  return b;
}

// ---------------------------------------------------------------------------

cplx BoundaryData::curve_value(int j, double eta, int sign, bool* on_grid) const {
  const double xi = spectrum.xi(j);
  cplx v(0.0);
  bool ok = xi != 0.0 && spectrum.value(j, std::pow(xi, 5) + sign * eta * eta / xi, &v);
  if (on_grid) *on_grid = ok;
  return ok ? v : cplx(0.0);
}

namespace {

double l2_x(std::span<const double> row, double dx) {
  KahanSum acc;
  for (double v : row) acc.add(v * v);
  return std::sqrt(acc.value() * dx);
}

// Trapezoid transform of [n][m] samples on the window, zero-padded in time so
// the beta grid is kBetaOversample times finer than the tau grid.
void transform_into(const std::vector<double>& samples, int nx, double lx, const TimeWindow& w, BoundarySpectrum& sp) {
  const int nt = w.nt();
  const int nb = kBetaOversample * nt;
  const double dt = w.dt();
  const double dbeta = 2.0 * kPi / (nb * dt);
  sp = BoundarySpectrum(nx, lx, -(nb / 2) * dbeta, dbeta, nb);
  std::vector<cplx> buf(static_cast<std::size_t>(nb) * nx, cplx(0.0));
  for (std::size_t i = 0; i < samples.size(); ++i) buf[i] = samples[i];
  fft::transform_2d(buf, nb, nx, fft::Direction::Forward);
  const double dx = lx / nx;
  for (int j = 0; j < nx; ++j) {
    const double xsign = (j % 2 == 0) ? 1.0 : -1.0;
    auto col = sp.column(j);
    for (int mb = 0; mb < nb; ++mb) {
      const int mode = mb - nb / 2;
      const int idx = mode >= 0 ? mode : mode + nb;
      // t_0 = -T_w contributes e^{i beta T_w} = e^{i pi mode / oversample}.
      const cplx phase = std::polar(1.0, kPi * mode / kBetaOversample);
      col[mb] = buf[static_cast<std::size_t>(idx) * nx + j] * (dx * xsign * dt) * phase;
    }
  }
}

}  // namespace

BoundarySpectrum boundary_transform(const BoundarySamples& b) {
  BoundarySpectrum sp;
  transform_into(b.values, b.nx, b.lx, b.window, sp);
  return sp;
}

BoundaryData extend_boundary(const BoundarySamples& h, double s, const BoundarySamples* subtract,
                             double trace_tolerance) {
  const TimeWindow& w = h.window;
  const int nx = h.nx;
  const int nt = w.nt();
  const int n0 = w.zero_index();

  BoundarySamples work = h;
  if (subtract) work -= *subtract;

  BoundaryData out{BoundarySamples(nx, h.lx, w), {}, {}, {}, s, false};
  auto r0 = h.row(n0);
  out.trace.assign(r0.begin(), r0.end());

  double scale = 0.0;
  for (int n = 0; n < nt; ++n) scale = std::max(scale, l2_x(work.row(n), work.dx()));
  const double trace_l2 = l2_x(work.row(n0), work.dx());
  if (s > 0.5 && trace_l2 > trace_tolerance * std::max(scale, 1e-300) && trace_l2 > 1e-300) {
    std::ostringstream msg;
    msg << "boundary trace must vanish for s > 1/2 (the corner compatibility condition g(.,0) = h(.,0)); "
        << "||h(.,0)||_L2 = " << trace_l2 << ", subtract the free-flow trace p or use s < 1/2";
    throw Error(ErrorKind::Precondition, msg.str());
  }

  for (int n = 0; n < nt; ++n) {
    const double t = w.t(n);
    const double c = n == n0 ? 0.5 : (t > 0.0 ? cutoffs::time_taper(t) : 0.0);
    for (int m = 0; m < nx; ++m) out.extended.at(n, m) = c * work.at(n, m);
  }
  // The stored samples keep the full value at t = 0; the half weight above is
  // the trapezoid endpoint convention for the transform only.
  std::vector<double> halfed = out.extended.values;
  for (int m = 0; m < nx; ++m) out.extended.at(n0, m) = work.at(n0, m);

  out.zero = std::all_of(halfed.begin(), halfed.end(), [](double v) { return v == 0.0; });

  const int nb = kBetaOversample * nt;
  const double dt = w.dt();
  const double dbeta = 2.0 * kPi / (nb * dt);
  out.spectrum = BoundarySpectrum(nx, h.lx, -(nb / 2) * dbeta, dbeta, nb);
  if (out.zero) return out;

  transform_into(halfed, nx, h.lx, w, out.spectrum);

  // One-sided derivatives at t = 0 of the x-transformed data for the
  // Euler-Maclaurin endpoint correction of the cut at t = 0.
  std::vector<cplx> rows(5 * static_cast<std::size_t>(nx));
  for (int r = 0; r < 5; ++r)
    for (int m = 0; m < nx; ++m) rows[static_cast<std::size_t>(r) * nx + m] = out.extended.at(n0 + r, m);
  const int one = nx;
  for (int r = 0; r < 5; ++r)
    fft::transform(std::span<cplx>(rows.data() + static_cast<std::size_t>(r) * nx, nx),
                   std::span<const int>(&one, 1), fft::Direction::Forward);

  const double dx = h.lx / nx;
  for (int j = 0; j < nx; ++j) {
    const double xsign = (j % 2 == 0) ? 1.0 : -1.0;
    cplx f[5];
    for (int r = 0; r < 5; ++r) f[r] = rows[static_cast<std::size_t>(r) * nx + j] * (dx * xsign);
    const cplx d1 = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dt);
    const cplx d2 = (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) / (12.0 * dt * dt);
    const cplx d3 = (-5.0 * f[0] + 18.0 * f[1] - 24.0 * f[2] + 14.0 * f[3] - 3.0 * f[4]) / (2.0 * dt * dt * dt);
    auto col = out.spectrum.column(j);
    for (int mb = 0; mb < nb; ++mb) {
      const double beta = out.spectrum.beta(mb);
      const cplx ib(0.0, beta);
      cplx v = col[mb];
      const cplx g1 = d1 - ib * f[0];
      const cplx g3 = d3 - 3.0 * ib * d2 - beta * beta * 3.0 * d1 + ib * ib * ib * f[0] * -1.0;
      v += dt * dt / 12.0 * g1 - std::pow(dt, 4) / 720.0 * g3;
      col[mb] = v;
    }
  }

  const double edge = out.spectrum.edge_ratio();
  if (edge > 1e-10) {
    std::ostringstream msg;
    msg << "boundary spectrum not negligible at |beta| = pi/dt (relative " << edge << "); refine the time grid";
    out.warnings.push_back(msg.str());
  }
  return out;
}

SpectralField2D curve_samples(const BoundaryData& h, const Grid2D& grid, int sign) {
  if (grid.nx() != h.spectrum.nx || grid.lx() != h.spectrum.lx)
    throw Error(ErrorKind::Dimension, "boundary data and grid differ in x");
  SpectralField2D out(grid);
  for (int j = 0; j < grid.nx(); ++j) {
    if (grid.mode_x(j) == 0) continue;
    for (int k = 0; k < grid.ny(); ++k) out.at(j, k) = h.curve_value(j, grid.eta(k), sign);
  }
  return out;
}

double compatibility_check(const InitialData& g, const BoundaryData& h, double s) {
  if (s < 0.5) return 0.0;
  if (static_cast<int>(h.trace.size()) != g.grid.nx()) throw Error(ErrorKind::Dimension, "trace length differs from nx");
  KahanSum acc;
  for (int m = 0; m < g.grid.nx(); ++m) {
    const double d = g.at(m, 0) - h.trace[m];
    acc.add(d * d);
  }
  return std::sqrt(acc.value() * g.grid.dx());
}

double compatibility_check(const InitialData& g, const BoundarySamples& h, double s) {
  if (s < 0.5) return 0.0;
  if (h.nx != g.grid.nx()) throw Error(ErrorKind::Dimension, "trace length differs from nx");
  auto r = h.row(h.window.zero_index());
  KahanSum acc;
  for (int m = 0; m < h.nx; ++m) {
    const double d = g.at(m, 0) - r[m];
    acc.add(d * d);
  }
  return std::sqrt(acc.value() * g.grid.dx());
}

SpectralField2D make_sobolev_sample(double s, std::uint64_t seed, const Grid2D& grid, double amplitude) {
  if (s < 0.0) throw Error(ErrorKind::Domain, "make_sobolev_sample requires s >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  SpectralField2D out(grid);
  const double expo = -0.5 * (s + 1.0 + 0.1);
  for (int j = 0; j < grid.nx(); ++j) {
    for (int k = 0; k < grid.ny(); ++k) {
      const double ph = phase(rng);  // drawn for every mode so the stream does not depend on masking
      if (!active_mode(grid, j, k)) continue;
      const int pj = grid.index_x(-grid.mode_x(j));
      const int pk = grid.index_y(-grid.mode_y(k));
      if (grid.index(pj, pk) < grid.index(j, k)) continue;
      const double xi = grid.xi(j), eta = grid.eta(k);
      const double mag = amplitude * std::pow(bracket(xi * xi + eta * eta), expo);
      const cplx v = std::polar(mag, ph);
      out.at(j, k) = v;
      out.at(pj, pk) = std::conj(v);
    }
  }
  return out;
}

}  // namespace kp5
