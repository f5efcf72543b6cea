#include "kp5/linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kp5/cutoffs.hpp"
#include "kp5/errors.hpp"
#include "kp5/fft.hpp"
#include "kp5/quadrature.hpp"

namespace kp5 {

namespace {
constexpr double kPi = std::numbers::pi;
// Spectrum level at the beta-grid edge below which a curve point leaving the
// grid is counted as resolved.
constexpr double kOffGridSignificance = 1e-6;

bool evolves(const Grid2D& g, int j) { return g.mode_x(j) != 0 && !g.nyquist_x(j); }
}  // namespace

SpectralField2D free_evolve(const SpectralField2D& g, double t) {
  SpectralField2D out = g;
  if (t == 0.0) return out;
  const Grid2D& grid = g.grid;
  for (int j = 0; j < grid.nx(); ++j) {
    if (!evolves(grid, j)) continue;
    const double xi = grid.xi(j);
    for (int k = 0; k < grid.ny(); ++k) out.at(j, k) *= std::polar(1.0, dispersion_symbol(xi, grid.eta(k)) * t);
  }
  return out;
}

SpectralHistory free_history(const SpectralField2D& g, const TimeWindow& w) {
  SpectralHistory h(g.grid, w);
  for (int n = 0; n < w.nt(); ++n) h.set(n, free_evolve(g, w.t(n)));
  return h;
}

namespace {

// Sums the coefficients over eta and inverts in x: u(x_m, 0).
void trace_into(const Grid2D& g, std::span<const cplx> coeffs, std::span<double> out, std::vector<cplx>& work) {
  work.assign(g.nx(), cplx(0.0));
  for (int j = 0; j < g.nx(); ++j) {
    cplx acc(0.0);
    for (int k = 0; k < g.ny(); ++k) acc += coeffs[g.index(j, k)];
    work[j] = (j % 2 == 0 ? acc : -acc) / (g.lx() * g.ly());
  }
  fft::transform_1d(work, fft::Direction::Backward);
  for (int m = 0; m < g.nx(); ++m) out[m] = work[m].real();
}

}  // namespace

std::vector<double> trace_y0(const SpectralField2D& u) {
  std::vector<double> out(u.grid.nx());
  std::vector<cplx> work;
  trace_into(u.grid, u.coeffs, out, work);
  return out;
}

BoundarySamples trace_y0(const SpectralHistory& u) {
  BoundarySamples b(u.grid.nx(), u.grid.lx(), u.window);
  std::vector<cplx> work;
  for (int n = 0; n < u.window.nt(); ++n)
    trace_into(u.grid, u.slice(n),
               std::span<double>(b.values.data() + static_cast<std::size_t>(n) * b.nx, b.nx), work);
  return b;
}

BoundarySamples compute_p(const SpectralField2D& ge, const TimeWindow& w) {
  BoundarySamples b(ge.grid.nx(), ge.grid.lx(), w);
  std::vector<cplx> work;
  for (int n = 0; n < w.nt(); ++n) {
    const double m = cutoffs::mu(w.t(n));
    if (m == 0.0) continue;
    auto row = std::span<double>(b.values.data() + static_cast<std::size_t>(n) * b.nx, b.nx);
    const auto f = free_evolve(ge, w.t(n));
    trace_into(ge.grid, f.coeffs, row, work);
    for (auto& v : row) v *= m;
  }
  return b;
}

cplx branch_r(double xi, double beta) {
  if (xi == 0.0) throw Error(ErrorKind::Domain, "branch_r: xi = 0");
  const double d = beta * xi - std::pow(xi, 6);
  const double r = std::sqrt(std::abs(d));
  if (d > 0.0) return {-r, 0.0};
  return xi > 0.0 ? cplx(0.0, r) : cplx(0.0, -r);
}

// ---------------------------------------------------------------------------

double spectrum_peak(const BoundarySpectrum& sp) {
  double peak = 0.0;
  for (const auto& v : sp.values) peak = std::max(peak, std::abs(v));
  return peak;
}

BoundaryOperator::BoundaryOperator(const BoundaryData& h, const Grid2D& grid, double tail_tolerance,
                                   double reference_peak)
    : grid_(grid) {
  const BoundarySpectrum& sp = h.spectrum;
  if (grid.nx() != sp.nx || grid.lx() != sp.lx) throw Error(ErrorKind::Dimension, "boundary data and grid differ in x");
  zero_ = h.zero;
  if (zero_) return;

  const double own = spectrum_peak(sp);
  if (own == 0.0) {
    zero_ = true;
    return;
  }
  const double negligible = 1e-13 * own;
  const double peak = std::max(own, reference_peak);

  // W1: masked multiplier.
  w1_amp_.assign(grid.size(), cplx(0.0));
  omega_.assign(grid.size(), 0.0);
  std::size_t quadrant = 0, off = 0;
  for (int j = 0; j < grid.nx(); ++j) {
    const double xi = grid.xi(j);
    auto col = sp.column(j);
    const double edge_lo = std::max(std::abs(col[0]), std::abs(col[1]));
    const double edge_hi = std::max(std::abs(col[sp.nbeta - 1]), std::abs(col[sp.nbeta - 2]));
    for (int k = 0; k < grid.ny(); ++k) {
      if (!active_mode(grid, j, k)) continue;
      const double eta = grid.eta(k);
      omega_[grid.index(j, k)] = dispersion_symbol(xi, eta);
      if (!(xi * eta > 0.0)) continue;
      ++quadrant;
      bool on = false;
      const cplx v = h.curve_value(j, eta, -1, &on);
      if (!on) {
        const double beta = std::pow(xi, 5) - eta * eta / xi;
        const double edge = beta < sp.beta0 ? edge_lo : edge_hi;
        diag_.w1_edge_ratio = std::max(diag_.w1_edge_ratio, edge / peak);
        if (edge > kOffGridSignificance * peak) ++off;
        continue;
      }
      w1_amp_[grid.index(j, k)] = (2.0 * eta / xi) * v;
    }
  }
  diag_.w1_off_grid_fraction = quadrant ? static_cast<double>(off) / quadrant : 0.0;

  // W2: eta quadrature along the plus branch beta = xi^5 + eta^2 / xi.
  const double eta_floor = 1.0 / (4.0 * grid.ly());
  const auto& g4 = gauss_legendre(4, 0.0, 1.0);
  const auto& g8 = gauss_legendre(8, 0.0, 1.0);
  constexpr int kCellsPerPanel = 4;
  for (int j = 0; j < grid.nx(); ++j) {
    if (!evolves(grid, j)) continue;
    const double xi = grid.xi(j);
    const double axi = std::abs(xi);
    const double apex = std::pow(xi, 5);
    auto col = sp.column(j);
    int lo = -1, hi = -1;
    for (int m = 0; m < sp.nbeta; ++m)
      if (std::abs(col[m]) > negligible) {
        if (lo < 0) lo = m;
        hi = m;
      }
    if (lo < 0) continue;
    lo = std::max(0, lo - 2);
    hi = std::min(sp.nbeta - 1, hi + 2);
    const double dir = xi > 0.0 ? 1.0 : -1.0;  // direction of beta along the curve
    // Spectrum magnitude where the curve leaves the beta grid.
    const int exit_m = dir > 0 ? sp.nbeta - 1 : 0;
    if ((dir > 0 && apex <= sp.beta_max()) || (dir < 0 && apex >= sp.beta0))
      diag_.w2_tail_ratio = std::max(diag_.w2_tail_ratio, std::abs(col[exit_m]) / peak);

    // Beta interval covered by the curve and the significant part of the column.
    double b_start, b_end;
    if (dir > 0) {
      b_start = std::max(apex, sp.beta(lo));
      b_end = sp.beta(hi);
    } else {
      b_start = std::min(apex, sp.beta(hi));
      b_end = sp.beta(lo);
    }
    if ((b_end - b_start) * dir <= 0.0) continue;
    auto eta_of = [&](double beta) { return std::sqrt(std::max(0.0, axi * (beta - apex) * dir)); };

    std::vector<double> edges;
    const double panel = kCellsPerPanel * sp.dbeta;
    const double e_start = eta_of(b_start);
    const double e_end = eta_of(b_end);
    edges.push_back(e_start);
    // Panels aligned with the beta grid.
    {
      const double first = dir > 0 ? std::ceil((b_start - sp.beta0) / panel) : std::floor((b_start - sp.beta0) / panel);
      for (double c = first;; c += dir) {
        const double b = sp.beta0 + c * panel;
        if ((b - b_end) * dir >= 0.0) break;
        if ((b - b_start) * dir > 0.0) edges.push_back(eta_of(b));
      }
    }
    edges.push_back(e_end);
    // Dyadic refinement toward eta = 0 for the f(eta y) kernel.
    const double first_edge = edges.size() > 1 ? edges[1] : e_end;
    std::vector<double> dyadic;
    for (double e = eta_floor; e < first_edge; e *= 2.0)
      if (e > e_start) dyadic.push_back(e);
    edges.insert(edges.end(), dyadic.begin(), dyadic.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Column c;
    c.j = j;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p], b = edges[p + 1];
      if (b <= a) continue;
      const auto& r = b <= first_edge ? g8 : g4;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double eta = a + r.nodes[i] * (b - a);
        const double beta = apex + eta * eta / xi;
        cplx v;
        if (!sp.value(j, beta, &v)) continue;
        c.eta.push_back(eta);
        c.beta.push_back(beta);
        c.density.push_back(r.weights[i] * (b - a) * (2.0 * eta / axi) * v / (2.0 * kPi));
      }
    }
    diag_.w2_nodes += static_cast<int>(c.eta.size());
    if (!c.eta.empty()) cols_.push_back(std::move(c));
  }

  if (diag_.w1_off_grid_fraction > 0.01) {
    std::ostringstream msg;
    msg << "W1 curve samples under-resolved: " << 100.0 * diag_.w1_off_grid_fraction
        << "% of quadrant modes fall off the beta grid where the spectrum is not negligible (edge level "
        << diag_.w1_edge_ratio << ")";
    throw Error(ErrorKind::Resolution, msg.str());
  }
  if (diag_.w2_tail_ratio > 1e-10) {
    std::ostringstream msg;
    msg << "W2 eta cut-off leaves relative tail " << diag_.w2_tail_ratio;
    diag_.warnings.push_back(msg.str());
    if (tail_tolerance >= 0.0 && diag_.w2_tail_ratio > tail_tolerance)
      throw Error(ErrorKind::Resolution, msg.str() + "; increase H by refining the time grid");
  }
}

SpectralField2D BoundaryOperator::w1(double t) const {
  SpectralField2D out(grid_);
  if (zero_) return out;
  for (std::size_t i = 0; i < w1_amp_.size(); ++i)
    if (w1_amp_[i] != cplx(0.0)) out.coeffs[i] = w1_amp_[i] * std::polar(1.0, omega_[i] * t);
  return out;
}

SpectralHistory BoundaryOperator::w1_history(const TimeWindow& w) const {
  SpectralHistory h(grid_, w);
  if (zero_) return h;
  for (int n = 0; n < w.nt(); ++n) h.set(n, w1(w.t(n)));
  return h;
}

std::vector<cplx> BoundaryOperator::w2_column(int j, std::span<const double> ys, std::span<const double> ts) const {
  std::vector<cplx> out(ys.size() * ts.size(), cplx(0.0));
  for (const auto& c : cols_) {
    if (c.j != j) continue;
    for (std::size_t n = 0; n < ts.size(); ++n)
      for (std::size_t q = 0; q < c.eta.size(); ++q) {
        const cplx e = c.density[q] * std::polar(1.0, c.beta[q] * ts[n]);
        for (std::size_t iy = 0; iy < ys.size(); ++iy)
          out[n * ys.size() + iy] += cutoffs::f_kernel(c.eta[q] * ys[iy]) * e;
      }
  }
  return out;
}

void BoundaryOperator::w2_into(std::span<const double> ts, std::vector<cplx>& out) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  const int nt = static_cast<int>(ts.size());
  out.assign(static_cast<std::size_t>(nt) * grid_.size(), cplx(0.0));
  if (zero_) return;
  // f(eta y) vanishes for eta y < -2 and is below 1e-17 past eta y = 40, so
  // nodes are taken in dyadic eta bands, each on its own band of y rows.
  constexpr double kKernelLow = -2.0, kKernelHigh = 40.0;
  const int y0 = grid_.y0_index();
  const double dy = grid_.dy();
  for (const auto& c : cols_) {
    const int q = static_cast<int>(c.eta.size());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ny, 2 * nt);
    for (int i0 = 0; i0 < q;) {
      int i1 = i0 + 1;
      while (i1 < q && c.eta[i1] <= 2.0 * c.eta[i0]) ++i1;
      const int bq = i1 - i0;
      const double emin = c.eta[i0];
      const int klo = std::max(0, y0 + static_cast<int>(std::floor(kKernelLow / (emin * dy))));
      const int khi = std::min(ny - 1, y0 + static_cast<int>(std::ceil(kKernelHigh / (emin * dy))));
      if (klo <= khi) {
        const int rows = khi - klo + 1;
        Eigen::MatrixXd fy(rows, bq);
        for (int r = 0; r < rows; ++r)
          for (int i = 0; i < bq; ++i) fy(r, i) = cutoffs::f_kernel(c.eta[i0 + i] * grid_.y(klo + r));
        Eigen::MatrixXd e(bq, 2 * nt);
        for (int i = 0; i < bq; ++i)
          for (int n = 0; n < nt; ++n) {
            const cplx v = c.density[i0 + i] * std::polar(1.0, c.beta[i0 + i] * ts[n]);
            e(i, n) = v.real();
            e(i, nt + n) = v.imag();
          }
        acc.middleRows(klo, rows).noalias() += fy * e;
      }
      i0 = i1;
    }
    for (int n = 0; n < nt; ++n)
      for (int k = 0; k < ny; ++k)
        out[static_cast<std::size_t>(n) * grid_.size() + grid_.index(c.j, k)] = cplx(acc(k, n), acc(k, nt + n));
  }
  // Transform in y: continuous-transform scaling with the grid starting at -Ly/2.
  const int len = ny;
  for (int n = 0; n < nt; ++n)
    for (int j = 0; j < nx; ++j) {
      std::span<cplx> row(out.data() + static_cast<std::size_t>(n) * grid_.size() + grid_.index(j, 0), ny);
      bool any = false;
      for (const auto& v : row) any = any || v != cplx(0.0);
      if (!any) continue;
      fft::transform(row, std::span<const int>(&len, 1), fft::Direction::Forward);
      for (int k = 0; k < ny; ++k) row[k] *= (k % 2 == 0 ? grid_.dy() : -grid_.dy());
    }
}

SpectralField2D BoundaryOperator::w2(double t) const {
  std::vector<cplx> buf;
  const double ts[1] = {t};
  w2_into(ts, buf);
  return SpectralField2D(grid_, std::move(buf));
}

SpectralHistory BoundaryOperator::w2_history(const TimeWindow& w) const {
  SpectralHistory h(grid_, w);
  std::vector<double> ts(w.nt());
  for (int n = 0; n < w.nt(); ++n) ts[n] = w.t(n);
  w2_into(ts, h.data);
  return h;
}

SpectralHistory BoundaryOperator::history(const TimeWindow& w) const {
  SpectralHistory h = w2_history(w);
  if (zero_) return h;
  for (int n = 0; n < w.nt(); ++n) {
    const double t = w.t(n);
    auto s = h.slice(n);
    for (std::size_t i = 0; i < w1_amp_.size(); ++i)
      if (w1_amp_[i] != cplx(0.0)) s[i] += w1_amp_[i] * std::polar(1.0, omega_[i] * t);
  }
  return h;
}

SpectralField2D boundary_w1(const BoundaryData& h, const Grid2D& grid, double t) {
  return BoundaryOperator(h, grid).w1(t);
}

std::vector<double> boundary_w2(const BoundaryData& h, const Grid2D& grid, double t) {
  return inverse_transform(BoundaryOperator(h, grid).w2(t));
}

SpectralHistory linear_solution(const InitialData& g, const BoundarySamples& h, LinearDiagnostics* diag,
                                double tail_tolerance, const Extension& ext) {
  if (h.nx != g.grid.nx() || h.lx != g.grid.lx()) throw Error(ErrorKind::Dimension, "g and h differ in x");
  std::vector<std::string> warnings;
  const SpectralField2D ge = extend_initial(g, &warnings, ext);
  const BoundarySamples p = compute_p(ge, h.window);
  const BoundaryData hd = extend_boundary(h, g.s, &p);
  warnings.insert(warnings.end(), hd.warnings.begin(), hd.warnings.end());
  const BoundaryOperator op(hd, g.grid, tail_tolerance);
  SpectralHistory u = free_history(ge, h.window);
  u += op.history(h.window);
  if (diag) {
    diag->compatibility = compatibility_check(g, h, g.s);
    diag->boundary = op.diagnostics();
    warnings.insert(warnings.end(), op.diagnostics().warnings.begin(), op.diagnostics().warnings.end());
    diag->warnings = std::move(warnings);
  }
  return u;
}

}  // namespace kp5
