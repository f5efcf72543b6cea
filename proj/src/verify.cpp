#include "kp5/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kp5/cutoffs.hpp"
#include "kp5/data_prep.hpp"
#include "kp5/errors.hpp"
#include "kp5/fft.hpp"
#include "kp5/linear.hpp"
#include "kp5/norms.hpp"
#include "kp5/quadrature.hpp"

namespace kp5::verify {

namespace {
constexpr double kPi = std::numbers::pi;
}

void RatioReport::summarize() {
  samples = static_cast<int>(ratios.size());
  if (ratios.empty()) {
    max = median = min = 0.0;
    return;
  }
  std::vector<double> r = ratios;
  std::sort(r.begin(), r.end());
  min = r.front();
  max = r.back();
  const std::size_t n = r.size();
  median = n % 2 ? r[n / 2] : 0.5 * (r[n / 2 - 1] + r[n / 2]);
}

// ---------------------------------------------------------------------------
// Resonance identity

long double resonance_direct(long double xi, long double xi1, long double theta, long double theta1,
                             long double lambda, long double lambda1) {
  const long double xi2 = xi - xi1;
  const long double theta2 = theta - theta1;
  const long double lambda2 = lambda - lambda1;
  auto tau = [](long double l, long double x, long double th) {
    const long double x2 = x * x;
    return l - x2 * x2 * x + th * th / x;
  };
  return tau(lambda, xi, theta) - tau(lambda1, xi1, theta1) - tau(lambda2, xi2, theta2);
}

double resonance_closed(double xi, double xi1, double theta, double theta1) {
  const double xi2 = xi - xi1;
  const double p = xi * xi1 * xi2;
  const double c = theta * xi1 - theta1 * xi;
  return -5.0 * p * (xi * xi - xi * xi1 + xi1 * xi1) - c * c / p;
}

ResonanceStats check_resonance_identity(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> fx(-8.0, 8.0), fth(-20.0, 20.0), fl(-100.0, 100.0);
  ResonanceStats st;
  st.min_ratio_to_m = std::numeric_limits<double>::infinity();
  while (st.samples < samples) {
    const double xi = fx(rng), xi1 = fx(rng), th = fth(rng), th1 = fth(rng), l = fl(rng), l1 = fl(rng);
    const double xi2 = xi - xi1;
    if (std::abs(xi) < 0.05 || std::abs(xi1) < 0.05 || std::abs(xi2) < 0.05) continue;
    ++st.samples;
    const long double direct = resonance_direct(xi, xi1, th, th1, l, l1);
    const double closed = resonance_closed(xi, xi1, th, th1);
    const double err = static_cast<double>(std::abs(direct - static_cast<long double>(closed))) / std::abs(closed);
    st.max_relative_error = std::max(st.max_relative_error, err);

    const double p = xi * xi1 * xi2;
    const double c = th * xi1 - th1 * xi;
    const double first = -5.0 * p * (xi * xi - xi * xi1 + xi1 * xi1);
    const double second = -c * c / p;
    if (first * second < 0.0) st.same_sign = false;
    const double m = std::abs(p) * (xi * xi + xi1 * xi1) + c * c / std::abs(p);
    st.min_ratio_to_m = std::min(st.min_ratio_to_m, std::abs(closed) / m);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Appendix lemmas

double phi_beta(double beta, double k) {
  const long n = static_cast<long>(std::floor(std::abs(k)));
  KahanSum acc;
  for (long j = n; j >= 1; --j) acc.add(2.0 * std::pow(bracket(static_cast<double>(j)), -beta));
  acc.add(1.0);
  return acc.value();
}

double calculus_lemma_lhs(double beta, double gamma, double k1, double k2) {
  auto f = [&](double t) { return std::pow(bracket(t - k1), -beta) * std::pow(bracket(t - k2), -gamma); };
  const double lo = std::min(k1, k2) - 1.0, hi = std::max(k1, k2) + 1.0;
  KahanSum acc;
  const int panels = std::max(8, static_cast<int>(std::ceil((hi - lo) / 0.25)));
  const auto r = gauss_legendre(8, 0.0, 1.0);
  for (int p = 0; p < panels; ++p) {
    const double a = lo + (hi - lo) * p / panels, b = lo + (hi - lo) * (p + 1) / panels;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc.add(r.weights[i] * (b - a) * f(a + r.nodes[i] * (b - a)));
  }
  // Tails: tau = hi + e^u and tau = lo - e^u, trapezoid in u plus the power-law remainder.
  const double decay = beta + gamma - 1.0;
  const double umax = std::min(700.0, 40.0 / decay + 10.0);
  const double du = 0.02;
  for (int side = 0; side < 2; ++side) {
    const double base = side == 0 ? hi : lo;
    const double dir = side == 0 ? 1.0 : -1.0;
    for (double u = -40.0; u <= umax; u += du) {
      const double e = std::exp(u);
      const double w = (u == -40.0) ? 0.5 : 1.0;
      acc.add(w * du * e * f(base + dir * e));
    }
    const double end = std::exp(umax);
    acc.add(std::pow(end, -decay) / decay);
  }
  return acc.value();
}

double calculus_lemma_check(double beta, double gamma, double k1, double k2) {
  if (!(beta >= gamma && gamma >= 0.0 && beta + gamma > 1.0)) {
    std::ostringstream msg;
    msg << "calculus lemma requires beta >= gamma >= 0 and beta + gamma > 1 (got " << beta << ", " << gamma << ")";
    throw Error(ErrorKind::Domain, msg.str());
  }
  const double k = k1 - k2;
  return calculus_lemma_lhs(beta, gamma, k1, k2) / (std::pow(bracket(k), -gamma) * phi_beta(beta, k));
}

RatioReport calculus_lemma_sweep() {
  static const double pairs[][2] = {{2.0, 0.5}, {1.5, 1.0}, {1.5, 0.0}, {1.0, 0.5}, {1.0, 1.0},
                                    {0.9, 0.6}, {0.75, 0.75}, {0.8, 0.5}};
  static const double gaps[] = {0.0, 0.5, 3.0, 10.0, 100.0, 1000.0, 10000.0};
  RatioReport rep;
  rep.statement = "calculus-lemma";
  for (const auto& bg : pairs)
    for (double k : gaps)
      for (double shift : {-7.0, 2.5}) rep.ratios.push_back(calculus_lemma_check(bg[0], bg[1], shift + k, shift));
  rep.summarize();
  return rep;
}

SchurResult schur_bound_check(const Eigen::MatrixXd& kernel, std::span<const double> p, std::span<const double> q) {
  const auto rows = kernel.rows(), cols = kernel.cols();
  if (static_cast<Eigen::Index>(p.size()) != rows || static_cast<Eigen::Index>(q.size()) != cols)
    throw Error(ErrorKind::Dimension, "Schur weights do not match the kernel");
  SchurResult r;
  for (Eigen::Index j = 0; j < cols; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) s += std::abs(kernel(i, j)) * p[i];
    r.a = std::max(r.a, s / q[j]);
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) s += std::abs(kernel(i, j)) * q[j];
    r.b = std::max(r.b, s / p[i]);
  }
  r.bound = std::sqrt(r.a * r.b);
  if (kernel.cwiseAbs().maxCoeff() == 0.0) {
    r.opnorm = 0.0;
    return r;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Constant(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd w = kernel.transpose() * (kernel * v);
    const double next = w.norm();
    if (next == 0.0) break;
    v = w / next;
    if (std::abs(next - lambda) <= 1e-15 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  r.opnorm = std::sqrt(lambda);
  r.holds = r.opnorm <= r.bound + 1e-9;
  return r;
}

SchurSweep schur_random_kernels(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(4, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SchurSweep out;
  for (int c = 0; c < count; ++c) {
    const int rows = size(rng), cols = size(rng);
    const double decay = 0.5 + 2.0 * unit(rng);
    const double wp = unit(rng) - 0.5, wq = unit(rng) - 0.5;
    Eigen::MatrixXd k(rows, cols);
    std::vector<double> p(rows), q(cols);
    for (int i = 0; i < rows; ++i) p[i] = std::pow(bracket(i), wp);
    for (int j = 0; j < cols; ++j) q[j] = std::pow(bracket(j), wq);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) k(i, j) = unit(rng) * std::pow(bracket(i - j), -decay);
    const SchurResult r = schur_bound_check(k, p, q);
    ++out.kernels;
    if (!r.holds) ++out.failures;
    out.worst_margin = std::max(out.worst_margin, r.opnorm / r.bound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kato smoothing: the y-slice of mu W(t) g has transform
//   phi^(xi_j, beta) = Ly^{-1} sum_k e^{i y eta_k} g^_{jk} mu^(beta - omega_{jk}),
// so its boundary norm is a quadratic form in c_k = e^{i y eta_k} g^_{jk} with
// Gram matrix G_j(k, k') = \int w^2(xi_j, beta) mu^(beta - omega_k) mu^(beta - omega_k') dbeta.

namespace {

constexpr double kMuHatReach = 150.0;

struct KatoGram {
  struct Column {
    int j;
    std::vector<int> ks;
    Eigen::MatrixXd gram;
  };
  std::vector<Column> cols;
};

KatoGram build_gram(const Grid2D& g, const std::vector<char>& mask, double s) {
  KatoGram out;
  const auto& r4 = gauss_legendre(4, 0.0, 1.0);
  for (int j = 0; j < g.nx(); ++j) {
    if (g.mode_x(j) == 0 || g.nyquist_x(j)) continue;
    KatoGram::Column c;
    c.j = j;
    for (int k = 0; k < g.ny(); ++k)
      if (mask[g.index(j, k)] && !g.nyquist_y(k)) c.ks.push_back(k);
    if (c.ks.empty()) continue;
    const double xi = g.xi(j);
    const double kink = std::pow(xi, 5);
    std::vector<double> om(c.ks.size());
    for (std::size_t a = 0; a < c.ks.size(); ++a) om[a] = dispersion_symbol(xi, g.eta(c.ks[a]));
    const double lo = *std::min_element(om.begin(), om.end()) - kMuHatReach;
    const double hi = *std::max_element(om.begin(), om.end()) + kMuHatReach;
    std::vector<double> edges;
    const double width = 0.5;
    const int panels = static_cast<int>(std::ceil((hi - lo) / width));
    for (int p = 0; p <= panels; ++p) edges.push_back(lo + (hi - lo) * p / panels);
    if (kink > lo && kink < hi) {
      edges.push_back(kink);
      std::sort(edges.begin(), edges.end());
    }
    std::vector<double> nodes, weights;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p], b = edges[p + 1];
      if (b <= a) continue;
      const bool left_kink = a == kink, right_kink = b == kink;
      for (std::size_t i = 0; i < r4.nodes.size(); ++i) {
        double beta, wq;
        if (left_kink || right_kink) {
          const double len = std::sqrt(b - a);
          const double u = r4.nodes[i] * len;
          beta = left_kink ? a + u * u : b - u * u;
          wq = r4.weights[i] * len * 2.0 * u;
        } else {
          beta = a + r4.nodes[i] * (b - a);
          wq = r4.weights[i] * (b - a);
        }
        const double w = boundary_weight(xi, beta, s);
        nodes.push_back(beta);
        weights.push_back(wq * w * w);
      }
    }
    Eigen::MatrixXd m(nodes.size(), c.ks.size());
    for (std::size_t q = 0; q < nodes.size(); ++q)
      for (std::size_t a = 0; a < c.ks.size(); ++a) {
        const double d = nodes[q] - om[a];
        m(q, a) = std::abs(d) <= kMuHatReach ? cutoffs::mu_hat(d) : 0.0;
      }
    Eigen::VectorXd wv = Eigen::Map<Eigen::VectorXd>(weights.data(), weights.size());
    c.gram = m.transpose() * wv.asDiagonal() * m;
    out.cols.push_back(std::move(c));
  }
  return out;
}

double gram_norm(const KatoGram& gram, const SpectralField2D& g, double y) {
  const Grid2D& grid = g.grid;
  KahanSum acc;
  for (const auto& c : gram.cols) {
    Eigen::VectorXcd v(c.ks.size());
    for (std::size_t a = 0; a < c.ks.size(); ++a)
      v[a] = std::polar(1.0, y * grid.eta(c.ks[a])) * g.at(c.j, c.ks[a]);
    acc.add((v.adjoint() * c.gram.cast<cplx>() * v)(0, 0).real());
  }
  const double norm2 = acc.value() / (2.0 * kPi * grid.lx() * grid.ly() * grid.ly());
  return std::sqrt(std::max(0.0, norm2));
}

std::vector<char> nonzero_mask(const SpectralField2D& g) {
  std::vector<char> m(g.coeffs.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.coeffs[i] != cplx(0.0);
  return m;
}

// Band-limited random field: sum of translated copies of a bump with transform
// E(zeta) = xi^2 / (xi^2 + c^2) * step(2 - 2|zeta|/band), frequencies scaled by 2^level.
SpectralField2D band_limited_sample(const Grid2D& g, double band, int level, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0), amp(-1.0, 1.0);
  double xs[6], ys[6], as[6];
  for (int m = 0; m < 6; ++m) {
    xs[m] = pos(rng);
    ys[m] = pos(rng);
    as[m] = amp(rng);
  }
  const double scale = std::ldexp(1.0, level);
  const double c = 0.25 * band;
  SpectralField2D out(g);
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k) {
      if (!active_mode(g, j, k)) continue;
      const double xi = g.xi(j) / scale, eta = g.eta(k) / scale;
      const double r = std::hypot(xi, eta);
      const double e = xi * xi / (xi * xi + c * c) * cutoffs::smooth_step(2.0 - 2.0 * r / band);
      if (e == 0.0) continue;
      cplx sum(0.0);
      for (int m = 0; m < 6; ++m) sum += as[m] * std::polar(1.0, -(xi * xs[m] + eta * ys[m]));
      out.at(j, k) = e * sum;
    }
  return out;
}

}  // namespace

double kato_slice_norm(const SpectralField2D& g, double y, double s) {
  const KatoGram gram = build_gram(g.grid, nonzero_mask(g), s);
  return gram_norm(gram, g, y);
}

RatioReport kato_ratio(double s, int ensemble, std::uint64_t seed, const KatoSetup& setup) {
  if (s < 0.0) throw Error(ErrorKind::Domain, "kato_ratio requires s >= 0");
  const Grid2D grid(setup.n, setup.n, setup.length, setup.length);
  RatioReport rep;
  rep.statement = "kato-smoothing";
  rep.s = s;
  rep.grid = setup.n;
  std::vector<double> level_max;
  for (int level = 0; level < setup.rescalings; ++level) {
    std::mt19937_64 rng(seed);
    std::vector<SpectralField2D> samples;
    std::vector<char> mask(grid.size(), 0);
    for (int i = 0; i < ensemble; ++i) {
      samples.push_back(band_limited_sample(grid, setup.band, level, rng));
      for (std::size_t q = 0; q < mask.size(); ++q) mask[q] = mask[q] || samples.back().coeffs[q] != cplx(0.0);
    }
    const KatoGram gram = build_gram(grid, mask, s);
    double mx = 0.0;
    for (const auto& g : samples) {
      const double denom = sobolev_norm(g, s);
      if (denom == 0.0) continue;
      double best = 0.0;
      for (int n = grid.y0_index(); n < grid.ny(); n += setup.y_stride) best = std::max(best, gram_norm(gram, g, grid.y(n)));
      rep.ratios.push_back(best / denom);
      mx = std::max(mx, best / denom);
    }
    level_max.push_back(mx);
    std::ostringstream note;
    note << "rescaling 2^" << level << ": max ratio " << mx;
    rep.notes.push_back(note.str());
  }
  rep.summarize();
  const auto [lo, hi] = std::minmax_element(level_max.begin(), level_max.end());
  rep.growth = *lo > 0.0 ? *hi / *lo : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// W2 and Duhamel-trace ensembles

namespace {

double bump(double z) { return cutoffs::smooth_step(2.0 * (1.0 - std::abs(z))); }

BoundarySamples random_boundary(int nx, double lx, const TimeWindow& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0), amp(-1.0, 1.0), tc(0.45, 0.55), width(3.0, 4.5);
  double xs[3], as[3], ts[3], ws[3];
  for (int m = 0; m < 3; ++m) {
    xs[m] = pos(rng);
    as[m] = amp(rng);
    ts[m] = tc(rng);
    ws[m] = width(rng);
  }
  return BoundarySamples::from_function(nx, lx, w, [&](double x, double t) {
    double v = 0.0;
    for (int m = 0; m < 3; ++m) {
      const double z = (x - xs[m]) / ws[m];
      const double r = (t - ts[m]) / 0.1;
      v += as[m] * z * std::exp(-z * z - r * r) * bump((t - ts[m]) / 0.45);
    }
    return v;
  });
}

SpectralHistory random_forcing(const Grid2D& g, const TimeWindow& w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0), amp(-1.0, 1.0), freq(0.0, 6.0), ph(0.0, 2.0 * kPi);
  double xs[3], ys[3], as[3], nu[3], phs[3];
  for (int m = 0; m < 3; ++m) {
    xs[m] = pos(rng);
    ys[m] = pos(rng);
    as[m] = amp(rng);
    nu[m] = freq(rng);
    phs[m] = ph(rng);
  }
  SpectralHistory F(g, w);
  std::vector<double> vals(g.size());
  for (int n = 0; n < w.nt(); ++n) {
    const double t = w.t(n);
    const double cut = cutoffs::mu(t / 0.5);
    if (cut == 0.0) continue;
    for (int a = 0; a < g.nx(); ++a)
      for (int c = 0; c < g.ny(); ++c) {
        double v = 0.0;
        for (int m = 0; m < 3; ++m) {
          const double dx = g.x(a) - xs[m], dy = g.y(c) - ys[m];
          v += as[m] * dx * std::exp(-dx * dx - 0.5 * dy * dy) * std::cos(nu[m] * t + phs[m]);
        }
        vals[g.index(a, c)] = cut * v;
      }
    F.set(n, project_zero_mode(forward_transform(g, vals)));
  }
  return F;
}

template <typename Fn>
RatioReport refined_ensemble(const std::string& id, double s, double b, int ensemble, std::uint64_t seed,
                             const EnsembleSetup& setup, Fn&& ratio_at) {
  RatioReport rep;
  rep.statement = id;
  rep.s = s;
  rep.b = b;
  rep.grid = setup.n;
  const TimeWindow w(setup.nt, setup.half_width);
  double coarse_max = 0.0;
  {
    std::mt19937_64 rng(seed);
    const Grid2D g(setup.n, setup.n, setup.length, setup.length);
    for (int i = 0; i < ensemble; ++i) {
      const double r = ratio_at(g, w, rng);
      rep.ratios.push_back(r);
      coarse_max = std::max(coarse_max, r);
    }
  }
  if (setup.refine) {
    std::mt19937_64 rng(seed);
    const Grid2D g(2 * setup.n, 2 * setup.n, setup.length, setup.length);
    double fine_max = 0.0;
    for (int i = 0; i < ensemble; ++i) fine_max = std::max(fine_max, ratio_at(g, w, rng));
    rep.growth = coarse_max > 0.0 ? fine_max / coarse_max : 0.0;
    std::ostringstream note;
    note << "grid " << setup.n << ": max " << coarse_max << "; grid " << 2 * setup.n << ": max " << fine_max;
    rep.notes.push_back(note.str());
  }
  rep.summarize();
  return rep;
}

}  // namespace

RatioReport w2_xsb_ratio(double s, double b, int ensemble, std::uint64_t seed, const EnsembleSetup& setup) {
  return refined_ensemble("w2-xsb", s, b, ensemble, seed, setup,
                          [&](const Grid2D& g, const TimeWindow& w, std::mt19937_64& rng) {
                            const BoundarySamples h = random_boundary(g.nx(), g.lx(), w, rng);
                            const BoundaryData hd = extend_boundary(h, s);
                            const BoundaryOperator op(hd, g, -1.0);
                            SpectralHistory u = op.w2_history(w);
                            u.multiply_time(cutoffs::mu);
                            const double den = boundary_norm_beta(hd.spectrum, s).value;
                            return den > 0.0 ? xsb_norm(u, s, b).value / den : 0.0;
                          });
}

RatioReport q_trace_ratio(double s, double b, int ensemble, std::uint64_t seed, const EnsembleSetup& setup) {
  return refined_ensemble("q-trace", s, b, ensemble, seed, setup,
                          [&](const Grid2D& g, const TimeWindow& w, std::mt19937_64& rng) {
                            const SpectralHistory F = random_forcing(g, w, rng);
                            const BoundarySamples q = q_trace(duhamel_integral(F));
                            const double num = boundary_norm_beta(boundary_transform(q), s).value;
                            double den = xsb_norm(F, s, -b).value;
                            if (s > 0.5) den += weighted_xsb_norm(F, s, 0.0).value;
                            return den > 0.0 ? num / den : 0.0;
                          });
}

// ---------------------------------------------------------------------------
// Bilinear estimates

FrequencyBox::FrequencyBox(int n_, double delta_)
    : n(n_), delta(delta_), values(static_cast<std::size_t>(n_) * n_ * n_) {}

FrequencyBox random_xsb_spectrum(int n, double delta, double s, double b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mod(0.0, 1.0), ph(0.0, 2.0 * kPi);
  FrequencyBox u(n, delta);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double xi = u.xi(i), th = u.theta(j), l = u.lambda(k);
        const double w = std::pow(bracket(l - dispersion_symbol(xi, th)), b) * std::pow(bracket(xi * xi + th * th), 0.5 * s);
        const double r = mod(rng);
        u.at(i, j, k) = std::polar(r / w, ph(rng));
      }
  return u;
}

double box_xsb_norm(const FrequencyBox& u, double s, double b) {
  KahanSum acc;
  for (int i = 0; i < u.n; ++i)
    for (int j = 0; j < u.n; ++j)
      for (int k = 0; k < u.n; ++k) {
        const double xi = u.xi(i), th = u.theta(j), l = u.lambda(k);
        const double w2 = std::pow(bracket(l - dispersion_symbol(xi, th)), 2.0 * b) * std::pow(bracket(xi * xi + th * th), s);
        acc.add(w2 * std::norm(u.at(i, j, k)));
      }
  return std::sqrt(acc.value() * u.delta * u.delta * u.delta);
}

double bilinear_pair_ratio(const FrequencyBox& u, const FrequencyBox& v, double s, double a, double b,
                           BilinearTarget target, double epsilon_plus) {
  if (u.n != v.n || u.delta != v.delta) throw Error(ErrorKind::Dimension, "frequency boxes differ");
  const int n = u.n, m = 2 * n;
  const double d = u.delta;
  const std::size_t total = static_cast<std::size_t>(m) * m * m;
  std::vector<cplx> pu(total, cplx(0.0)), pv(total, cplx(0.0));
  auto idx = [m](int i, int j, int k) { return (static_cast<std::size_t>(i) * m + j) * m + k; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        pu[idx(i, j, k)] = u.at(i, j, k);
        pv[idx(i, j, k)] = v.at(i, j, k);
      }
  const int dims[3] = {m, m, m};
  fft::transform(pu, dims, fft::Direction::Forward);
  fft::transform(pv, dims, fft::Direction::Forward);
  for (std::size_t q = 0; q < total; ++q) pu[q] *= pv[q];
  fft::transform(pu, dims, fft::Direction::Backward);
  const double conv_scale = d * d * d / static_cast<double>(total);

  // Output index p = i1 + i2 sits at xi = (p - n + 1) d, theta likewise, lambda = (p - n) d.
  const double sigma = s + a;
  const double b1 = 0.75 - 0.5 * sigma;
  KahanSum acc;
  for (int i = 0; i < m - 1; ++i) {
    const double xi = (i - n + 1) * d;
    if (xi == 0.0) continue;
    for (int j = 0; j < m - 1; ++j) {
      const double th = (j - n + 1) * d;
      const double om = dispersion_symbol(xi, th);
      for (int k = 0; k < m - 1; ++k) {
        const double l = (k - n) * d;
        const double mag2 = std::norm(pu[idx(i, j, k)] * conv_scale) * xi * xi;
        if (mag2 == 0.0) continue;
        double w2;
        if (target == BilinearTarget::Xsb) {
          w2 = std::pow(bracket(l - om), -2.0 * b) * std::pow(bracket(xi * xi + th * th), sigma);
        } else {
          w2 = std::pow(1.0 + xi * xi + th * th, 0.5 + epsilon_plus) * std::pow(std::abs(xi), sigma - 0.5) *
               std::pow(bracket(l - om), -2.0 * b1);
        }
        acc.add(w2 * mag2);
      }
    }
  }
  const double num = std::sqrt(acc.value() * d * d * d);
  const double den = box_xsb_norm(u, s, b) * box_xsb_norm(v, s, b);
  return den > 0.0 ? num / den : 0.0;
}

namespace {

constexpr double kBoxDelta = 0.25;

RatioReport bilinear_run(const std::string& id, double s, double a, double b, int n, int trials, std::uint64_t seed,
                         BilinearTarget target) {
  RatioReport rep;
  rep.statement = id;
  rep.s = s;
  rep.a = a;
  rep.b = b;
  rep.grid = n;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const FrequencyBox u = random_xsb_spectrum(n, kBoxDelta, s, b, rng);
    const FrequencyBox v = random_xsb_spectrum(n, kBoxDelta, s, b, rng);
    rep.ratios.push_back(bilinear_pair_ratio(u, v, s, a, b, target));
  }
  rep.summarize();
  return rep;
}

void check_weighted_range(double s, double a) {
  if (!(s > 0.3 && s < 2.5) || !(a > 0.5 - s && a < a_max(s))) {
    std::ostringstream msg;
    msg << "weighted bilinear estimate requires 3/10 < s < 5/2 and 1/2 - s < a < a_max(s) (got s=" << s << ", a=" << a
        << ")";
    throw Error(ErrorKind::Domain, msg.str());
  }
}

}  // namespace

RatioReport bilinear_ratio(double s, double a, double b, int grid_n, int trials, std::uint64_t seed) {
  return bilinear_run("bilinear-xsb", s, a, b, grid_n, trials, seed, BilinearTarget::Xsb);
}

RatioReport weighted_bilinear_ratio(double s, double a, int grid_n, int trials, std::uint64_t seed, double b) {
  check_weighted_range(s, a);
  return bilinear_run("bilinear-weighted", s, a, b, grid_n, trials, seed, BilinearTarget::Weighted);
}

RatioReport bilinear_growth(double s, double a, double b, int n1, int n2, int trials, std::uint64_t seed,
                            BilinearTarget target) {
  if (target == BilinearTarget::Weighted) check_weighted_range(s, a);
  const std::string id = target == BilinearTarget::Xsb ? "bilinear-xsb" : "bilinear-weighted";
  RatioReport coarse = bilinear_run(id, s, a, b, n1, trials, seed, target);
  RatioReport fine = bilinear_run(id, s, a, b, n2, trials, seed, target);
  fine.growth = coarse.max > 0.0 ? fine.max / coarse.max : 0.0;
  std::ostringstream note;
  note << "grid " << n1 << ": max " << coarse.max << "; grid " << n2 << ": max " << fine.max;
  fine.notes.push_back(note.str());
  return fine;
}

// ---------------------------------------------------------------------------
// Smoothing

ShellFit shell_fit(const SpectralField2D& u, int k_min, int k_max, double dealias_fraction) {
  const Grid2D& g = u.grid;
  const double cut = dealias_fraction * 0.5 * std::min(g.nx(), g.ny());
  ShellFit fit;
  for (int k = k_min; k < k_max; ++k) {
    const double lo = std::ldexp(1.0, k);
    const double hi = std::min(std::ldexp(1.0, k + 1), cut);
    if (hi <= lo) break;
    KahanSum e, logr;
    int count = 0;
    for (int j = 0; j < g.nx(); ++j)
      for (int q = 0; q < g.ny(); ++q) {
        if (!active_mode(g, j, q) || !inside_dealias(g, j, q, dealias_fraction)) continue;
        const double r = std::hypot(g.mode_x(j), g.mode_y(q));
        if (r < lo || r >= hi) continue;
        e.add(std::norm(u.at(j, q)));
        logr.add(std::log(r));
        ++count;
      }
    if (count == 0) continue;
    fit.radius.push_back(std::exp(logr.value() / count));
    fit.energy.push_back(e.value() / count);
  }
  const std::size_t n = fit.radius.size();
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::log(fit.radius[i]);
      const double y = std::log(std::max(fit.energy[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.index = -0.5 * fit.slope - 1.0;
  }
  return fit;
}

SmoothingReport smoothing_fit(std::uint64_t seed, double s, std::span<const double> a_grid, const SolverParams& params,
                              const SmoothingSetup& setup) {
  SmoothingReport rep;
  rep.a_target = std::min(0.25, a_max(s) - 0.05);
  const Grid2D grid(setup.n, setup.n, setup.length, setup.length);
  const TimeWindow w(setup.nt, setup.half_width);
  SolverParams p = params;
  p.s = s;

  const SpectralField2D sample = make_sobolev_sample(s, seed, grid, setup.amplitude);
  const std::vector<double> full = inverse_transform(sample);
  // The sample is its own extension; a reflection of a field that does not
  // decay toward y = Ly/2 would add jumps.
  const Extension identity = [full](const InitialData&) { return full; };
  const InitialData g = InitialData::from_full(grid, full, s);
  const SpectralField2D ge = extend_initial(g, nullptr, identity);
  const BoundarySamples h = compute_p(ge, w);

  PicardResult res = picard_solve(g, h, p, identity);
  rep.picard = res.diagnostics;

  int nh = 0;
  for (int n = 0; n < w.nt(); ++n)
    if (std::abs(w.t(n) - 0.5 * p.T) < std::abs(w.t(nh) - 0.5 * p.T)) nh = n;
  const SpectralField2D lin = res.linear.field(nh);
  SpectralField2D d = res.u.field(nh);
  d -= lin;
  rep.applicable = std::any_of(d.coeffs.begin(), d.coeffs.end(), [](const cplx& c) { return c != cplx(0.0); });
  rep.nonlinear = shell_fit(d, setup.k_min, setup.k_max, p.dealias_fraction);
  rep.linear = shell_fit(lin, setup.k_min, setup.k_max, p.dealias_fraction);
  rep.data = shell_fit(ge, setup.k_min, setup.k_max, p.dealias_fraction);
  if (!rep.applicable) return rep;
  rep.gain = rep.nonlinear.index - rep.linear.index;
  rep.control_gain = rep.linear.index - rep.data.index;
  rep.passed = rep.gain >= rep.a_target - 0.1;
  for (double a : a_grid) rep.per_a.emplace_back(a, rep.gain >= a - 0.1);
  return rep;
}

}  // namespace kp5::verify
