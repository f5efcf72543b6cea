#include "kp5/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kp5/errors.hpp"
#include "kp5/quadrature.hpp"

namespace kp5 {

namespace {
constexpr double kPi = std::numbers::pi;
}

void NormParams::validate_for_solver() const {
  std::ostringstream msg;
  if (!(s > 0.0 && s < 2.5) || s == 0.5) {
    msg << "require 0<s<5/2, s!=1/2 (got s=" << s << ")";
    throw Error(ErrorKind::Usage, msg.str());
  }
  if (!(b > 0.0 && b < 0.5)) {
    msg << "require 0<b<1/2 (got b=" << b << ")";
    throw Error(ErrorKind::Usage, msg.str());
  }
  const double amax = a_max(s);
  if (!(a > 0.0 && a < amax)) {
    msg << "require 0<a<min(1/3, 2s/3, 3/2-3s/5)=" << amax << " (got a=" << a << ", s=" << s << ")";
    throw Error(ErrorKind::Usage, msg.str());
  }
  if (!(epsilon_plus > 0.0)) throw Error(ErrorKind::Usage, "require epsilon_plus > 0");
}

double a_max(double s) {
  if (!(s > 0.0 && s < 2.5)) {
    std::ostringstream msg;
    msg << "a_max: require 0<s<5/2 (got s=" << s << ")";
    throw Error(ErrorKind::Domain, msg.str());
  }
  return std::min({1.0 / 3.0, 2.0 * s / 3.0, 1.5 - 0.6 * s});
}

double sobolev_norm(const SpectralField2D& field, double s) {
  const Grid2D& g = field.grid;
  KahanSum acc;
  for (int j = 0; j < g.nx(); ++j) {
    const double xi = g.xi(j);
    for (int k = 0; k < g.ny(); ++k) {
      const double eta = g.eta(k);
      const double w = s == 0.0 ? 1.0 : std::pow(bracket(xi * xi + eta * eta), s);
      acc.add(w * std::norm(field.at(j, k)));
    }
  }
  return std::sqrt(acc.value() / (g.lx() * g.ly()));
}

// ---------------------------------------------------------------------------
// Boundary space

BoundarySpectrum::BoundarySpectrum(int nx_, double lx_, double beta0_, double dbeta_, int nbeta_)
    : nx(nx_), lx(lx_), beta0(beta0_), dbeta(dbeta_), nbeta(nbeta_),
      values(static_cast<std::size_t>(nx_) * nbeta_) {
  if (nbeta_ < 4) throw Error(ErrorKind::Dimension, "boundary spectrum needs at least 4 beta samples");
}

double BoundarySpectrum::xi(int j) const {
  const int mode = j < nx / 2 ? j : j - nx;
  return 2.0 * kPi * mode / lx;
}

bool BoundarySpectrum::value(int j, double beta, cplx* out) const {
  return cubic_uniform<cplx>(column(j), beta0, dbeta, beta, out);
}

double BoundarySpectrum::edge_ratio() const {
  double peak = 0.0, edge = 0.0;
  for (int j = 0; j < nx; ++j) {
    auto c = column(j);
    for (const auto& v : c) peak = std::max(peak, std::abs(v));
    for (int m : {0, 1, nbeta - 2, nbeta - 1}) edge = std::max(edge, std::abs(c[m]));
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

double boundary_weight(double xi, double beta, double s) {
  const double d = std::abs(xi * beta - std::pow(xi, 6));
  return std::pow(bracket(xi * xi + d), 0.5 * s) * std::pow(d, 0.25) / std::sqrt(std::abs(xi));
}

namespace {

const QuadratureRule& unit_gauss() {
  static const QuadratureRule r = gauss_legendre(4, 0.0, 1.0);
  return r;
}

// \int_a^b F(beta) dbeta where F may have a square-root type kink at `kink`,
// which must be a or b if it lies in [a, b].
template <typename F>
double integrate_piece(double a, double b, double kink, F&& fn) {
  const auto& r = unit_gauss();
  double acc = 0.0;
  if (kink == a || kink == b) {
    const double len = std::sqrt(b - a);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double u = r.nodes[i] * len;
      const double beta = kink == a ? a + u * u : b - u * u;
      acc += r.weights[i] * len * 2.0 * u * fn(beta);
    }
  } else {
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      acc += r.weights[i] * (b - a) * fn(a + r.nodes[i] * (b - a));
  }
  return acc;
}

void note_truncation(const BoundarySpectrum& phi, NormResult& res) {
  const double edge = phi.edge_ratio();
  if (edge > 1e-10) {
    std::ostringstream msg;
    msg << "boundary spectrum not negligible at the beta-grid edge (relative " << edge << ")";
    res.warnings.push_back(msg.str());
  }
}

}  // namespace

NormResult boundary_norm_beta(const BoundarySpectrum& phi, double s) {
  NormResult res;
  KahanSum total;
  for (int j = 0; j < phi.nx; ++j) {
    const double xi = phi.xi(j);
    if (xi == 0.0 || j == phi.nx / 2) continue;
    const double kink = std::pow(xi, 5);
    auto integrand = [&](double beta) {
      cplx v;
      if (!phi.value(j, beta, &v)) return 0.0;
      const double w = boundary_weight(xi, beta, s);
      return w * w * std::norm(v);
    };
    KahanSum col;
    for (int m = 0; m + 1 < phi.nbeta; ++m) {
      const double a = phi.beta(m), b = phi.beta(m + 1);
      if (kink > a && kink < b) {
        col.add(integrate_piece(a, kink, kink, integrand));
        col.add(integrate_piece(kink, b, kink, integrand));
      } else {
        col.add(integrate_piece(a, b, kink, integrand));
      }
    }
    total.add(col.value());
  }
  note_truncation(phi, res);
  res.value = std::sqrt(total.value() / (2.0 * kPi * phi.lx));
  return res;
}

NormResult boundary_norm_eta(const BoundarySpectrum& phi, double s) {
  NormResult res;
  KahanSum total;
  const auto& r = unit_gauss();
  for (int j = 0; j < phi.nx; ++j) {
    const double xi = phi.xi(j);
    if (xi == 0.0 || j == phi.nx / 2) continue;
    const double axi = std::abs(xi);
    const double apex = std::pow(xi, 5);
    for (int branch : {+1, -1}) {
      // beta moves away from the apex in direction `dir` as eta grows.
      const double dir = branch * (xi > 0 ? 1.0 : -1.0);
      std::vector<double> edges;
      if (dir > 0) {
        if (apex < phi.beta_max()) {
          if (apex >= phi.beta0) edges.push_back(0.0);
          for (int m = 0; m < phi.nbeta; ++m)
            if (phi.beta(m) > apex) edges.push_back(std::sqrt(axi * (phi.beta(m) - apex)));
        }
      } else {
        if (apex > phi.beta0) {
          if (apex <= phi.beta_max()) edges.push_back(0.0);
          for (int m = phi.nbeta - 1; m >= 0; --m)
            if (phi.beta(m) < apex) edges.push_back(std::sqrt(axi * (apex - phi.beta(m))));
        }
      }
      KahanSum col;
      for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], b = edges[p + 1];
        double acc = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
          const double eta = a + r.nodes[i] * (b - a);
          const double beta = apex + branch * eta * eta / xi;
          cplx v;
          if (!phi.value(j, beta, &v)) continue;
          const double w = std::pow(bracket(xi * xi + eta * eta), s) * (eta / xi) * (eta / xi);
          acc += r.weights[i] * (b - a) * w * std::norm(v);
        }
        // eta and -eta give the same curve point.
        col.add(2.0 * acc);
      }
      total.add(col.value());
    }
  }
  note_truncation(phi, res);
  res.value = std::sqrt(total.value() / (2.0 * kPi * phi.lx));
  return res;
}

// ---------------------------------------------------------------------------
// Space-time norms

namespace {

template <typename Weight>
NormResult profile_norm(const SpectralHistory& u, Weight&& weight_sq) {
  const Grid2D& g = u.grid;
  const TimeWindow& w = u.window;
  const int batch = static_cast<int>(g.size());
  NormResult res;

  // Edge mass diagnostic: the field must be time-localized inside the window.
  {
    KahanSum all, edge;
    for (int n = 0; n < w.nt(); ++n) {
      double e = 0.0;
      for (const auto& v : u.slice(n)) e += std::norm(v);
      all.add(e);
      if (std::abs(w.t(n)) > w.half_width() - 2.0 * w.dt()) edge.add(e);
    }
    if (all.value() > 0.0 && edge.value() > 1e-12 * all.value()) {
      std::ostringstream msg;
      msg << "field not negligible at the time-window edges (relative " << edge.value() / all.value() << ")";
      res.warnings.push_back(msg.str());
    }
  }

  std::vector<double> omega(g.size(), 0.0);
  std::vector<char> active(g.size(), 0);
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k)
      if (active_mode(g, j, k)) {
        active[g.index(j, k)] = 1;
        omega[g.index(j, k)] = dispersion_symbol(g.xi(j), g.eta(k));
      }

  std::vector<cplx> prof(u.data.size());
  for (int n = 0; n < w.nt(); ++n) {
    const double t = w.t(n);
    auto src = u.slice(n);
    cplx* dst = prof.data() + static_cast<std::size_t>(n) * batch;
    for (int i = 0; i < batch; ++i)
      dst[i] = active[i] ? src[i] * std::polar(1.0, -omega[i] * t) : cplx(0.0);
  }
  time_forward_in_place(w, prof, batch);

  KahanSum acc;
  for (int m = 0; m < w.nt(); ++m) {
    const double tau = w.tau(m);
    const cplx* row = prof.data() + static_cast<std::size_t>(m) * batch;
    for (int j = 0; j < g.nx(); ++j)
      for (int k = 0; k < g.ny(); ++k) {
        const std::size_t i = g.index(j, k);
        if (!active[i]) continue;
        acc.add(weight_sq(g.xi(j), g.eta(k), tau) * std::norm(row[i]));
      }
  }
  res.value = std::sqrt(acc.value() / (g.lx() * g.ly() * w.period()));
  return res;
}

}  // namespace

NormResult xsb_norm(const SpectralHistory& u, double s, double b) {
  return profile_norm(u, [s, b](double xi, double eta, double tau) {
    const double ws = s == 0.0 ? 1.0 : std::pow(bracket(xi * xi + eta * eta), s);
    const double wb = b == 0.0 ? 1.0 : std::pow(bracket(tau), 2.0 * b);
    return ws * wb;
  });
}

NormResult xsb_norm(const SpaceTimeField& u, double s, double b) { return xsb_norm(to_history(u), s, b); }

NormResult weighted_xsb_norm(const SpectralHistory& f, double s, double a, double epsilon_plus) {
  const double sigma = s + a;
  const double b1 = 0.75 - 0.5 * sigma;
  const double px = sigma - 0.5;  // |xi|^{2((s+a)/2 - 1/4)}
  const double pz = 1.0 + 2.0 * epsilon_plus;
  return profile_norm(f, [=](double xi, double eta, double tau) {
    return std::pow(1.0 + xi * xi + eta * eta, 0.5 * pz) * std::pow(std::abs(xi), px) *
           std::pow(bracket(tau), -2.0 * b1);
  });
}

NormResult weighted_xsb_norm(const SpaceTimeField& f, double s, double a, double epsilon_plus) {
  return weighted_xsb_norm(to_history(f), s, a, epsilon_plus);
}

}  // namespace kp5
