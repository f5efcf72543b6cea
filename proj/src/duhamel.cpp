#include "kp5/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kp5/cutoffs.hpp"
#include "kp5/errors.hpp"
#include "kp5/quadrature.hpp"

namespace kp5 {

void SolverParams::validate() const {
  std::ostringstream msg;
  if (!(s > 0.0 && s < 2.5) || s == 0.5) {
    msg << "require 0<s<5/2, s!=1/2 (got s=" << s << ")";
    throw Error(ErrorKind::Usage, msg.str());
  }
  if (!(b > 0.0 && b < 0.5)) {
    msg << "require 0<b<1/2 (got b=" << b << ")";
    throw Error(ErrorKind::Usage, msg.str());
  }
  if (!(T > 0.0 && T < 1.0)) {
    msg << "require 0<T<1 (got T=" << T << ")";
    throw Error(ErrorKind::Usage, msg.str());
  }
  if (!(tol_fixed_point > 0.0)) throw Error(ErrorKind::Usage, "require tol > 0");
  if (max_iter < 1) throw Error(ErrorKind::Usage, "require max_iter >= 1");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw Error(ErrorKind::Usage, "require 0 < dealias_fraction <= 1");
}

// ---------------------------------------------------------------------------

SpectralHistory nonlinearity(const SpectralHistory& u, double T, double dealias_fraction) {
  const Grid2D& g = u.grid;
  const TimeWindow& w = u.window;
  SpectralHistory out(g, w);
  std::vector<cplx> a(g.size()), ax(g.size());
  std::vector<cplx> prod(g.size());
  for (int n = 0; n < w.nt(); ++n) {
    const double cut = cutoffs::mu(w.t(n) / T);
    if (cut == 0.0) continue;
    auto src = u.slice(n);
    bool any = false;
    for (int j = 0; j < g.nx(); ++j) {
      const cplx ixi(0.0, g.xi(j));
      for (int k = 0; k < g.ny(); ++k) {
        const std::size_t i = g.index(j, k);
        const bool keep = inside_dealias(g, j, k, dealias_fraction);
        a[i] = keep ? src[i] : cplx(0.0);
        ax[i] = keep ? ixi * src[i] : cplx(0.0);
        any = any || a[i] != cplx(0.0);
      }
    }
    if (!any) continue;
    inverse_in_place(g, a);
    inverse_in_place(g, ax);
    for (std::size_t i = 0; i < g.size(); ++i) prod[i] = -cut * a[i].real() * ax[i].real();
    forward_in_place(g, prod);
    auto dst = out.slice(n);
    for (int j = 0; j < g.nx(); ++j)
      for (int k = 0; k < g.ny(); ++k) {
        const std::size_t i = g.index(j, k);
        dst[i] = inside_dealias(g, j, k, dealias_fraction) && g.mode_x(j) != 0 ? prod[i] : cplx(0.0);
      }
  }
  return out;
}

SpaceTimeField nonlinearity(const SpaceTimeField& u, double T, double dealias_fraction) {
  return to_field(nonlinearity(to_history(u), T, dealias_fraction));
}

namespace {

// M_k = \int_0^1 theta^k e^{-i phi theta} d theta, k = 0, 1, 2.
void moments(double phi, cplx m[3]) {
  if (std::abs(phi) < 0.5) {
    const cplx z(0.0, -phi);
    cplx term(1.0);
    m[0] = m[1] = m[2] = 0.0;
    for (int j = 0; j < 24; ++j) {
      if (j > 0) term *= z / static_cast<double>(j);
      m[0] += term / static_cast<double>(j + 1);
      m[1] += term / static_cast<double>(j + 2);
      m[2] += term / static_cast<double>(j + 3);
    }
    return;
  }
  const cplx e = std::polar(1.0, -phi);
  const cplx d(0.0, -phi);
  m[0] = (e - 1.0) / d;
  m[1] = (e - m[0]) / d;
  m[2] = (e - 2.0 * m[1]) / d;
}

}  // namespace

SpectralHistory duhamel_integral(const SpectralHistory& F) {
  const Grid2D& g = F.grid;
  const TimeWindow& w = F.window;
  const int nt = w.nt();
  const int n0 = w.zero_index();
  const double h = w.dt();
  const std::size_t size = g.size();
  SpectralHistory out(g, w);

  std::vector<cplx> f(nt), step(nt - 1), acc(nt);
  for (int j = 0; j < g.nx(); ++j) {
    for (int k = 0; k < g.ny(); ++k) {
      if (!active_mode(g, j, k)) continue;
      const std::size_t i = g.index(j, k);
      bool any = false;
      for (int n = 0; n < nt; ++n) {
        f[n] = F.data[static_cast<std::size_t>(n) * size + i];
        any = any || f[n] != cplx(0.0);
      }
      if (!any) continue;
      const double omega = dispersion_symbol(g.xi(j), g.eta(k));
      cplx m[3];
      moments(omega * h, m);
      // Forward stencil {0, 1, 2} and backward stencil {-1, 0, 1} in step units.
      const cplx fw0 = 0.5 * (m[2] - 3.0 * m[1] + 2.0 * m[0]);
      const cplx fw1 = -m[2] + 2.0 * m[1];
      const cplx fw2 = 0.5 * (m[2] - m[1]);
      const cplx bwm = 0.5 * (m[2] - m[1]);
      const cplx bw0 = m[0] - m[2];
      const cplx bwp = 0.5 * (m[2] + m[1]);
      for (int n = 0; n + 1 < nt; ++n) {
        const bool right = n >= n0;
        const bool forward = right ? n + 2 < nt : n - 1 < 0;
        const cplx v = forward ? fw0 * f[n] + fw1 * f[n + 1] + fw2 * f[n + 2]
                               : bwm * f[n - 1] + bw0 * f[n] + bwp * f[n + 1];
        step[n] = h * std::polar(1.0, -omega * w.t(n)) * v;
      }
      acc[n0] = 0.0;
      for (int n = n0; n + 1 < nt; ++n) acc[n + 1] = acc[n] + step[n];
      for (int n = n0 - 1; n >= 0; --n) acc[n] = acc[n + 1] - step[n];
      for (int n = 0; n < nt; ++n)
        out.data[static_cast<std::size_t>(n) * size + i] = std::polar(1.0, omega * w.t(n)) * acc[n];
    }
  }
  return out;
}

SpaceTimeField duhamel_integral(const SpaceTimeField& F) { return to_field(duhamel_integral(to_history(F))); }

BoundarySamples q_trace(const SpectralHistory& duhamel) {
  BoundarySamples q = trace_y0(duhamel);
  for (int n = 0; n < q.window.nt(); ++n) {
    const double m = n == q.window.zero_index() ? 0.0 : cutoffs::mu(q.window.t(n));
    for (int x = 0; x < q.nx; ++x) q.at(n, x) *= m;
  }
  return q;
}

// ---------------------------------------------------------------------------

SpectralHistory picard_map(const SpectralHistory& mu_linear, const SpectralHistory& u, const SolverParams& params,
                           std::vector<std::string>* warnings, double reference_peak) {
  const SpectralHistory F = nonlinearity(u, params.T, params.dealias_fraction);
  SpectralHistory I = duhamel_integral(F);
  const BoundarySamples q = q_trace(I);
  const BoundaryData qd = extend_boundary(q, params.s);
  const BoundaryOperator op(qd, u.grid, params.tail_tolerance, reference_peak);
  if (warnings) {
    warnings->insert(warnings->end(), qd.warnings.begin(), qd.warnings.end());
    warnings->insert(warnings->end(), op.diagnostics().warnings.begin(), op.diagnostics().warnings.end());
  }
  I -= op.history(u.window);
  I.multiply_time(cutoffs::mu);
  I += mu_linear;
  return I;
}

PicardResult picard_solve(const InitialData& g, const BoundarySamples& h, const SolverParams& params,
                          const Extension& ext) {
  params.validate();
  // The solver's index governs the norms and the trace rule.
  InitialData gs = g;
  gs.s = params.s;
  LinearDiagnostics ldiag;
  SpectralHistory L = linear_solution(gs, h, &ldiag, params.tail_tolerance, ext);
  L.multiply_time(cutoffs::mu);

  const double reference = spectrum_peak(boundary_transform(trace_y0(L)));

  PicardResult res{L, L, {}};
  PicardDiagnostics& d = res.diagnostics;
  d.warnings = ldiag.warnings;
  std::vector<std::string> scratch;

  const double s = params.s, b = params.b;
  SpectralHistory u = L;
  d.norms.push_back(xsb_norm(u, s, b).value);
  int above_one = 0;
  for (int it = 1; it <= params.max_iter; ++it) {
    SpectralHistory next = picard_map(L, u, params, &scratch, reference);
    SpectralHistory diff = next;
    diff -= u;
    const double dn = xsb_norm(diff, s, b).value;
    const double nn = xsb_norm(next, s, b).value;
    d.norms.push_back(nn);
    d.differences.push_back(dn);
    d.iterations = it;
    u = std::move(next);
    if (d.differences.size() >= 2) {
      const double prev = d.differences[d.differences.size() - 2];
      const double f = prev > 0.0 ? dn / prev : 0.0;
      d.factors.push_back(f);
      d.contraction = std::max(d.contraction, f);
      above_one = f >= 1.0 ? above_one + 1 : 0;
      if (above_one >= 3) {
        std::ostringstream msg;
        msg << "Picard iteration does not contract (difference ratio >= 1 for 3 consecutive iterations, last "
            << f << "); shrink T or the data";
        throw Error(ErrorKind::Convergence, msg.str());
      }
    }
    if (dn <= params.tol_fixed_point * std::max(nn, 1e-300) || dn == 0.0) {
      d.converged = true;
      break;
    }
  }
  if (!d.converged) {
    std::ostringstream msg;
    msg << "Picard iteration did not reach tol " << params.tol_fixed_point << " in " << params.max_iter
        << " iterations; shrink T or the data";
    throw Error(ErrorKind::Convergence, msg.str());
  }

  SpectralHistory again = picard_map(L, u, params, &scratch, reference);
  again -= u;
  const double un = xsb_norm(u, s, b).value;
  d.fixed_point_residual = un > 0.0 ? xsb_norm(again, s, b).value / un : 0.0;

  std::sort(scratch.begin(), scratch.end());
  scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
  if (scratch.size() > 8) scratch.resize(8);
  d.warnings.insert(d.warnings.end(), scratch.begin(), scratch.end());
  res.u = std::move(u);
  return res;
}

// ---------------------------------------------------------------------------

double pde_residual(const SpectralHistory& u, const ResidualRegion& region) {
  const Grid2D& g = u.grid;
  const TimeWindow& w = u.window;
  const double dt = w.dt();
  const std::size_t size = g.size();
  const int y0 = g.y0_index();
  const double ytop = region.y_max_fraction * g.ly();

  KahanSum res, t6, tyy, tnl;
  std::vector<cplx> r(size), b6(size), cyy(size), dn(size);
  std::vector<cplx> a(size), ax(size), prod(size);
  auto region_sq = [&](std::vector<cplx>& buf) {
    inverse_in_place(g, buf);
    double acc = 0.0;
    for (int m = 0; m < g.nx(); ++m)
      for (int n = y0 + 1; n < g.ny() && g.y(n) <= ytop + 1e-12; ++n) acc += std::norm(buf[g.index(m, n)].real());
    return acc * g.dx() * g.dy() * dt;
  };

  for (int n = 2; n + 2 < w.nt(); ++n) {
    const double t = w.t(n);
    if (!(t > region.t_min && t < region.t_max)) continue;
    auto um2 = u.slice(n - 2), um1 = u.slice(n - 1), u0 = u.slice(n), up1 = u.slice(n + 1), up2 = u.slice(n + 2);

    if (region.nonlinear) {
      for (int j = 0; j < g.nx(); ++j)
        for (int k = 0; k < g.ny(); ++k) {
          const std::size_t i = g.index(j, k);
          a[i] = u0[i];
          ax[i] = cplx(0.0, g.nyquist_x(j) ? 0.0 : g.xi(j)) * u0[i];
        }
      inverse_in_place(g, a);
      inverse_in_place(g, ax);
      for (std::size_t i = 0; i < size; ++i) prod[i] = a[i].real() * ax[i].real();
      forward_in_place(g, prod);
    }

    for (int j = 0; j < g.nx(); ++j) {
      const double xi = g.xi(j);
      for (int k = 0; k < g.ny(); ++k) {
        const std::size_t i = g.index(j, k);
        if (g.nyquist_x(j) || g.nyquist_y(k)) {
          r[i] = b6[i] = cyy[i] = dn[i] = 0.0;
          continue;
        }
        const double eta = g.eta(k);
        const cplx ut = (-up2[i] + 8.0 * up1[i] - 8.0 * um1[i] + um2[i]) / (12.0 * dt);
        const cplx A = cplx(0.0, xi) * ut;
        const cplx B = std::pow(xi, 6) * u0[i];
        const cplx C = -eta * eta * u0[i];
        const cplx D = region.nonlinear ? cplx(0.0, xi) * prod[i] : cplx(0.0);
        r[i] = A + B + C + D;
        b6[i] = B;
        cyy[i] = C;
        dn[i] = D;
      }
    }
    res.add(region_sq(r));
    t6.add(region_sq(b6));
    tyy.add(region_sq(cyy));
    if (region.nonlinear) tnl.add(region_sq(dn));
  }
  const double denom = std::sqrt(t6.value()) + std::sqrt(tyy.value()) + std::sqrt(tnl.value());
  if (denom == 0.0) return 0.0;
  return std::sqrt(res.value()) / denom;
}

}  // namespace kp5
