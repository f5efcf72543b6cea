#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kp5/grid.hpp"

namespace kp5 {

/// Uniform periodic time samples t_n = -T_w + n dt, n = 0..nt-1, dt = 2 T_w / nt.
class TimeWindow {
 public:
  /// The window must contain [-2, 2], the support of the time cutoff.
  TimeWindow(int nt, double half_width);

  int nt() const { return nt_; }
  double half_width() const { return tw_; }
  double period() const { return 2.0 * tw_; }
  double dt() const { return 2.0 * tw_ / nt_; }
  double t(int n) const { return -tw_ + n * dt(); }
  /// Index of t = 0.
  int zero_index() const { return nt_ / 2; }
  /// Dual frequency of FFT-order index m.
  double tau(int m) const;

  bool operator==(const TimeWindow& o) const { return nt_ == o.nt_ && tw_ == o.tw_; }

 private:
  int nt_;
  double tw_;
};

/// Real field on grid x window, stored time-slowest: values[(n * nx + m) * ny + k].
struct SpaceTimeField {
  Grid2D grid;
  TimeWindow window;
  std::vector<double> values;

  SpaceTimeField(const Grid2D& g, const TimeWindow& w);
  SpaceTimeField(const Grid2D& g, const TimeWindow& w, std::vector<double> v);

  std::span<double> slice(int n) { return {values.data() + n * grid.size(), grid.size()}; }
  std::span<const double> slice(int n) const { return {values.data() + n * grid.size(), grid.size()}; }
};

/// Spatial spectra at every time sample; the solver's working representation.
struct SpectralHistory {
  Grid2D grid;
  TimeWindow window;
  std::vector<cplx> data;

  SpectralHistory(const Grid2D& g, const TimeWindow& w);

  std::span<cplx> slice(int n) { return {data.data() + n * grid.size(), grid.size()}; }
  std::span<const cplx> slice(int n) const { return {data.data() + n * grid.size(), grid.size()}; }
  SpectralField2D field(int n) const;
  void set(int n, const SpectralField2D& f);

  SpectralHistory& operator+=(const SpectralHistory& o);
  SpectralHistory& operator-=(const SpectralHistory& o);
  SpectralHistory& operator*=(double c);
  /// Multiplies slice n by cutoff(t_n).
  SpectralHistory& multiply_time(const std::function<double(double)>& cutoff);
};

SpectralHistory to_history(const SpaceTimeField& u);
SpaceTimeField to_field(const SpectralHistory& h);

/// Samples u^(xi_j, eta_k, tau_m) of the space-time Fourier transform,
/// layout [m][j][k] with m in FFT order.
struct SpectralForm3D {
  Grid2D grid;
  TimeWindow window;
  std::vector<cplx> data;
};

SpectralForm3D spectral_form_3d(const SpaceTimeField& u);
SpaceTimeField from_spectral_form_3d(const SpectralForm3D& f);

/// Applies the time FFT (continuous-transform scaling) to a [nt x batch] array in place.
void time_forward_in_place(const TimeWindow& w, std::span<cplx> data, int batch);
void time_inverse_in_place(const TimeWindow& w, std::span<cplx> data, int batch);

}  // namespace kp5
