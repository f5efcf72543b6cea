#include "kp5/spacetime.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kp5/errors.hpp"

namespace kp5 {

TimeWindow::TimeWindow(int nt, double half_width) : nt_(nt), tw_(half_width) {
  if (nt < 8 || nt % 2 != 0) throw Error(ErrorKind::Dimension, "time window needs an even nt >= 8");
  if (!(half_width >= 2.0))
    throw Error(ErrorKind::Domain, "time window must contain [-2, 2], got half width " +
                                       std::to_string(half_width));
}

double TimeWindow::tau(int m) const {
  const int mode = m < nt_ / 2 ? m : m - nt_;
  return 2.0 * std::numbers::pi * mode / period();
}

SpaceTimeField::SpaceTimeField(const Grid2D& g, const TimeWindow& w)
    : grid(g), window(w), values(g.size() * w.nt(), 0.0) {}

SpaceTimeField::SpaceTimeField(const Grid2D& g, const TimeWindow& w, std::vector<double> v)
    : grid(g), window(w), values(std::move(v)) {
  if (values.size() != g.size() * w.nt())
    throw Error(ErrorKind::Dimension, "space-time array does not match grid x window");
}

SpectralHistory::SpectralHistory(const Grid2D& g, const TimeWindow& w)
    : grid(g), window(w), data(g.size() * w.nt()) {}

SpectralField2D SpectralHistory::field(int n) const {
  auto s = slice(n);
  return SpectralField2D(grid, std::vector<cplx>(s.begin(), s.end()));
}

void SpectralHistory::set(int n, const SpectralField2D& f) {
  if (!(f.grid == grid)) throw Error(ErrorKind::Dimension, "history slice on a different grid");
  std::copy(f.coeffs.begin(), f.coeffs.end(), slice(n).begin());
}

namespace {
void check_same(const SpectralHistory& a, const SpectralHistory& b) {
  if (!(a.grid == b.grid) || !(a.window == b.window))
    throw Error(ErrorKind::Dimension, "histories on different grids or windows");
}
}  // namespace

SpectralHistory& SpectralHistory::operator+=(const SpectralHistory& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

SpectralHistory& SpectralHistory::operator-=(const SpectralHistory& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}

SpectralHistory& SpectralHistory::operator*=(double c) {
  for (auto& v : data) v *= c;
  return *this;
}

SpectralHistory& SpectralHistory::multiply_time(const std::function<double(double)>& cutoff) {
  for (int n = 0; n < window.nt(); ++n) {
    const double c = cutoff(window.t(n));
    for (auto& v : slice(n)) v *= c;
  }
  return *this;
}

SpectralHistory to_history(const SpaceTimeField& u) {
  SpectralHistory h(u.grid, u.window);
  for (int n = 0; n < u.window.nt(); ++n) {
    auto src = u.slice(n);
    auto dst = h.slice(n);
    std::copy(src.begin(), src.end(), dst.begin());
    forward_in_place(u.grid, dst);
  }
  return h;
}

SpaceTimeField to_field(const SpectralHistory& h) {
  SpaceTimeField u(h.grid, h.window);
  std::vector<cplx> buf(h.grid.size());
  for (int n = 0; n < h.window.nt(); ++n) {
    auto src = h.slice(n);
    std::copy(src.begin(), src.end(), buf.begin());
    inverse_in_place(h.grid, buf);
    auto dst = u.slice(n);
    for (std::size_t i = 0; i < buf.size(); ++i) dst[i] = buf[i].real();
  }
  return u;
}

// t_n = -T_w + n dt, so e^{-i tau_m t_n} = (-1)^m e^{-2 pi i m n / nt}.
void time_forward_in_place(const TimeWindow& w, std::span<cplx> data, int batch) {
  fft::transform_strided(data, w.nt(), batch, fft::Direction::Forward);
  for (int m = 0; m < w.nt(); ++m) {
    const double f = (m % 2 == 0 ? 1.0 : -1.0) * w.dt();
    for (int b = 0; b < batch; ++b) data[static_cast<std::size_t>(m) * batch + b] *= f;
  }
}

void time_inverse_in_place(const TimeWindow& w, std::span<cplx> data, int batch) {
  for (int m = 0; m < w.nt(); ++m) {
    const double f = (m % 2 == 0 ? 1.0 : -1.0) / w.period();
    for (int b = 0; b < batch; ++b) data[static_cast<std::size_t>(m) * batch + b] *= f;
  }
  fft::transform_strided(data, w.nt(), batch, fft::Direction::Backward);
}

SpectralForm3D spectral_form_3d(const SpaceTimeField& u) {
  SpectralHistory h = to_history(u);
  time_forward_in_place(u.window, h.data, static_cast<int>(u.grid.size()));
  return SpectralForm3D{u.grid, u.window, std::move(h.data)};
}

SpaceTimeField from_spectral_form_3d(const SpectralForm3D& f) {
  SpectralHistory h(f.grid, f.window);
  h.data = f.data;
  time_inverse_in_place(f.window, h.data, static_cast<int>(f.grid.size()));
  return to_field(h);
}

}  // namespace kp5
