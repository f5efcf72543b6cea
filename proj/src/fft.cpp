#include "kp5/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "kp5/errors.hpp"

namespace kp5::fft {
namespace {

struct PlanKey {
  std::vector<int> dims;
  int howmany;
  int stride;
  int sign;
  bool operator<(const PlanKey& o) const {
    return std::tie(dims, howmany, stride, sign) <
           std::tie(o.dims, o.howmany, o.stride, o.sign);
  }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = static_cast<std::size_t>(key.howmany);
    for (int d : key.dims) total *= static_cast<std::size_t>(d);
    std::vector<cplx> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int rank = static_cast<int>(key.dims.size());
    // Contiguous arrays use dist = product(dims); strided batches use dist = 1.
    const int dist = key.stride == 1 ? static_cast<int>(total / key.howmany) : 1;
    fftw_plan plan = fftw_plan_many_dft(rank, key.dims.data(), key.howmany, buf, nullptr,
                                        key.stride, dist, buf, nullptr, key.stride, dist,
                                        key.sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error(ErrorKind::Dimension, "fftw planner failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

int sign_of(Direction dir) { return dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD; }

}  // namespace

void transform(std::span<cplx> data, std::span<const int> dims, Direction dir) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (total != data.size()) throw Error(ErrorKind::Dimension, "fft: buffer size does not match dims");
  PlanKey key{std::vector<int>(dims.begin(), dims.end()), 1, 1, sign_of(dir)};
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(key), buf, buf);
}

void transform_strided(std::span<cplx> data, int n, int batch, Direction dir) {
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(batch) != data.size())
    throw Error(ErrorKind::Dimension, "fft: strided buffer size mismatch");
  PlanKey key{{n}, batch, batch, sign_of(dir)};
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(key), buf, buf);
}

}  // namespace kp5::fft
