#include "fkpi/fft.hpp"

#include <fftw3.h>

#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace fkpi::fft {

namespace {

using PlanKey = std::pair<std::vector<int>, int>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::span<const int> dims, int sign) {
    PlanKey key{std::vector<int>(dims.begin(), dims.end()), sign};
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    // Plan on a scratch buffer; FFTW_ESTIMATE never touches the data and keeps plans deterministic.
    fftw_complex* scratch = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch, scratch,
                                   sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw std::runtime_error("fft: FFTW failed to create a plan");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform(std::span<const int> dims, std::span<std::complex<double>> data, Direction dir) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("fft: dimensions must be positive");
    total *= static_cast<std::size_t>(d);
  }
  if (data.size() != total) throw std::invalid_argument("fft: buffer size does not match dimensions");
  const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = cache().get(dims, sign);
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buffer, buffer);
}

}  // namespace fkpi::fft
