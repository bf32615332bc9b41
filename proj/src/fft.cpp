#include "cventropic/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace cventropic::fft {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<std::complex<double>> data, int sign) {
  if (data.empty()) return;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(data.size(), sign), p, p);
}

}  // namespace

void forward(std::span<std::complex<double>> data) { run(data, FFTW_FORWARD); }
void backward(std::span<std::complex<double>> data) { run(data, FFTW_BACKWARD); }

double angular_frequency(std::size_t m, std::size_t n, double dx) {
  const auto mm = static_cast<double>(m < (n + 1) / 2 ? static_cast<long>(m)
                                                      : static_cast<long>(m) - static_cast<long>(n));
  return 2.0 * std::numbers::pi * mm / (static_cast<double>(n) * dx);
}

}  // namespace cventropic::fft
