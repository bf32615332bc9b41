#include "cventropic/entropy.hpp"

#include <cmath>
#include <numbers>

#include "cventropic/errors.hpp"

namespace cventropic {

EntropyEstimate differential_entropy(const GriddedDensity& density) {
  if (!(density.spacing > 0.0)) throw DomainError("density spacing must be positive");
  const std::size_t n = density.mass.size();
  EntropyEstimate out;
  double h = 0.0;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = density.mass[i];
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("density has negative or non-finite mass");
    if (p < 1e-300) {
      ++zeros;
      continue;
    }
    h -= p * std::log(p);
    if (i < 5 || i + 5 >= n) out.bias_diagnostic += p * density.spacing;
  }
  out.value = h * density.spacing;
  out.zero_bin_fraction = n ? static_cast<double>(zeros) / static_cast<double>(n) : 0.0;
  return out;
}

VarianceEstimate variance(const GriddedDensity& density) {
  double total = 0.0, first = 0.0;
  for (std::size_t i = 0; i < density.mass.size(); ++i) {
    total += density.mass[i];
    first += density.mass[i] * density.center(i);
  }
  if (!(total > 0.0)) throw DomainError("density has no mass");
  const double mean = first / total;
  double second = 0.0;
  for (std::size_t i = 0; i < density.mass.size(); ++i) {
    const double d = density.center(i) - mean;
    second += density.mass[i] * d * d;
  }
  return {second / total, mean};
}

double entropy_variance_floor(double entropy) {
  return std::exp(2.0 * entropy - 1.0) / (2.0 * std::numbers::pi);
}

}  // namespace cventropic
