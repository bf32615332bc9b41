#pragma once

#include "cventropic/qstate.hpp"

namespace cventropic {

/// Differential Shannon entropy in nats.
struct EntropyEstimate {
  double value = 0.0;
  /// Probability within 5 bins of either end of the support. Above 1e-6 the
  /// estimate is likely biased by truncation.
  double bias_diagnostic = 0.0;
  double zero_bin_fraction = 0.0;

  bool biased() const { return bias_diagnostic > 1e-6; }
};

struct VarianceEstimate {
  double value = 0.0;
  double mean = 0.0;
};

/// -sum p_i ln p_i * dx over the bins; 0 ln 0 = 0 and masses below 1e-300 count as 0.
/// Throws DomainError on negative or non-finite mass.
EntropyEstimate differential_entropy(const GriddedDensity& density);

/// Second central moment by midpoint quadrature.
VarianceEstimate variance(const GriddedDensity& density);

/// exp(2H - 1) / (2 pi): the variance of the Gaussian with entropy H, and a lower
/// bound on the variance of any density with entropy H.
double entropy_variance_floor(double entropy);
inline double entropy_variance_floor(const EntropyEstimate& h) { return entropy_variance_floor(h.value); }

}  // namespace cventropic
