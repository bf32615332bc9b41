#pragma once

#include <memory>
#include <vector>

#include "cventropic/qstate.hpp"

namespace cventropic {

/// Reduce an angle to (-pi, pi].
double reduce_angle(double theta);

/// Precomputed fractional Fourier transform F(theta) for one grid.
///
/// F(theta) is applied as e^{i theta/2} times a product of three unit-modulus
/// chirps: position chirp e^{-i tan(theta/2) x^2/2}, momentum chirp
/// e^{-i sin(theta) p^2/2} (via the periodic FFT), position chirp again.
/// This is the chirp-multiply / Fourier step / chirp-multiply structure of the
/// integral kernel, regrouped so the middle step stays on the input grid; it is
/// exactly unitary on the grid and regular at sin(theta) = 0. For
/// |theta| > pi/2 the chirp triple runs twice at theta/2. theta = 0 is the
/// identity and theta = pi the parity map (index reversal).
///
/// Convention: F(theta) psi_n = e^{-i n theta} psi_n for oscillator eigenstates,
/// so F(pi/2) is the unitary Fourier transform with kernel e^{-i w x}/sqrt(2 pi).
class FrftPlan {
 public:
  FrftPlan(const GridSpec& grid, double theta);

  double theta() const { return theta_; }
  const GridSpec& grid() const { return grid_; }

  /// Transform one contiguous line of grid.points_per_axis samples in place.
  void apply_line(std::span<Complex> line) const;

  /// Shared plan for (grid, theta); built once, then read-only.
  static std::shared_ptr<const FrftPlan> cached(const GridSpec& grid, double theta);

 private:
  enum class Kind { identity, parity, chirps };

  GridSpec grid_;
  double theta_;
  Kind kind_ = Kind::identity;
  int repeats_ = 1;
  Complex global_phase_{1.0, 0.0};
  std::vector<Complex> position_chirp_;
  std::vector<Complex> momentum_chirp_;  // FFT bin order, includes the 1/N.
};

/// F(theta) along `axis`. The representation tag of that axis advances by theta.
WaveFunction frft_apply(const WaveFunction& state, std::size_t axis, double theta);

/// Unitary Fourier transform (kernel e^{-i w x}/sqrt(2 pi)) along `axis`, or its
/// inverse. Evaluated as a chirp-z quadrature of the continuous transform at the
/// grid's own sample points, independent of FrftPlan.
WaveFunction fourier_apply(const WaveFunction& state, std::size_t axis, bool inverse = false);

/// Same chirp-z quadrature on a raw line of samples (used by the conjecture probe).
std::vector<Complex> fourier_line(const GridSpec& grid, std::span<const Complex> line, bool inverse);

}  // namespace cventropic
