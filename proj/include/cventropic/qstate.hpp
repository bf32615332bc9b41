#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cventropic {

using Complex = std::complex<double>;

/// Uniform grid shared by every axis. Samples sit at cell midpoints,
/// x_i = -L + (i + 1/2) * spacing, so index reversal is exact parity.
struct GridSpec {
  std::size_t points_per_axis = 2048;
  double half_extent = 20.0;
  std::size_t axes = 1;

  double spacing() const { return 2.0 * half_extent / static_cast<double>(points_per_axis); }
  double coordinate(std::size_t i) const {
    return -half_extent + (static_cast<double>(i) + 0.5) * spacing();
  }
  std::size_t total_points() const {
    return axes == 1 ? points_per_axis : points_per_axis * points_per_axis;
  }
  /// Largest momentum representable without aliasing.
  double nyquist_momentum() const;

  /// Throws DomainError unless points >= 8, L > 0 and axes in {1, 2}.
  void validate() const;

  bool operator==(const GridSpec&) const = default;

  static GridSpec desk_1d() { return {2048, 20.0, 1}; }
  static GridSpec desk_2d() { return {256, 12.0, 2}; }
};

/// Pure state sampled on a GridSpec. For two axes the layout is row-major
/// with axis 0 (mode 1) as the slow index: amplitude(i0, i1) = amps[i0*N + i1].
class WaveFunction {
 public:
  /// Normalizes `amplitudes` so that sum |a|^2 * dx^axes = 1. Throws
  /// DomainError on size mismatch, non-finite entries or zero norm.
  WaveFunction(GridSpec grid, std::vector<Complex> amplitudes,
               std::vector<double> representation = {});

  const GridSpec& grid() const { return grid_; }
  std::size_t axes() const { return grid_.axes; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex at(std::size_t i0) const { return amplitudes_[i0]; }
  Complex at(std::size_t i0, std::size_t i1) const {
    return amplitudes_[i0 * grid_.points_per_axis + i1];
  }

  /// Quadrature angle each axis is currently expressed in (0 = position).
  std::span<const double> representation() const { return representation_; }

  /// Resolution and normalization notes accumulated by transforms.
  std::span<const std::string> diagnostics() const { return diagnostics_; }

  /// sum |a|^2 * dx^axes.
  double norm_squared() const;

  /// Probability mass within `width` samples of any grid edge.
  double edge_mass(std::size_t width = 5) const;

  /// Rebuild with new amplitudes on the same grid. Drift in the norm larger
  /// than 1e-6 is renormalized and recorded as a diagnostic.
  WaveFunction with_amplitudes(std::vector<Complex> amplitudes, std::vector<double> representation,
                               std::string_view origin) const;

 private:
  WaveFunction() = default;

  GridSpec grid_;
  std::vector<Complex> amplitudes_;
  std::vector<double> representation_;
  std::vector<std::string> diagnostics_;
};

/// Nonnegative density on bins [support_min + i*spacing, support_min + (i+1)*spacing).
struct GriddedDensity {
  double support_min = 0.0;
  double spacing = 1.0;
  std::vector<double> mass;

  double center(std::size_t i) const {
    return support_min + (static_cast<double>(i) + 0.5) * spacing;
  }
  double total() const;

  /// Throws DomainError on negative/non-finite entries or total off by > 1e-6.
  void validate() const;

  /// Density of c*X for X distributed as this density. Exact on the grid:
  /// bins are stretched, masses divided by |c|.
  GriddedDensity scaled(double c) const;
};

/// Finite probabilistic mixture of pure states on a shared grid.
class PureEnsemble {
 public:
  struct Member {
    double weight;
    WaveFunction state;
  };

  /// Throws DomainError when empty, weights outside (0,1], weights not
  /// summing to 1 within 1e-9, or grids differ.
  explicit PureEnsemble(std::vector<Member> members);

  static PureEnsemble single(WaveFunction state);

  std::span<const Member> members() const { return members_; }
  const GridSpec& grid() const { return members_.front().state.grid(); }
  std::size_t axes() const { return grid().axes; }

 private:
  std::vector<Member> members_;
};

/// Per-axis Gaussian parameters. `squeeze` s sets Var(x cos t + p sin t) = s/2
/// for the quadrature at angle t = `rotation`; the conjugate quadrature gets 1/(2s).
struct GaussianMode {
  double center_x = 0.0;
  double center_p = 0.0;
  double squeeze = 1.0;
  double rotation = 0.0;
};

/// Position-representation Gaussian wave packet, a product over axes.
/// Throws DomainError for squeeze outside [1/16, 16] and ResolutionError when
/// the packet does not fit in the grid's position or momentum window.
WaveFunction make_gaussian(const GridSpec& grid, std::span<const GaussianMode> modes);
WaveFunction make_gaussian(const GridSpec& grid, const GaussianMode& mode);

/// Normalized sum of coefficient * Gaussian terms (each term a product over axes).
struct SuperpositionTerm {
  Complex coefficient;
  std::vector<GaussianMode> modes;
};
WaveFunction make_superposition(const GridSpec& grid, std::span<const SuperpositionTerm> terms);

/// Normalized sum_k c_k psi_k(x) over harmonic-oscillator eigenfunctions (1-D).
WaveFunction make_hermite_superposition(const GridSpec& grid, std::span<const Complex> coefficients);

/// Samples of the k-th harmonic-oscillator eigenfunction at `x`, k = 0..count-1.
std::vector<double> hermite_functions(double x, std::size_t count);

/// Marginal |amplitude|^2 over every axis except `axis`.
GriddedDensity position_density(const WaveFunction& state, std::size_t axis);

/// Weighted sum of member marginals.
GriddedDensity mixture_density(const PureEnsemble& ensemble, std::size_t axis);

}  // namespace cventropic
