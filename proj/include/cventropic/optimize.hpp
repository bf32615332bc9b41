#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cventropic/quadrature.hpp"
#include "cventropic/qstate.hpp"

namespace cventropic {

enum class FamilyId { gaussian, gaussian_mixture, hermite_superposition };

std::string to_string(FamilyId id);
FamilyId family_from_string(const std::string& name);

/// Parameterized search space of states.
///
///  - gaussian: per mode (center_x, center_p, ln squeeze, rotation); a product state.
///  - gaussian_mixture: `components` gaussian parameter blocks followed by
///    `components` weight logits (softmax); an incoherent mixture.
///  - hermite_superposition: `components` (re, im) coefficient pairs over the
///    first oscillator eigenstates; one mode only.
///
/// Parameters outside the documented ranges (|center| <= 4, |ln squeeze| <= ln 16,
/// |logit| <= 12, |coefficient| <= 4) are infeasible.
struct StateFamily {
  FamilyId id = FamilyId::gaussian;
  std::size_t modes = 1;
  std::size_t components = 1;
  GridSpec grid = GridSpec::desk_1d();

  std::size_t parameter_count() const;
  bool in_range(std::span<const double> params) const;

  /// Throws DomainError out of range and ResolutionError when the grid cannot hold the state.
  PureEnsemble build(std::span<const double> params) const;

  /// Feasible random starting point drawn from `rng`.
  std::vector<double> random_start(std::mt19937_64& rng) const;
  /// Initial simplex edge length per parameter.
  std::vector<double> step_sizes() const;
};

/// H(A) + H(B) for the family member at `params`; +infinity when infeasible.
double objective(std::span<const double> params, const StateFamily& family, const QuadratureOp& a,
                 const QuadratureOp& b);

struct MinimizeSettings {
  std::size_t budget = 2000;   // total objective evaluations across restarts
  std::size_t restarts = 4;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
};

struct OptResult {
  double best_value = 0.0;
  std::vector<double> best_params;
  std::size_t evaluations = 0;
  double gap_to_bound = 0.0;       // best_value - entropic_rhs(A, B)
  bool budget_exhausted = false;   // some restart stopped on budget, not convergence
  std::vector<double> restart_values;
};

/// Nelder-Mead with seeded random restarts. Deterministic for a given seed,
/// independent of `workers`. Throws DomainError if budget < 100.
OptResult minimize(const StateFamily& family, const QuadratureOp& a, const QuadratureOp& b,
                   const MinimizeSettings& settings);

/// Plain Nelder-Mead on an arbitrary function, exposed for testing.
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                          std::span<const double> steps, std::size_t budget, double tolerance = 1e-10);

/// One-mode Gaussian whose distributions of A and B saturate the entropic bound,
/// or DomainError for commuting pairs.
GaussianMode saturating_gaussian(const QuadratureOp& a, const QuadratureOp& b);

/// State attaining the bound for a 1- or 2-mode pair: reduce the pair, build the
/// reduced-frame optimum (for two modes a saturating mode-1 Gaussian times a
/// mode-2 spectator, dressed by the correlation phase e^{-i mu x1 x2 / sin t}
/// that absorbs the mu x_2 term), then carry it back to the original frame.
/// The mode-1 width is free along the saturating family and is chosen, together
/// with the spectator squeeze unless `spectator` is given, to keep the state
/// compact. Throws ResolutionError when no candidate is resolvable on the grid.
WaveFunction saturating_state(const QuadratureOp& a, const QuadratureOp& b, const GridSpec& grid,
                              const std::optional<GaussianMode>& spectator = std::nullopt);

}  // namespace cventropic
