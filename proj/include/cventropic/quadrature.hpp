#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cventropic/qstate.hpp"

namespace cventropic {

/// A = sum_i (a_i x_i + a'_i p_i), stored interleaved as (a_1, a'_1, ..., a_n, a'_n).
class QuadratureOp {
 public:
  explicit QuadratureOp(std::vector<double> coeffs);

  static QuadratureOp position(std::size_t mode, std::size_t n = 1);
  static QuadratureOp momentum(std::size_t mode, std::size_t n = 1);

  std::size_t modes() const { return coeffs_.size() / 2; }
  std::span<const double> coeffs() const { return coeffs_; }
  double x(std::size_t mode) const { return coeffs_[2 * mode]; }
  double p(std::size_t mode) const { return coeffs_[2 * mode + 1]; }
  bool is_zero() const;

  Eigen::VectorXd vector() const;
  std::string to_string() const;

  bool operator==(const QuadratureOp&) const = default;

 private:
  std::vector<double> coeffs_;
};

QuadratureOp operator*(double c, const QuadratureOp& a);
QuadratureOp operator+(const QuadratureOp& a, const QuadratureOp& b);

/// Block-diagonal 2n x 2n form with blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(std::size_t n);

/// The real c with [A, B] = i c; equals sum_i (a_i b'_i - a'_i b_i) = d_A^T Omega d_B.
double commutator_value(const QuadratureOp& a, const QuadratureOp& b);

/// Per-mode row action (a_i a'_i) -> (a_i a'_i) R(theta_i), R(t) = [[cos t, -sin t], [sin t, cos t]].
/// Matched on states by frft_apply(state, i, theta_i):
/// distribution_of(F(theta) psi, local_rotate(A, theta)) == distribution_of(psi, A).
QuadratureOp local_rotate(const QuadratureOp& a, std::span<const double> angles);

/// x-part and p-part each mapped a -> R a. Matched on states by rotate_state
/// with the same R. Throws DomainError when R is not orthogonal within 1e-10.
QuadratureOp global_rotate(const QuadratureOp& a, const Eigen::MatrixXd& rotation);

/// 2x2 rotation matrix R(theta).
Eigen::Matrix2d rotation_matrix(double theta);

/// Outcome of the reduction chain that brings (A, B) to the canonical pair
///   A_c = c_A (x_1 cos t + p_1 sin t + mu x_2),   B_c = c_B x_1.
struct PairReduction {
  std::size_t modes = 1;
  std::vector<double> first_angles;  // local rotation clearing B's p-coefficients
  Eigen::MatrixXd rotation;          // global rotation aligning B with x_1
  std::vector<double> last_angles;   // local rotation clearing A's p on modes > 1
  double theta = 0.0;
  double scale_a = 0.0;
  double scale_b = 0.0;
  double mu = 0.0;
  bool degenerate = false;  // A has no mode-1 part after alignment: [A, B] = 0
  QuadratureOp reduced_a{std::vector<double>{0.0, 0.0}};
  QuadratureOp reduced_b{std::vector<double>{0.0, 0.0}};

  /// Canonical operators rebuilt from (theta, scale_a, scale_b, mu).
  QuadratureOp canonical_a() const;
  QuadratureOp canonical_b() const;

  /// Undo the three steps on a pair of operators in the reduced frame.
  std::pair<QuadratureOp, QuadratureOp> recover(const QuadratureOp& a, const QuadratureOp& b) const;

  /// Carry a state expressed in the reduced frame back to the original frame,
  /// so that distributions of (A, B) there equal those of (A_c, B_c) here.
  WaveFunction recover_state(const WaveFunction& reduced) const;
};

/// Throws DomainError for mismatched modes, n > 2, or a zero B.
PairReduction reduce_pair(const QuadratureOp& a, const QuadratureOp& b);

/// Active rotation of a 2-mode state: result(x) = state(R(angle)^T x), computed
/// by exact quarter turns plus a band-limited three-shear residual. Throws
/// ResolutionError when more than 1e-8 of probability lies where a rotation
/// could carry it off the grid.
WaveFunction rotate_state(const WaveFunction& state, double angle);

/// Measurement distribution of A in `state`, as a density on the real line.
/// Modes with (a_i, a'_i) = c_i (cos t_i, sin t_i) are brought into the t_i
/// representation with frft_apply; in two modes the joint density is then
/// projected on u = c/|c| by rotating the state so u lies on x_1 and
/// marginalizing. The support is finally stretched by |c|.
GriddedDensity distribution_of(const WaveFunction& state, const QuadratureOp& a);

/// Weighted mixture of member distributions.
GriddedDensity distribution_of(const PureEnsemble& ensemble, const QuadratureOp& a);

}  // namespace cventropic
