#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "cventropic/quadrature.hpp"
#include "cventropic/qstate.hpp"

namespace cventropic {

enum class RelationId { entropic, robertson, xp_product, covariance_psd, entropy_variance_chain };

std::string to_string(RelationId id);

namespace tolerance {
inline constexpr double entropic = 5e-3;
inline constexpr double variance = 1e-4;
inline constexpr double psd = 1e-8;
}  // namespace tolerance

/// Outcome of one uncertainty-relation check. pass <=> margin >= -tolerance.
struct BoundReport {
  RelationId relation = RelationId::entropic;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, std::string> diagnostics;

  void note(const std::string& key, double value);
  void note(const std::string& key, std::string value) { diagnostics[key] = std::move(value); }
  bool degenerate() const { return diagnostics.count("degenerate") > 0; }
};

/// 2n x 2n covariance matrix in the (x_1, p_1, ..., x_n, p_n) ordering; the
/// diagonal holds twice the quadrature variances.
class CovarianceMatrix {
 public:
  /// Throws DomainError unless square, even-sized, symmetric within 1e-10 and
  /// with a positive diagonal.
  explicit CovarianceMatrix(Eigen::MatrixXd gamma);

  std::size_t modes() const { return static_cast<std::size_t>(gamma_.rows()) / 2; }
  const Eigen::MatrixXd& matrix() const { return gamma_; }

 private:
  Eigen::MatrixXd gamma_;
};

/// 1 + ln(pi) + ln|[A, B]|, or -infinity for commuting pairs.
double entropic_rhs(const QuadratureOp& a, const QuadratureOp& b);

BoundReport check_entropic(const WaveFunction& state, const QuadratureOp& a, const QuadratureOp& b);
BoundReport check_entropic(const PureEnsemble& state, const QuadratureOp& a, const QuadratureOp& b);

/// Uses symmetrized second moments from variances of (R_j + R_k)/sqrt(2).
CovarianceMatrix covariance_of(const WaveFunction& state);
CovarianceMatrix covariance_of(const PureEnsemble& state);

/// Smallest eigenvalue of gamma + i Omega against 0.
BoundReport check_covariance_psd(const CovarianceMatrix& gamma);

/// Var(A) Var(B) >= |[A, B]|^2 / 4.
BoundReport check_robertson(const WaveFunction& state, const QuadratureOp& a, const QuadratureOp& b);
BoundReport check_robertson(const PureEnsemble& state, const QuadratureOp& a, const QuadratureOp& b);

/// Var(x_1) Var(p_1) >= 1/4 on a single-mode subject.
BoundReport check_xp_product(const PureEnsemble& state);

/// Every link of Var(A) + Var(B) >= 2 sqrt(Var(A) Var(B)) >= 2 sqrt(floor_A floor_B) >= |[A, B]|
/// together with Var >= floor(H) per operator. lhs/rhs report the end points.
BoundReport check_chain(const WaveFunction& state, const QuadratureOp& a, const QuadratureOp& b);
BoundReport check_chain(const PureEnsemble& state, const QuadratureOp& a, const QuadratureOp& b);

}  // namespace cventropic
