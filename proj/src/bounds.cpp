#include "cventropic/bounds.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "cventropic/entropy.hpp"
#include "cventropic/errors.hpp"

namespace cventropic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

BoundReport finish(BoundReport r) {
  r.margin = r.lhs - r.rhs;
  r.pass = r.margin >= -r.tolerance;
  r.note("tolerance", r.tolerance);
  return r;
}

template <typename State>
BoundReport entropic_impl(const State& state, const QuadratureOp& a, const QuadratureOp& b) {
  BoundReport r;
  r.relation = RelationId::entropic;
  r.tolerance = tolerance::entropic;
  const auto ha = differential_entropy(distribution_of(state, a));
  const auto hb = differential_entropy(distribution_of(state, b));
  r.lhs = ha.value + hb.value;
  r.rhs = entropic_rhs(a, b);
  r.note("H_A", ha.value);
  r.note("H_B", hb.value);
  r.note("edge_mass_A", ha.bias_diagnostic);
  r.note("edge_mass_B", hb.bias_diagnostic);
  r.note("commutator", commutator_value(a, b));
  if (ha.biased() || hb.biased()) r.note("truncation_bias", "edge mass above 1e-6");
  if (r.rhs == kNegInf) {
    r.note("degenerate", "commuting pair: bound unbounded below");
    r.margin = std::numeric_limits<double>::infinity();
    r.pass = true;
    r.note("tolerance", r.tolerance);
    return r;
  }
  return finish(std::move(r));
}

template <typename State>
CovarianceMatrix covariance_impl(const State& state) {
  const std::size_t n = state.axes();
  const std::size_t dim = 2 * n;
  auto unit = [&](std::size_t k) {
    std::vector<double> c(dim, 0.0);
    c[k] = 1.0;
    return QuadratureOp(std::move(c));
  };
  std::vector<double> var(dim);
  for (std::size_t k = 0; k < dim; ++k) var[k] = variance(distribution_of(state, unit(k))).value;
  Eigen::MatrixXd gamma(dim, dim);
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < dim; ++j) {
    gamma(j, j) = 2.0 * var[j];
    for (std::size_t k = j + 1; k < dim; ++k) {
      std::vector<double> c(dim, 0.0);
      c[j] = h;
      c[k] = h;
      const double mixed = variance(distribution_of(state, QuadratureOp(std::move(c)))).value;
      const double cov = mixed - 0.5 * (var[j] + var[k]);
      gamma(j, k) = gamma(k, j) = 2.0 * cov;
    }
  }
  return CovarianceMatrix(std::move(gamma));
}

template <typename State>
BoundReport robertson_impl(const State& state, const QuadratureOp& a, const QuadratureOp& b) {
  BoundReport r;
  r.relation = RelationId::robertson;
  r.tolerance = tolerance::variance;
  const double va = variance(distribution_of(state, a)).value;
  const double vb = variance(distribution_of(state, b)).value;
  const double c = commutator_value(a, b);
  r.lhs = va * vb;
  r.rhs = 0.25 * c * c;
  r.note("var_A", va);
  r.note("var_B", vb);
  r.note("commutator", c);
  if (c == 0.0) r.note("degenerate", "commuting pair");
  return finish(std::move(r));
}

template <typename State>
BoundReport chain_impl(const State& state, const QuadratureOp& a, const QuadratureOp& b) {
  BoundReport r;
  r.relation = RelationId::entropy_variance_chain;
  r.tolerance = tolerance::variance;
  const auto da = distribution_of(state, a);
  const auto db = distribution_of(state, b);
  const double va = variance(da).value, vb = variance(db).value;
  const auto ha = differential_entropy(da), hb = differential_entropy(db);
  const double fa = entropy_variance_floor(ha), fb = entropy_variance_floor(hb);
  const double c = std::abs(commutator_value(a, b));
  const double geo = 2.0 * std::sqrt(va * vb);
  const double floor_geo = 2.0 * std::sqrt(fa * fb);

  r.note("var_A", va);
  r.note("var_B", vb);
  r.note("H_A", ha.value);
  r.note("H_B", hb.value);
  r.note("floor_A", fa);
  r.note("floor_B", fb);
  r.note("two_sqrt_var_product", geo);
  r.note("two_sqrt_floor_product", floor_geo);
  r.note("commutator_abs", c);

  bool ok = true;
  auto link = [&](const std::string& name, double lhs, double rhs, double tol) {
    const double m = lhs - rhs;
    r.note("link_" + name, m);
    if (m < -tol) {
      ok = false;
      r.note("failed_" + name, "margin below -" + format_number(tol));
    }
  };
  link("floor_A", va, fa, tolerance::variance);
  link("floor_B", vb, fb, tolerance::variance);
  link("am_gm", va + vb, geo, tolerance::variance);
  link("var_product", geo, floor_geo, tolerance::variance);
  // The entropic relation in exponential form: 2 sqrt(floor_A floor_B) = |c| e^{margin}.
  link("floor_product", floor_geo, c, std::expm1(tolerance::entropic) * c);
  link("commutator", geo, c, tolerance::variance);
  if (c == 0.0) r.note("degenerate", "commuting pair");

  r.lhs = va + vb;
  r.rhs = c;
  r = finish(std::move(r));
  r.pass = r.pass && ok;
  return r;
}

}  // namespace

std::string to_string(RelationId id) {
  switch (id) {
    case RelationId::entropic:
      return "entropic";
    case RelationId::robertson:
      return "robertson";
    case RelationId::xp_product:
      return "xp_product";
    case RelationId::covariance_psd:
      return "covariance_psd";
    case RelationId::entropy_variance_chain:
      return "entropy_variance_chain";
  }
  return "unknown";
}

void BoundReport::note(const std::string& key, double value) { diagnostics[key] = format_number(value); }

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd gamma) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() == 0 || gamma_.rows() % 2 != 0) {
    throw DomainError("covariance matrix must be square with even dimension");
  }
  if (!gamma_.allFinite()) throw DomainError("covariance matrix has non-finite entries");
  if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError("covariance matrix is not symmetric");
  if (!(gamma_.diagonal().minCoeff() > 0.0)) throw DomainError("covariance diagonal must be positive");
}

double entropic_rhs(const QuadratureOp& a, const QuadratureOp& b) {
  const double c = commutator_value(a, b);
  if (c == 0.0) return kNegInf;
  return 1.0 + std::log(std::numbers::pi) + std::log(std::abs(c));
}

BoundReport check_entropic(const WaveFunction& s, const QuadratureOp& a, const QuadratureOp& b) {
  return entropic_impl(s, a, b);
}
BoundReport check_entropic(const PureEnsemble& s, const QuadratureOp& a, const QuadratureOp& b) {
  return entropic_impl(s, a, b);
}

CovarianceMatrix covariance_of(const WaveFunction& s) { return covariance_impl(s); }
CovarianceMatrix covariance_of(const PureEnsemble& s) { return covariance_impl(s); }

BoundReport check_covariance_psd(const CovarianceMatrix& gamma) {
  const std::size_t n = gamma.modes();
  const Eigen::MatrixXcd m =
      gamma.matrix().cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DomainError("eigen-solver failed on gamma + i Omega");
  BoundReport r;
  r.relation = RelationId::covariance_psd;
  r.tolerance = tolerance::psd;
  r.lhs = solver.eigenvalues().minCoeff();
  r.rhs = 0.0;
  r.note("max_eigenvalue", solver.eigenvalues().maxCoeff());
  return finish(std::move(r));
}

BoundReport check_robertson(const WaveFunction& s, const QuadratureOp& a, const QuadratureOp& b) {
  return robertson_impl(s, a, b);
}
BoundReport check_robertson(const PureEnsemble& s, const QuadratureOp& a, const QuadratureOp& b) {
  return robertson_impl(s, a, b);
}

BoundReport check_xp_product(const PureEnsemble& state) {
  const std::size_t n = state.axes();
  auto r = robertson_impl(state, QuadratureOp::position(0, n), QuadratureOp::momentum(0, n));
  r.relation = RelationId::xp_product;
  return r;
}

BoundReport check_chain(const WaveFunction& s, const QuadratureOp& a, const QuadratureOp& b) {
  return chain_impl(s, a, b);
}
BoundReport check_chain(const PureEnsemble& s, const QuadratureOp& a, const QuadratureOp& b) {
  return chain_impl(s, a, b);
}

}  // namespace cventropic
