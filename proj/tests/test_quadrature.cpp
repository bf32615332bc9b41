#include <cmath>

#include "cventropic/entropy.hpp"
#include "cventropic/errors.hpp"
#include "cventropic/frft.hpp"
#include "cventropic/quadrature.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cventropic;

namespace {

double l1(const GriddedDensity& a, const GriddedDensity& b) {
  REQUIRE(a.mass.size() == b.mass.size());
  REQUIRE(a.spacing == doctest::Approx(b.spacing));
  REQUIRE(a.support_min == doctest::Approx(b.support_min));
  double s = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return s * a.spacing;
}

double quadratic_form(const QuadratureOp& a, const std::vector<Eigen::Matrix2d>& covs) {
  double v = 0.0;
  for (std::size_t i = 0; i < covs.size(); ++i) {
    const Eigen::Vector2d r(a.x(i), a.p(i));
    v += r.dot(covs[i] * r);
  }
  return v;
}

double mean_of(const GriddedDensity& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.mass.size(); ++i) m += d.center(i) * d.mass[i] * d.spacing;
  return m;
}

}  // namespace

TEST_CASE("commutator values") {
  const QuadratureOp x = QuadratureOp::position(0), p = QuadratureOp::momentum(0);
  CHECK(commutator_value(x, p) == 1.0);
  CHECK(commutator_value(p, x) == -1.0);
  CHECK(commutator_value(QuadratureOp({2, 1}), QuadratureOp({1, -1})) == -3.0);
  const QuadratureOp a({1, 2, 3, 4}), b({-1, 0.5, 2, 1});
  // sum_i (a_i b'_i - a'_i b_i)
  CHECK(commutator_value(a, b) == doctest::Approx(1 * 0.5 - 2 * -1 + 3 * 1 - 4 * 2));
  CHECK(commutator_value(a, b) == doctest::Approx(a.vector().dot(symplectic_form(2) * b.vector())));
  CHECK_THROWS_AS(commutator_value(x, QuadratureOp::momentum(0, 2)), DomainError);
  CHECK_THROWS_AS(QuadratureOp({1, 2, 3}), DomainError);
}

TEST_CASE("operator algebra") {
  const QuadratureOp a({1, 2}), b({0.5, -1});
  CHECK((2.0 * a) == QuadratureOp({2, 4}));
  CHECK((a + b) == QuadratureOp({1.5, 1}));
  CHECK(QuadratureOp({0, 0}).is_zero());
  CHECK(QuadratureOp::momentum(1, 2) == QuadratureOp({0, 0, 0, 1}));
  CHECK_FALSE(a.to_string().empty());
}

TEST_CASE("local rotation is the row action (a, a') R(theta)") {
  const double t = 0.4;
  const auto r = local_rotate(QuadratureOp({2.0, -1.0}), std::vector<double>{t});
  CHECK(r.x(0) == doctest::Approx(2.0 * std::cos(t) - std::sin(t)));
  CHECK(r.p(0) == doctest::Approx(-2.0 * std::sin(t) - std::cos(t)));
}

TEST_CASE("rotations preserve commutators (property)") {
  oracle::Gen gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const QuadratureOp a(gen.coeffs(2)), b(gen.coeffs(2));
    const std::vector<double> angles{gen.angle(), gen.angle()};
    CHECK(commutator_value(local_rotate(a, angles), local_rotate(b, angles)) ==
          doctest::Approx(commutator_value(a, b)).epsilon(1e-12));
    const Eigen::MatrixXd r = rotation_matrix(gen.angle());
    CHECK(commutator_value(global_rotate(a, r), global_rotate(b, r)) ==
          doctest::Approx(commutator_value(a, b)).epsilon(1e-12));
  }
  Eigen::MatrixXd skew(2, 2);
  skew << 1, 0.1, 0, 1;
  CHECK_THROWS_AS(global_rotate(QuadratureOp({1, 0, 0, 1}), skew), DomainError);
}

TEST_CASE("reduction chain reaches the canonical pair and inverts") {
  oracle::Gen gen(4);
  for (std::size_t n : {1u, 2u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const QuadratureOp a(gen.coeffs(n)), b(gen.coeffs(n));
      const auto red = reduce_pair(a, b);
      if (red.degenerate) continue;
      const auto ca = red.canonical_a(), cb = red.canonical_b();
      CHECK((red.reduced_a.vector() - ca.vector()).norm() < 1e-12);
      CHECK((red.reduced_b.vector() - cb.vector()).norm() < 1e-12);
      const auto [ra, rb] = red.recover(ca, cb);
      CHECK((ra.vector() - a.vector()).norm() < 1e-12);
      CHECK((rb.vector() - b.vector()).norm() < 1e-12);
      CHECK(std::abs(commutator_value(a, b)) ==
            doctest::Approx(std::abs(red.scale_a * red.scale_b * std::sin(red.theta))).epsilon(1e-12));
      if (n == 1) CHECK(red.mu == 0.0);
    }
  }
  CHECK(reduce_pair(QuadratureOp({1, 0, 0, 0}), QuadratureOp({0, 0, 1, 0})).degenerate);
  CHECK_THROWS_AS(reduce_pair(QuadratureOp({1, 0}), QuadratureOp({0, 0})), DomainError);
  CHECK_THROWS_AS(reduce_pair(QuadratureOp(std::vector<double>(6, 1.0)), QuadratureOp(std::vector<double>(6, 1.0))),
                  DomainError);
}

TEST_CASE("one-mode distributions are Gaussian with the analytic variance") {
  const auto g = GridSpec::desk_1d();
  oracle::Gen gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mode = gen.mode(1.5, 1.0);
    const auto psi = make_gaussian(g, mode);
    const QuadratureOp a(gen.coeffs(1));
    const double v = quadratic_form(a, {oracle::mode_covariance(mode.squeeze, mode.rotation)});
    const auto d = distribution_of(psi, a);
    CHECK(variance(d).value == doctest::Approx(v).epsilon(1e-8));
    CHECK(mean_of(d) == doctest::Approx(a.x(0) * mode.center_x + a.p(0) * mode.center_p).epsilon(1e-8));
    CHECK(differential_entropy(d).value == doctest::Approx(oracle::gaussian_entropy(v)).epsilon(1e-6));
  }
}

TEST_CASE("two-mode distributions match analytic Gaussian moments") {
  const auto g = GridSpec::desk_2d();
  oracle::Gen gen(10);
  for (int trial = 0; trial < 8; ++trial) {
    const auto m1 = gen.mode(), m2 = gen.mode();
    const auto psi = make_gaussian(g, std::vector<GaussianMode>{m1, m2});
    const QuadratureOp a(gen.coeffs(2));
    const double v = quadratic_form(a, {oracle::mode_covariance(m1.squeeze, m1.rotation),
                                        oracle::mode_covariance(m2.squeeze, m2.rotation)});
    const auto d = distribution_of(psi, a);
    CHECK(variance(d).value == doctest::Approx(v).epsilon(1e-8));
    CHECK(differential_entropy(d).value == doctest::Approx(oracle::gaussian_entropy(v)).epsilon(1e-6));
  }
}

TEST_CASE("two-mode projection agrees with a linear-interpolation Radon projection") {
  const auto g = GridSpec::desk_2d();
  const auto psi = make_gaussian(g, std::vector<GaussianMode>{{0.5, 0.0, 2.0, 0.3}, {-0.4, 0.0, 0.7, -0.5}});
  const auto joint = psi.amplitudes();
  std::vector<double> density(joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) density[i] = std::norm(joint[i]);
  for (double phi : {0.3, 1.1, 2.5}) {
    const auto radon = oracle::radon_linear(g, density, phi);
    const auto d = distribution_of(psi, QuadratureOp({std::cos(phi), 0.0, std::sin(phi), 0.0}));
    REQUIRE(d.mass.size() == radon.size());
    REQUIRE(d.support_min == doctest::Approx(-g.half_extent));
    double err = 0.0;
    for (std::size_t k = 0; k < radon.size(); ++k) err += std::abs(d.mass[k] - radon[k]) * d.spacing;
    CHECK(err < 5e-3);
  }
}

TEST_CASE("local FrFT invariance: distributions survive a matched rotation") {
  const auto g = GridSpec::desk_1d();
  oracle::Gen gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = make_gaussian(g, gen.mode(1.5, 1.0));
    const QuadratureOp a(gen.coeffs(1));
    const double t = gen.angle();
    CHECK(l1(distribution_of(frft_apply(psi, 0, t), local_rotate(a, std::vector<double>{t})), distribution_of(psi, a)) <
          1e-4);
  }
  const auto g2 = GridSpec::desk_2d();
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = make_gaussian(g2, std::vector<GaussianMode>{gen.mode(), gen.mode()});
    const QuadratureOp a(gen.coeffs(2));
    const std::vector<double> t{gen.angle(), gen.angle()};
    const auto moved = frft_apply(frft_apply(psi, 0, t[0]), 1, t[1]);
    CHECK(l1(distribution_of(moved, local_rotate(a, t)), distribution_of(psi, a)) < 1e-4);
  }
}

TEST_CASE("global rotation invariance") {
  const auto g = GridSpec::desk_2d();
  oracle::Gen gen(32);
  for (int trial = 0; trial < 8; ++trial) {
    const auto psi = make_gaussian(g, std::vector<GaussianMode>{gen.mode(), gen.mode()});
    const QuadratureOp a(gen.coeffs(2));
    const double alpha = gen.angle();
    const auto moved = rotate_state(psi, alpha);
    CHECK(l1(distribution_of(moved, global_rotate(a, rotation_matrix(alpha))), distribution_of(psi, a)) < 1e-3);
  }
}

TEST_CASE("rotate_state: quarter turns are exact and off-grid mass is refused") {
  const auto g = GridSpec::desk_2d();
  const auto psi = make_gaussian(g, std::vector<GaussianMode>{{1.0, 0.2, 1.5, 0.0}, {-0.5, 0.0, 1.0, 0.0}});
  const auto quarter = rotate_state(psi, oracle::pi / 2);
  const std::size_t n = g.points_per_axis;
  // result(x) = psi(R^T x): R(pi/2)^T (x1, x2) = (x2, -x1)
  for (std::size_t i = 0; i < n; i += 13)
    for (std::size_t j = 0; j < n; j += 11) CHECK(std::abs(quarter.at(i, j) - psi.at(j, n - 1 - i)) < 1e-14);
  const auto far = make_gaussian(g, std::vector<GaussianMode>{{9.5, 0, 0.25, 0}, {0, 0, 1, 0}});
  CHECK_THROWS_AS(rotate_state(far, 0.3), ResolutionError);
  CHECK_THROWS_AS(rotate_state(make_gaussian(GridSpec::desk_1d(), GaussianMode{}), 0.3), DomainError);
}

TEST_CASE("recovered states reproduce the canonical distributions") {
  const auto g = GridSpec::desk_2d();
  const QuadratureOp a({0.8, 0.3, -0.4, 0.5}), b({0.2, -0.6, 0.7, 0.1});
  const auto red = reduce_pair(a, b);
  REQUIRE_FALSE(red.degenerate);
  const auto reduced = make_gaussian(g, std::vector<GaussianMode>{{0.3, -0.2, 1.3, 0.4}, {0.1, 0.2, 0.8, -0.3}});
  const auto original = red.recover_state(reduced);
  CHECK(l1(distribution_of(original, a), distribution_of(reduced, red.canonical_a())) < 1e-3);
  CHECK(l1(distribution_of(original, b), distribution_of(reduced, red.canonical_b())) < 1e-3);
}

TEST_CASE("a position shear becomes a phase after the transform") {
  // Phi(w, x2) e^{-i a w x2 / sin t} = F_1(t)[ e^{i(-2a x1 x2 + a^2 x2^2)/(2 tan t)} Psi(x1 - a x2, x2) ]
  const auto g = GridSpec::desk_2d();
  const std::size_t n = g.points_per_axis;
  const double t = 0.8, a = 0.6;
  auto psi_fn = [](double x1, double x2) {
    return std::exp(Complex(-0.5 * x1 * x1 / 1.3, 0.4 * x1)) * std::exp(Complex(-0.5 * x2 * x2 / 0.7, -0.3 * x2));
  };
  std::vector<Complex> base(n * n), sheared(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = g.coordinate(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double x2 = g.coordinate(j);
      base[i * n + j] = psi_fn(x1, x2);
      sheared[i * n + j] = std::polar(1.0, (-2.0 * a * x1 * x2 + a * a * x2 * x2) / (2.0 * std::tan(t))) *
                           psi_fn(x1 - a * x2, x2);
    }
  }
  const auto lhs_state = frft_apply(WaveFunction(g, base), 0, t);
  const auto rhs_state = frft_apply(WaveFunction(g, sheared), 0, t);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = g.coordinate(i);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex lhs = lhs_state.at(i, j) * std::polar(1.0, -a * w * g.coordinate(j) / std::sin(t));
      err += std::norm(lhs - rhs_state.at(i, j));
    }
  }
  CHECK(std::sqrt(err) * g.spacing() < 1e-8);
}

TEST_CASE("distribution_of preconditions") {
  const auto psi = make_gaussian(GridSpec::desk_1d(), GaussianMode{});
  CHECK_THROWS_AS(distribution_of(psi, QuadratureOp({0.0, 0.0})), DomainError);
  CHECK_THROWS_AS(distribution_of(psi, QuadratureOp({1.0, 0.0, 0.0, 1.0})), DomainError);
}
