#include <cmath>

#include "cventropic/bounds.hpp"
#include "cventropic/conjecture.hpp"
#include "cventropic/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cventropic;

TEST_CASE("observable descriptors parse") {
  const auto g = GridSpec::desk_1d();
  const auto x2 = DiagonalObservable::parse("x^2", g);
  CHECK(x2.basis == Basis::position);
  CHECK(x2.values[100] == doctest::Approx(g.coordinate(100) * g.coordinate(100)));
  const auto p = DiagonalObservable::parse("-0.5*p^2-3", g);
  CHECK(p.basis == Basis::momentum);
  CHECK(p.values[7] == doctest::Approx(-0.5 * g.coordinate(7) * g.coordinate(7) - 3));
  const auto lin = DiagonalObservable::parse("2*x+1", g);
  CHECK(lin.values[0] == doctest::Approx(2 * g.coordinate(0) + 1));
  for (const char* bad : {"", "y", "x^", "x^-1", "2**x", "x+p", "sin(x)"})
    CHECK_THROWS_AS(DiagonalObservable::parse(bad, g), DomainError);
}

TEST_CASE("affine observables reproduce the quadrature pipeline") {
  const auto g = GridSpec::desk_1d();
  const auto psi = make_gaussian(g, GaussianMode{0.3, -0.2, 2.5, 0.0});
  const auto rec = probe(psi, DiagonalObservable::parse("x", g), DiagonalObservable::parse("p", g), "squeezed");
  const auto ref = check_entropic(psi, QuadratureOp::position(0), QuadratureOp::momentum(0));
  CHECK(rec.error.empty());
  CHECK(rec.commutator_expectation == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rec.rhs == doctest::Approx(oracle::kOnePlusLnPi).epsilon(1e-6));
  CHECK(std::abs(rec.margin - ref.margin) < 2e-2);
  CHECK(rec.state_descriptor == "squeezed");
}

TEST_CASE("commutator expectation of x^2 and p") {
  // [x^2, p] = 2 i x, so |<[x^2, p]>| = 2 |<x>|
  const auto g = GridSpec::desk_1d();
  for (double x0 : {1.0, -0.6}) {
    const auto psi = make_gaussian(g, GaussianMode{x0, 0.4, 1.3, 0.2});
    const auto c = commutator_expectation(psi, DiagonalObservable::parse("x^2", g), DiagonalObservable::parse("p", g));
    CHECK(c.magnitude == doctest::Approx(2.0 * std::abs(x0)).epsilon(1e-4));
    CHECK(std::abs(c.real_part) < 1e-8);
  }
}

TEST_CASE("entropy of x^2 under the vacuum is bounded above by the histogram") {
  const auto g = GridSpec::desk_1d();
  const auto vac = make_gaussian(g, GaussianMode{});
  const auto h = observable_entropy(vac, DiagonalObservable::parse("x^2", g));
  // the chi-square density is singular at 0, so binning can only overestimate
  CHECK(h.estimate.value >= oracle::kChiSquareVacuum - 1e-3);
  CHECK(h.low_confidence);
  CHECK(h.bins >= 64);
}

TEST_CASE("linear observable entropy matches the Gaussian value") {
  const auto g = GridSpec::desk_1d();
  const auto h = observable_entropy(make_gaussian(g, GaussianMode{}), DiagonalObservable::parse("3*x", g));
  CHECK(h.estimate.value == doctest::Approx(oracle::gaussian_entropy(4.5)).epsilon(5e-3));
  CHECK_FALSE(h.constant);
}

TEST_CASE("constant observables and vanishing commutators") {
  const auto g = GridSpec::desk_1d();
  const auto vac = make_gaussian(g, GaussianMode{});
  const auto one = DiagonalObservable::from_function(Basis::position, g, [](double) { return 1.0; }, "1");
  const auto h = observable_entropy(vac, one);
  CHECK(h.constant);
  CHECK(std::isinf(h.estimate.value));
  const auto rec = probe(vac, one, DiagonalObservable::parse("p", g), "vacuum");
  CHECK(rec.trivially_satisfied);
  CHECK(std::isinf(rec.rhs));
  // <[x^2, p]> = 2i<x> = 0 on the centred vacuum
  const auto even = probe(vac, DiagonalObservable::parse("x^2", g), DiagonalObservable::parse("p", g));
  CHECK(even.trivially_satisfied);
}

TEST_CASE("numerical trouble is recorded, not thrown") {
  const GridSpec coarse{32, 20.0, 1};
  std::vector<Complex> spike(32, 0.0);
  spike[16] = 1.0;
  spike[17] = Complex(0.0, 1.0);
  const WaveFunction psi(coarse, spike);
  ProbeRecord rec;
  CHECK_NOTHROW(rec = probe(psi, DiagonalObservable::parse("x^3", coarse), DiagonalObservable::parse("p^2", coarse)));
  if (!rec.error.empty()) CHECK(std::isnan(rec.margin));
}

TEST_CASE("records rank by margin with errors last") {
  std::vector<ProbeRecord> recs(4);
  recs[0].margin = 0.5;
  recs[0].state_descriptor = "a";
  recs[1].margin = std::nan("");
  recs[1].state_descriptor = "b";
  recs[2].margin = -0.1;
  recs[2].state_descriptor = "c";
  recs[3].margin = 0.5;
  recs[3].state_descriptor = "d";
  const auto ranked = rank_records(recs);
  CHECK(ranked[0].state_descriptor == "c");
  CHECK(ranked[1].state_descriptor == "a");
  CHECK(ranked[2].state_descriptor == "d");
  CHECK(ranked[3].state_descriptor == "b");
}
