#include <cmath>

#include "cventropic/errors.hpp"
#include "cventropic/frft.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cventropic;

namespace {

double l2(std::span<const Complex> a, std::span<const Complex> b, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * dx);
}

Complex overlap(std::span<const Complex> a, std::span<const Complex> b, double dx) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * dx;
}

}  // namespace

TEST_CASE("reduce_angle maps into (-pi, pi]") {
  CHECK(reduce_angle(0.0) == 0.0);
  CHECK(reduce_angle(oracle::pi) == doctest::Approx(oracle::pi));
  CHECK(reduce_angle(-oracle::pi) == doctest::Approx(oracle::pi));
  CHECK(reduce_angle(3 * oracle::pi / 2) == doctest::Approx(-oracle::pi / 2));
  CHECK(reduce_angle(7.0) == doctest::Approx(7.0 - 2 * oracle::pi));
}

TEST_CASE("special angles: identity and parity") {
  const auto g = GridSpec::desk_1d();
  const auto psi = make_gaussian(g, GaussianMode{1.2, -0.4, 1.7, 0.3});
  const auto id = frft_apply(psi, 0, 2 * oracle::pi);
  CHECK(l2(id.amplitudes(), psi.amplitudes(), g.spacing()) < 1e-13);
  const auto par = frft_apply(psi, 0, oracle::pi);
  for (std::size_t i = 0; i < g.points_per_axis; i += 61) CHECK(std::abs(par.at(i) - psi.at(g.points_per_axis - 1 - i)) < 1e-14);
  CHECK(par.representation()[0] == doctest::Approx(oracle::pi));
}

TEST_CASE("oscillator eigenstates pick up exp(-i n theta)") {
  const auto g = GridSpec::desk_1d();
  oracle::Gen gen(3);
  for (std::size_t n = 0; n < 5; ++n) {
    std::vector<Complex> c(n + 1, 0.0);
    c[n] = 1.0;
    const auto psi = make_hermite_superposition(g, c);
    for (int k = 0; k < 4; ++k) {
      const double t = gen.angle();
      const auto out = frft_apply(psi, 0, t);
      const Complex ov = overlap(psi.amplitudes(), out.amplitudes(), g.spacing());
      CHECK(std::abs(ov - std::polar(1.0, -static_cast<double>(n) * t)) < 1e-10);
    }
  }
}

TEST_CASE("agrees with direct quadrature of the continuous kernel") {
  const GridSpec g{512, 12.0, 1};
  const auto psi = make_gaussian(g, GaussianMode{0.8, 0.5, 1.6, 0.4});
  std::vector<Complex> f(psi.amplitudes().begin(), psi.amplitudes().end());
  for (double t : {oracle::pi / 3, -0.7, 2.4}) {
    const auto direct = oracle::direct_frft(g, f, t);
    const auto fast = frft_apply(psi, 0, t);
    CHECK(l2(direct, fast.amplitudes(), g.spacing()) < 1e-8);
  }
}

TEST_CASE("additivity over random angle pairs") {
  const auto g = GridSpec::desk_1d();
  oracle::Gen gen(5);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double t1 = gen.angle(), t2 = gen.angle();
    const auto psi = make_gaussian(g, gen.mode());
    const auto two = frft_apply(frft_apply(psi, 0, t1), 0, t2);
    const auto one = frft_apply(psi, 0, t1 + t2);
    worst = std::max(worst, l2(two.amplitudes(), one.amplitudes(), g.spacing()));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("unitarity: the chirp chain preserves the norm without renormalization") {
  const auto g = GridSpec::desk_1d();
  oracle::Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = make_gaussian(g, gen.mode());
    std::vector<Complex> line(psi.amplitudes().begin(), psi.amplitudes().end());
    FrftPlan::cached(g, gen.angle())->apply_line(line);
    double norm = 0.0;
    for (const auto& a : line) norm += std::norm(a);
    CHECK(std::abs(norm * g.spacing() - 1.0) < 1e-6);
  }
}

TEST_CASE("quarter turn matches the independent Fourier route") {
  const auto g = GridSpec::desk_1d();
  oracle::Gen gen(13);
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = make_gaussian(g, gen.mode(2.0, 1.0));
    CHECK(l2(frft_apply(psi, 0, oracle::pi / 2).amplitudes(), fourier_apply(psi, 0).amplitudes(), g.spacing()) < 1e-8);
    CHECK(l2(frft_apply(psi, 0, -oracle::pi / 2).amplitudes(), fourier_apply(psi, 0, true).amplitudes(), g.spacing()) <
          1e-8);
    const auto back = fourier_apply(fourier_apply(psi, 0), 0, true);
    CHECK(l2(back.amplitudes(), psi.amplitudes(), g.spacing()) < 1e-10);
  }
}

TEST_CASE("fourier transform of a Gaussian is analytic") {
  // psi(x) = pi^{-1/4} e^{-x^2/2 + i p0 x}  ->  phi(w) = pi^{-1/4} e^{-(w - p0)^2/2}
  const auto g = GridSpec::desk_1d();
  const double p0 = 1.5;
  const auto phi = fourier_apply(make_gaussian(g, GaussianMode{0.0, p0, 1.0, 0.0}), 0);
  for (std::size_t i = 900; i < 1300; i += 37) {
    const double w = g.coordinate(i);
    CHECK(std::abs(phi.at(i) - std::pow(oracle::pi, -0.25) * std::exp(-0.5 * (w - p0) * (w - p0))) < 1e-12);
  }
}

TEST_CASE("per-axis transforms on two-mode states") {
  const auto g2 = GridSpec::desk_2d();
  const GridSpec g1{g2.points_per_axis, g2.half_extent, 1};
  const GaussianMode a{0.3, 0.1, 1.5, 0.2}, b{-0.2, 0.6, 0.8, -0.9};
  const auto psi = make_gaussian(g2, std::vector<GaussianMode>{a, b});
  const double t = 0.9;
  const auto out = frft_apply(psi, 1, t);
  const auto pa = make_gaussian(g1, a);
  const auto pb = frft_apply(make_gaussian(g1, b), 0, t);
  double err = 0.0;
  for (std::size_t i = 0; i < g2.points_per_axis; i += 3)
    for (std::size_t j = 0; j < g2.points_per_axis; j += 3) err = std::max(err, std::abs(out.at(i, j) - pa.at(i) * pb.at(j)));
  CHECK(err < 1e-12);
  CHECK(out.representation()[0] == 0.0);
  CHECK(out.representation()[1] == doctest::Approx(t));
  CHECK_THROWS_AS(frft_apply(psi, 2, t), DomainError);
}
