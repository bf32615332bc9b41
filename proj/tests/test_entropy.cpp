#include <cmath>

#include "cventropic/entropy.hpp"
#include "cventropic/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cventropic;

namespace {

GriddedDensity sampled(double lo, double hi, std::size_t n, const std::function<double(double)>& pdf) {
  GriddedDensity d{lo, (hi - lo) / static_cast<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) d.mass[i] = pdf(d.center(i));
  return d;
}

GriddedDensity normal(double sigma, double extent = 12.0, std::size_t n = 4096) {
  return sampled(-extent * sigma, extent * sigma, n, [sigma](double x) {
    return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * oracle::pi));
  });
}

}  // namespace

TEST_CASE("uniform density: entropy ln(width), variance width^2/12") {
  for (double w : {0.25, 1.0, 7.0}) {
    const auto d = sampled(0.0, w, 1000, [w](double) { return 1.0 / w; });
    CHECK(differential_entropy(d).value == doctest::Approx(std::log(w)).epsilon(1e-12));
    // midpoint rule on n bins: w^2 (1 - 1/n^2) / 12
    CHECK(variance(d).value == doctest::Approx(w * w * (1.0 - 1e-6) / 12.0).epsilon(1e-12));
    CHECK(variance(d).mean == doctest::Approx(w / 2));
  }
}

TEST_CASE("normal density entropy") {
  for (double sigma : {0.3, 1.0, 2.5}) {
    const auto d = normal(sigma);
    CHECK(differential_entropy(d).value == doctest::Approx(oracle::gaussian_entropy(sigma * sigma)).epsilon(1e-10));
    CHECK(variance(d).value == doctest::Approx(sigma * sigma).epsilon(1e-10));
    CHECK_FALSE(differential_entropy(d).biased());
  }
}

TEST_CASE("scaling law H(cX) = H(X) + ln|c| (property)") {
  oracle::Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    // skewed two-bump density
    const double m = gen.uniform(-1, 1), s = gen.uniform(0.3, 1.2), w = gen.uniform(0.2, 0.8);
    const auto d = sampled(-10, 10, 2048, [&](double x) {
      return w * std::exp(-0.5 * (x - m) * (x - m) / (s * s)) / (s * std::sqrt(2 * oracle::pi)) +
             (1 - w) * std::exp(-0.5 * (x + 1) * (x + 1)) / std::sqrt(2 * oracle::pi);
    });
    const double h = differential_entropy(d).value;
    for (double c : {0.5, 2.0, -std::numbers::e, 3.7}) {
      CHECK(differential_entropy(d.scaled(c)).value == doctest::Approx(h + std::log(std::abs(c))).epsilon(1e-12));
      CHECK(variance(d.scaled(c)).value == doctest::Approx(c * c * variance(d).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("entropy-variance floor") {
  CHECK(entropy_variance_floor(0.0) == doctest::Approx(oracle::kInvTwoPiE).epsilon(1e-14));
  for (double v : {0.1, 1.0, 5.0}) CHECK(entropy_variance_floor(oracle::gaussian_entropy(v)) == doctest::Approx(v));
  // any non-Gaussian density lies strictly above its floor
  const auto u = sampled(0.0, 1.0, 1000, [](double) { return 1.0; });
  CHECK(variance(u).value > entropy_variance_floor(differential_entropy(u)));
}

TEST_CASE("zero bins and invalid mass") {
  GriddedDensity d{0.0, 1.0, {0.0, 0.5, 0.0, 0.5}};
  const auto h = differential_entropy(d);
  CHECK(h.value == doctest::Approx(std::log(2.0)));
  CHECK(h.zero_bin_fraction == doctest::Approx(0.5));
  GriddedDensity neg{0.0, 1.0, {0.6, -0.1, 0.5}};
  CHECK_THROWS_AS(differential_entropy(neg), DomainError);
  GriddedDensity inf{0.0, 1.0, {std::numeric_limits<double>::infinity(), 0.0}};
  CHECK_THROWS_AS(differential_entropy(inf), DomainError);
}

TEST_CASE("truncated support raises the bias flag") {
  const auto cut = normal(1.0, 2.0, 400);
  const auto h = differential_entropy(cut);
  CHECK(h.biased());
  CHECK(h.bias_diagnostic > 1e-3);
}
