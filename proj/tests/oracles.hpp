// Independent reference computations used only by the tests. None of these
// share code paths with the library beyond the basic containers.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cventropic/qstate.hpp"

namespace oracle {

using cventropic::Complex;
using cventropic::GridSpec;
constexpr double pi = std::numbers::pi;

// High-precision constants (mpmath, 30 digits, rounded to double).
inline constexpr double kOnePlusLnPi = 2.144729885849400;        // 1 + ln(pi)
inline constexpr double kFirstExcitedSum = 2.685455576772357;    // H(x)+H(p) for psi_1
inline constexpr double kFirstExcitedHalf = 1.342727788386178;   // H(|psi_1|^2)
inline constexpr double kChiSquareVacuum = 0.0906099299139887;   // H of x^2 under the vacuum
inline constexpr double kBoundLn3 = 3.243342174517510;           // 1 + ln(pi) + ln 3
inline constexpr double kBoundLn2 = 2.837877066409345;           // 1 + ln(pi) + ln 2
inline constexpr double kInvTwoPiE = 0.058549831524319;          // 1 / (2 pi e)

/// Entropy of a normal density with variance v.
inline double gaussian_entropy(double v) { return 0.5 * std::log(2.0 * pi * std::numbers::e * v); }

/// Continuous fractional Fourier kernel evaluated by direct O(N^2) midpoint
/// quadrature:
///   K_t(x, y) = A_t exp(i (x^2 + y^2) cot(t) / 2 - i x y / sin t),
///   A_t = exp(-i pi sgn(sin t) / 4 + i t / 2) / sqrt(2 pi |sin t|),
/// whose eigenvalue on the n-th oscillator state is exp(-i n t).
inline std::vector<Complex> direct_frft(const GridSpec& grid, const std::vector<Complex>& f, double t) {
  const std::size_t n = grid.points_per_axis;
  const double dx = grid.spacing();
  const double s = std::sin(t), cot = std::cos(t) / s;
  const Complex a = std::polar(1.0 / std::sqrt(2.0 * pi * std::abs(s)), -pi * (s > 0 ? 1 : -1) / 4.0 + t / 2.0);
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.coordinate(i);
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = grid.coordinate(j);
      acc += std::polar(1.0, 0.5 * (x * x + y * y) * cot - x * y / s) * f[j];
    }
    out[i] = a * acc * dx;
  }
  return out;
}

/// Radon projection of a 2-D density onto the direction (cos phi, sin phi) with
/// bilinear interpolation along each line, binned on the source grid spacing.
/// Returns masses on bins centred at the grid coordinates.
inline std::vector<double> radon_linear(const GridSpec& grid, const std::vector<double>& density, double phi) {
  const std::size_t n = grid.points_per_axis;
  const double dx = grid.spacing();
  const double c = std::cos(phi), s = std::sin(phi);
  auto sample = [&](double x, double y) {
    const double fx = (x + grid.half_extent) / dx - 0.5, fy = (y + grid.half_extent) / dx - 0.5;
    const double ix = std::floor(fx), iy = std::floor(fy);
    if (ix < 0 || iy < 0 || ix + 1 >= static_cast<double>(n) || iy + 1 >= static_cast<double>(n)) return 0.0;
    const double tx = fx - ix, ty = fy - iy;
    const auto i = static_cast<std::size_t>(ix), j = static_cast<std::size_t>(iy);
    return (1 - tx) * (1 - ty) * density[i * n + j] + tx * (1 - ty) * density[(i + 1) * n + j] +
           (1 - tx) * ty * density[i * n + j + 1] + tx * ty * density[(i + 1) * n + j + 1];
  };
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.coordinate(k);
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double u = grid.coordinate(m);
      acc += sample(t * c - u * s, t * s + u * c);
    }
    out[k] = acc * dx;
  }
  return out;
}

/// Phase-space covariance (x, p ordering, Var convention: entries are
/// second central moments, not doubled) of GaussianMode parameters.
inline Eigen::Matrix2d mode_covariance(double squeeze, double rotation) {
  const double c = std::cos(rotation), s = std::sin(rotation);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r * Eigen::Vector2d(0.5 * squeeze, 0.5 / squeeze).asDiagonal() * r.transpose();
}

/// Deterministic generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double angle() { return uniform(-pi, pi); }
  std::vector<double> coeffs(std::size_t n) {
    std::vector<double> c(2 * n);
    for (auto& v : c) v = uniform(-1.0, 1.0);
    return c;
  }
  cventropic::GaussianMode mode(double max_center = 1.0, double max_log_squeeze = 0.7) {
    return {uniform(-max_center, max_center), uniform(-max_center, max_center),
            std::exp(uniform(-max_log_squeeze, max_log_squeeze)), angle()};
  }
};

}  // namespace oracle
