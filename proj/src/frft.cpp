#include "cventropic/frft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

#include "cventropic/errors.hpp"
#include "cventropic/fft.hpp"

namespace cventropic {

namespace {

using std::numbers::pi;

template <typename Fn>
void for_each_line(std::vector<Complex>& amps, const GridSpec& grid, std::size_t axis, Fn&& fn) {
  const std::size_t n = grid.points_per_axis;
  if (grid.axes == 1) {
    fn(std::span<Complex>(amps));
    return;
  }
  if (axis == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(std::span<Complex>(amps.data() + i * n, n));
    return;
  }
  std::vector<Complex> column(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = amps[i * n + j];
    fn(std::span<Complex>(column));
    for (std::size_t i = 0; i < n; ++i) amps[i * n + j] = column[i];
  }
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

using PlanKey = std::tuple<std::size_t, std::uint64_t, std::uint64_t>;

// Bluestein tables for sum_j psi_j e^{-i s p_k x_j} with p_k = x_k on one grid.
struct ChirpZ {
  std::size_t n = 0;
  std::size_t padded = 0;
  std::vector<Complex> pre;
  std::vector<Complex> post;
  std::vector<Complex> filter_spectrum;

  ChirpZ(const GridSpec& grid, double sign) : n(grid.points_per_axis) {
    padded = std::bit_ceil(2 * n);
    const double dx = grid.spacing();
    const double x0 = grid.coordinate(0);
    pre.resize(n);
    post.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double jj = static_cast<double>(j);
      pre[j] = std::polar(1.0, -sign * (x0 * dx * jj + 0.5 * dx * dx * jj * jj));
      post[j] = std::polar(dx / std::sqrt(2.0 * pi),
                           -sign * (x0 * x0 + x0 * dx * jj + 0.5 * dx * dx * jj * jj));
    }
    filter_spectrum.assign(padded, Complex{});
    for (std::size_t m = 0; m < n; ++m) {
      const double mm = static_cast<double>(m);
      const Complex w = std::polar(1.0, sign * 0.5 * dx * dx * mm * mm);
      filter_spectrum[m] = w;
      if (m > 0) filter_spectrum[padded - m] = w;
    }
    fft::forward(filter_spectrum);
    const double inv = 1.0 / static_cast<double>(padded);
    for (auto& z : filter_spectrum) z *= inv;
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    std::vector<Complex> work(padded, Complex{});
    for (std::size_t j = 0; j < n; ++j) work[j] = in[j] * pre[j];
    fft::forward(work);
    for (std::size_t m = 0; m < padded; ++m) work[m] *= filter_spectrum[m];
    fft::backward(work);
    for (std::size_t k = 0; k < n; ++k) out[k] = work[k] * post[k];
  }
};

std::shared_ptr<const ChirpZ> chirpz_for(const GridSpec& grid, bool inverse) {
  static std::shared_mutex mutex;
  static std::map<PlanKey, std::shared_ptr<const ChirpZ>> cache;
  const PlanKey key{grid.points_per_axis, bits(grid.half_extent), inverse ? 1u : 0u};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto plan = std::make_shared<const ChirpZ>(grid, inverse ? -1.0 : 1.0);
  std::unique_lock lock(mutex);
  return cache.try_emplace(key, std::move(plan)).first->second;
}

void check_axis(const WaveFunction& state, std::size_t axis) {
  if (axis >= state.axes()) throw DomainError("axis out of range");
}

}  // namespace

double reduce_angle(double theta) {
  if (!std::isfinite(theta)) throw DomainError("angle must be finite");
  double r = std::remainder(theta, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

FrftPlan::FrftPlan(const GridSpec& grid, double theta) : grid_(grid), theta_(reduce_angle(theta)) {
  grid_.validate();
  if (std::abs(theta_) < 1e-14) {
    kind_ = Kind::identity;
    return;
  }
  if (std::abs(theta_ - pi) < 1e-14) {
    kind_ = Kind::parity;
    return;
  }
  kind_ = Kind::chirps;
  global_phase_ = std::polar(1.0, 0.5 * theta_);
  const double step = std::abs(theta_) > 0.5 * pi ? 0.5 * theta_ : theta_;
  repeats_ = std::abs(theta_) > 0.5 * pi ? 2 : 1;
  const double t = std::tan(0.5 * step);
  const double s = std::sin(step);
  const std::size_t n = grid_.points_per_axis;
  const double dx = grid_.spacing();
  position_chirp_.resize(n);
  momentum_chirp_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.coordinate(i);
    position_chirp_[i] = std::polar(1.0, -0.5 * t * x * x);
    const double p = fft::angular_frequency(i, n, dx);
    momentum_chirp_[i] = std::polar(1.0 / static_cast<double>(n), -0.5 * s * p * p);
  }
}

void FrftPlan::apply_line(std::span<Complex> line) const {
  switch (kind_) {
    case Kind::identity:
      return;
    case Kind::parity:
      std::reverse(line.begin(), line.end());
      return;
    case Kind::chirps:
      break;
  }
  for (int r = 0; r < repeats_; ++r) {
    for (std::size_t i = 0; i < line.size(); ++i) line[i] *= position_chirp_[i];
    fft::forward(line);
    for (std::size_t i = 0; i < line.size(); ++i) line[i] *= momentum_chirp_[i];
    fft::backward(line);
    for (std::size_t i = 0; i < line.size(); ++i) line[i] *= position_chirp_[i];
  }
  for (auto& z : line) z *= global_phase_;
}

std::shared_ptr<const FrftPlan> FrftPlan::cached(const GridSpec& grid, double theta) {
  static std::shared_mutex mutex;
  static std::map<PlanKey, std::shared_ptr<const FrftPlan>> cache;
  constexpr std::size_t kMaxPlans = 256;
  const PlanKey key{grid.points_per_axis, bits(grid.half_extent), bits(reduce_angle(theta))};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto plan = std::make_shared<const FrftPlan>(grid, theta);
  std::unique_lock lock(mutex);
  // Optimizer sweeps produce unbounded distinct angles; plans in use stay
  // alive through their shared_ptr when the cache is flushed.
  if (cache.size() >= kMaxPlans) cache.clear();
  return cache.try_emplace(key, std::move(plan)).first->second;
}

WaveFunction frft_apply(const WaveFunction& state, std::size_t axis, double theta) {
  check_axis(state, axis);
  const auto plan = FrftPlan::cached(state.grid(), theta);
  std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
  for_each_line(amps, state.grid(), axis, [&](std::span<Complex> line) { plan->apply_line(line); });
  std::vector<double> rep(state.representation().begin(), state.representation().end());
  rep[axis] = reduce_angle(rep[axis] + plan->theta());
  return state.with_amplitudes(std::move(amps), std::move(rep), "frft");
}

std::vector<Complex> fourier_line(const GridSpec& grid, std::span<const Complex> line, bool inverse) {
  if (line.size() != grid.points_per_axis) throw DomainError("line length does not match grid");
  std::vector<Complex> out(line.size());
  chirpz_for(grid, inverse)->apply(line, out);
  return out;
}

WaveFunction fourier_apply(const WaveFunction& state, std::size_t axis, bool inverse) {
  check_axis(state, axis);
  const auto plan = chirpz_for(state.grid(), inverse);
  std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
  std::vector<Complex> out(state.grid().points_per_axis);
  for_each_line(amps, state.grid(), axis, [&](std::span<Complex> line) {
    plan->apply(line, out);
    std::copy(out.begin(), out.end(), line.begin());
  });
  std::vector<double> rep(state.representation().begin(), state.representation().end());
  rep[axis] = reduce_angle(rep[axis] + (inverse ? -0.5 * pi : 0.5 * pi));
  return state.with_amplitudes(std::move(amps), std::move(rep), "fourier");
}

}  // namespace cventropic
