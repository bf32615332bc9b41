#include "cventropic/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cventropic/errors.hpp"

namespace cventropic {

namespace {

// Gaussians must fit this many standard deviations inside the position and
// momentum windows of the grid.
constexpr double kResolutionSigmas = 6.5;

double sum_norm(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return s;
}

double cell_volume(const GridSpec& g) { return std::pow(g.spacing(), static_cast<double>(g.axes)); }

struct GaussianShape {
  double var_x;
  double var_p;
  double cov_xp;
};

GaussianShape shape_of(const GaussianMode& m) {
  const double c = std::cos(m.rotation), s = std::sin(m.rotation);
  const double sq = m.squeeze;
  return {0.5 * (sq * c * c + s * s / sq), 0.5 * (sq * s * s + c * c / sq),
          0.5 * (sq - 1.0 / sq) * c * s};
}

void check_mode(const GridSpec& grid, const GaussianMode& m) {
  if (!(m.squeeze >= 1.0 / 16.0 - 1e-12 && m.squeeze <= 16.0 + 1e-12)) {
    std::ostringstream os;
    os << "squeeze " << m.squeeze << " outside [1/16, 16]";
    throw DomainError(os.str());
  }
  if (!std::isfinite(m.center_x) || !std::isfinite(m.center_p) || !std::isfinite(m.rotation)) {
    throw DomainError("non-finite Gaussian parameter");
  }
  const auto sh = shape_of(m);
  const double reach_x = std::abs(m.center_x) + kResolutionSigmas * std::sqrt(sh.var_x);
  const double reach_p = std::abs(m.center_p) + kResolutionSigmas * std::sqrt(sh.var_p);
  if (reach_x > grid.half_extent || reach_p > grid.nyquist_momentum()) {
    std::ostringstream os;
    os << "Gaussian (x0=" << m.center_x << ", p0=" << m.center_p << ", s=" << m.squeeze
       << ") exceeds grid window: needs |x| <= " << reach_x << " (L=" << grid.half_extent
       << "), |p| <= " << reach_p << " (nyquist=" << grid.nyquist_momentum() << ")";
    throw ResolutionError(os.str());
  }
}

// Unnormalized 1-D profile of a GaussianMode sampled on the grid.
std::vector<Complex> gaussian_profile(const GridSpec& grid, const GaussianMode& m) {
  const auto sh = shape_of(m);
  const double a = 1.0 / (2.0 * sh.var_x);
  const double b = -sh.cov_xp / sh.var_x;
  std::vector<Complex> out(grid.points_per_axis);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double dx = grid.coordinate(i) - m.center_x;
    const double phase = -0.5 * b * dx * dx + m.center_p * grid.coordinate(i);
    out[i] = std::exp(-0.5 * a * dx * dx) * std::polar(1.0, phase);
  }
  return out;
}

std::vector<Complex> product_profile(const GridSpec& grid, std::span<const GaussianMode> modes) {
  if (modes.size() != grid.axes) throw DomainError("one GaussianMode per axis required");
  for (const auto& m : modes) check_mode(grid, m);
  if (grid.axes == 1) return gaussian_profile(grid, modes[0]);
  const auto f0 = gaussian_profile(grid, modes[0]);
  const auto f1 = gaussian_profile(grid, modes[1]);
  const std::size_t n = grid.points_per_axis;
  std::vector<Complex> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = f0[i] * f1[j];
  return out;
}

}  // namespace

double GridSpec::nyquist_momentum() const { return std::numbers::pi / spacing(); }

void GridSpec::validate() const {
  if (points_per_axis < 8) throw DomainError("grid needs at least 8 points per axis");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) throw DomainError("grid half extent must be positive");
  if (axes != 1 && axes != 2) throw DomainError("grid must have 1 or 2 axes");
}

WaveFunction::WaveFunction(GridSpec grid, std::vector<Complex> amplitudes,
                           std::vector<double> representation)
    : grid_(grid), amplitudes_(std::move(amplitudes)), representation_(std::move(representation)) {
  grid_.validate();
  if (amplitudes_.size() != grid_.total_points()) throw DomainError("amplitude count does not match grid");
  if (representation_.empty()) representation_.assign(grid_.axes, 0.0);
  if (representation_.size() != grid_.axes) throw DomainError("representation needs one angle per axis");
  for (const auto& z : amplitudes_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("non-finite amplitude");
  }
  const double n2 = sum_norm(amplitudes_) * cell_volume(grid_);
  if (!(n2 > 0.0)) throw DomainError("zero wave function cannot be normalized");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& z : amplitudes_) z *= scale;
}

double WaveFunction::norm_squared() const { return sum_norm(amplitudes_) * cell_volume(grid_); }

double WaveFunction::edge_mass(std::size_t width) const {
  const std::size_t n = grid_.points_per_axis;
  auto near_edge = [&](std::size_t i) { return i < width || i + width >= n; };
  double m = 0.0;
  if (grid_.axes == 1) {
    for (std::size_t i = 0; i < n; ++i)
      if (near_edge(i)) m += std::norm(amplitudes_[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (near_edge(i) || near_edge(j)) m += std::norm(amplitudes_[i * n + j]);
  }
  return m * cell_volume(grid_);
}

WaveFunction WaveFunction::with_amplitudes(std::vector<Complex> amplitudes,
                                           std::vector<double> representation,
                                           std::string_view origin) const {
  WaveFunction out;
  out.grid_ = grid_;
  out.representation_ = std::move(representation);
  out.diagnostics_ = diagnostics_;
  if (amplitudes.size() != grid_.total_points()) throw DomainError("amplitude count does not match grid");
  for (const auto& z : amplitudes) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ResolutionError(std::string(origin) + ": non-finite amplitude");
    }
  }
  out.amplitudes_ = std::move(amplitudes);
  const double n2 = out.norm_squared();
  if (!(n2 > 0.0)) throw ResolutionError(std::string(origin) + ": state lost all mass");
  if (std::abs(n2 - 1.0) > 1e-6) {
    std::ostringstream os;
    os << origin << ": norm drifted to " << n2 << ", renormalized";
    out.diagnostics_.push_back(os.str());
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& z : out.amplitudes_) z *= scale;
  }
  const double edge = out.edge_mass();
  if (edge > 1e-6) {
    std::ostringstream os;
    os << origin << ": edge mass " << edge << " within 5 samples of the boundary";
    out.diagnostics_.push_back(os.str());
  }
  return out;
}

double GriddedDensity::total() const {
  return std::accumulate(mass.begin(), mass.end(), 0.0) * spacing;
}

void GriddedDensity::validate() const {
  if (!(spacing > 0.0)) throw DomainError("density spacing must be positive");
  for (double m : mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("density has negative or non-finite mass");
  }
  if (std::abs(total() - 1.0) > 1e-6) throw DomainError("density is not normalized");
}

GriddedDensity GriddedDensity::scaled(double c) const {
  if (c == 0.0 || !std::isfinite(c)) throw DomainError("scale factor must be finite and nonzero");
  const double ac = std::abs(c);
  GriddedDensity out;
  out.spacing = spacing * ac;
  out.mass.resize(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) out.mass[i] = mass[i] / ac;
  if (c > 0) {
    out.support_min = support_min * c;
  } else {
    out.support_min = (support_min + spacing * static_cast<double>(mass.size())) * c;
    std::reverse(out.mass.begin(), out.mass.end());
  }
  return out;
}

PureEnsemble::PureEnsemble(std::vector<Member> members) : members_(std::move(members)) {
  if (members_.empty()) throw DomainError("ensemble has no members");
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight > 0.0 && m.weight <= 1.0)) throw DomainError("ensemble weight outside (0, 1]");
    if (!(m.state.grid() == members_.front().state.grid())) throw DomainError("ensemble members use different grids");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("ensemble weights do not sum to 1");
}

PureEnsemble PureEnsemble::single(WaveFunction state) {
  std::vector<Member> m;
  m.push_back({1.0, std::move(state)});
  return PureEnsemble(std::move(m));
}

WaveFunction make_gaussian(const GridSpec& grid, std::span<const GaussianMode> modes) {
  grid.validate();
  return WaveFunction(grid, product_profile(grid, modes));
}

WaveFunction make_gaussian(const GridSpec& grid, const GaussianMode& mode) {
  return make_gaussian(grid, std::span<const GaussianMode>(&mode, 1));
}

WaveFunction make_superposition(const GridSpec& grid, std::span<const SuperpositionTerm> terms) {
  grid.validate();
  if (terms.empty()) throw DomainError("superposition needs at least one term");
  std::vector<Complex> acc(grid.total_points(), Complex{});
  for (const auto& t : terms) {
    auto prof = product_profile(grid, t.modes);
    // Each term is normalized before weighting so coefficients are comparable.
    const double n2 = sum_norm(prof) * cell_volume(grid);
    const Complex w = t.coefficient / std::sqrt(n2);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * prof[i];
  }
  return WaveFunction(grid, std::move(acc));
}

std::vector<double> hermite_functions(double x, std::size_t count) {
  std::vector<double> h(count);
  if (count == 0) return h;
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (count > 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double kk = static_cast<double>(k);
    h[k + 1] = std::sqrt(2.0 / (kk + 1.0)) * x * h[k] - std::sqrt(kk / (kk + 1.0)) * h[k - 1];
  }
  return h;
}

WaveFunction make_hermite_superposition(const GridSpec& grid, std::span<const Complex> coefficients) {
  grid.validate();
  if (grid.axes != 1) throw DomainError("Hermite superpositions are one-mode states");
  if (coefficients.empty()) throw DomainError("Hermite superposition needs coefficients");
  // psi_k has position spread ~ sqrt(2k+1); momentum spread is identical.
  const double reach = std::sqrt(2.0 * static_cast<double>(coefficients.size()) + 1.0) + kResolutionSigmas;
  if (reach > grid.half_extent || reach > grid.nyquist_momentum()) {
    throw ResolutionError("Hermite superposition does not fit the grid window");
  }
  std::vector<Complex> amps(grid.points_per_axis);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto h = hermite_functions(grid.coordinate(i), coefficients.size());
    Complex z{};
    for (std::size_t k = 0; k < h.size(); ++k) z += coefficients[k] * h[k];
    amps[i] = z;
  }
  return WaveFunction(grid, std::move(amps));
}

GriddedDensity position_density(const WaveFunction& state, std::size_t axis) {
  const auto& g = state.grid();
  if (axis >= g.axes) throw DomainError("axis out of range");
  const std::size_t n = g.points_per_axis;
  const double dx = g.spacing();
  GriddedDensity out{-g.half_extent, dx, std::vector<double>(n, 0.0)};
  const auto a = state.amplitudes();
  if (g.axes == 1) {
    for (std::size_t i = 0; i < n; ++i) out.mass[i] = std::norm(a[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.mass[axis == 0 ? i : j] += std::norm(a[i * n + j]) * dx;
  }
  return out;
}

GriddedDensity mixture_density(const PureEnsemble& ensemble, std::size_t axis) {
  GriddedDensity out;
  bool first = true;
  for (const auto& m : ensemble.members()) {
    auto d = position_density(m.state, axis);
    if (first) {
      out = d;
      for (auto& v : out.mass) v *= m.weight;
      first = false;
    } else {
      for (std::size_t i = 0; i < d.mass.size(); ++i) out.mass[i] += m.weight * d.mass[i];
    }
  }
  return out;
}

}  // namespace cventropic
