#include "cventropic/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

#include "cventropic/errors.hpp"
#include "cventropic/frft.hpp"

namespace cventropic {

namespace {

constexpr double kSupportFloor = 1e-12;

std::vector<double> basis_density(const WaveFunction& state, Basis basis) {
  if (state.axes() != 1) throw DomainError("observable probes are one-mode only");
  std::vector<double> d(state.grid().points_per_axis);
  if (basis == Basis::position) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(state.at(i));
  } else {
    const auto phi = fourier_line(state.grid(), state.amplitudes(), false);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(phi[i]);
  }
  return d;
}

double histogram_entropy(std::span<const double> values, std::span<const double> weights, double lo, double hi,
                         std::size_t bins) {
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> q(bins, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    auto k = static_cast<long>(std::floor((values[i] - lo) / width));
    k = std::clamp<long>(k, 0, static_cast<long>(bins) - 1);
    q[static_cast<std::size_t>(k)] += weights[i];
  }
  double total = 0.0;
  for (double v : q) total += v;
  double h = 0.0;
  for (double v : q) {
    if (v <= 0.0) continue;
    const double pv = v / total;
    h -= pv * std::log(pv / width);
  }
  return h;
}

std::string format_coefficient(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

DiagonalObservable DiagonalObservable::from_function(Basis basis, const GridSpec& grid,
                                                     const std::function<double(double)>& fn,
                                                     std::string descriptor) {
  if (grid.axes != 1) throw DomainError("observables are sampled on one-mode grids");
  DiagonalObservable o;
  o.basis = basis;
  o.descriptor = std::move(descriptor);
  o.values.resize(grid.points_per_axis);
  for (std::size_t i = 0; i < o.values.size(); ++i) {
    o.values[i] = fn(grid.coordinate(i));
    if (!std::isfinite(o.values[i])) throw DomainError("observable '" + o.descriptor + "' is not finite on the grid");
  }
  return o;
}

DiagonalObservable DiagonalObservable::polynomial(Basis basis, const GridSpec& grid, int power, double scale,
                                                  double offset) {
  if (power < 0) throw DomainError("negative observable power");
  std::string var = basis == Basis::position ? "x" : "p";
  std::string desc = (scale == 1.0 ? "" : format_coefficient(scale) + "*") + var;
  if (power != 1) desc += "^" + std::to_string(power);
  if (offset != 0.0) desc += (offset > 0 ? "+" : "") + format_coefficient(offset);
  return from_function(
      basis, grid, [=](double v) { return scale * std::pow(v, power) + offset; }, desc);
}

DiagonalObservable DiagonalObservable::parse(const std::string& text, const GridSpec& grid) {
  static const std::regex pattern(
      R"(^\s*([+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?)?)\s*\*?\s*([xp])\s*(?:\^\s*(\d+))?\s*(?:([+-])\s*(\d+\.?\d*(?:[eE][+-]?\d+)?))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw DomainError("cannot parse observable '" + text + "'");
  double scale = 1.0;
  const std::string c = m[1].str();
  if (c == "-") {
    scale = -1.0;
  } else if (!c.empty() && c != "+") {
    scale = std::stod(c);
  }
  const Basis basis = m[2].str() == "x" ? Basis::position : Basis::momentum;
  const int power = m[3].matched ? std::stoi(m[3].str()) : 1;
  double offset = 0.0;
  if (m[4].matched) offset = (m[4].str() == "-" ? -1.0 : 1.0) * std::stod(m[5].str());
  return polynomial(basis, grid, power, scale, offset);
}

ObservableEntropy observable_entropy(const WaveFunction& state, const DiagonalObservable& obs) {
  const auto density = basis_density(state, obs.basis);
  if (obs.values.size() != density.size()) throw DomainError("observable sampled on a different grid");
  const double dx = state.grid().spacing();
  std::vector<double> weights(density.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < density.size(); ++i) {
    weights[i] = density[i] * dx;
    if (density[i] > kSupportFloor) {
      lo = std::min(lo, obs.values[i]);
      hi = std::max(hi, obs.values[i]);
    }
  }
  ObservableEntropy out;
  const std::size_t n = density.size();
  for (std::size_t i = 0; i < n; ++i)
    if (i < 5 || i + 5 >= n) out.estimate.bias_diagnostic += weights[i];
  if (!(hi > lo) || hi - lo <= 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
    out.constant = true;
    out.estimate.value = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.bins = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  out.estimate.value = histogram_entropy(obs.values, weights, lo, hi, out.bins);
  const double refined = histogram_entropy(obs.values, weights, lo, hi, 2 * out.bins);
  out.refined_change = std::abs(refined - out.estimate.value);
  out.low_confidence = out.refined_change >= 5e-3;
  return out;
}

CommutatorExpectation commutator_expectation(const WaveFunction& state, const DiagonalObservable& f,
                                             const DiagonalObservable& g) {
  if (state.axes() != 1) throw DomainError("commutator probe is one-mode only");
  if (f.basis != Basis::position || g.basis != Basis::momentum) {
    throw DomainError("commutator probe expects f(x) and g(p)");
  }
  const auto& grid = state.grid();
  const std::size_t n = grid.points_per_axis;
  if (f.values.size() != n || g.values.size() != n) throw DomainError("observable sampled on a different grid");
  const auto psi = state.amplitudes();

  auto apply_g = [&](std::span<const Complex> in) {
    auto spec = fourier_line(grid, in, false);
    for (std::size_t k = 0; k < n; ++k) spec[k] *= g.values[k];
    return fourier_line(grid, spec, true);
  };
  std::vector<Complex> f_psi(n);
  for (std::size_t i = 0; i < n; ++i) f_psi[i] = f.values[i] * psi[i];
  const auto g_psi = apply_g(psi);
  const auto g_f_psi = apply_g(f_psi);

  Complex fg{}, gf{};
  for (std::size_t i = 0; i < n; ++i) {
    fg += std::conj(psi[i]) * f.values[i] * g_psi[i];
    gf += std::conj(psi[i]) * g_f_psi[i];
  }
  const Complex z = (fg - gf) * grid.spacing();
  CommutatorExpectation out{std::abs(z.imag()), z.real()};
  if (std::abs(z.real()) > 1e-6) {
    std::ostringstream os;
    os << "commutator expectation has real part " << z.real() << " (Hermiticity check failed)";
    throw ResolutionError(os.str());
  }
  return out;
}

ProbeRecord probe(const WaveFunction& state, const DiagonalObservable& f, const DiagonalObservable& g,
                  std::string state_descriptor) {
  ProbeRecord r;
  r.state_descriptor = std::move(state_descriptor);
  r.f_descriptor = f.descriptor;
  r.g_descriptor = g.descriptor;
  try {
    const auto ha = observable_entropy(state, f);
    const auto hb = observable_entropy(state, g);
    r.entropy_a = ha.estimate.value;
    r.entropy_b = hb.estimate.value;
    r.low_confidence = ha.low_confidence || hb.low_confidence;
    r.commutator_expectation = commutator_expectation(state, f, g).magnitude;
    if (r.commutator_expectation < 1e-10) {
      r.trivially_satisfied = true;
      r.rhs = -std::numeric_limits<double>::infinity();
      r.margin = std::numeric_limits<double>::infinity();
    } else {
      r.rhs = 1.0 + std::log(std::numbers::pi) + std::log(r.commutator_expectation);
      r.margin = r.entropy_a + r.entropy_b - r.rhs;
    }
  } catch (const Error& e) {
    r.error = e.what();
    r.margin = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<ProbeRecord> rank_records(std::vector<ProbeRecord> records) {
  // Errored records (NaN margin) sink to the end.
  std::stable_sort(records.begin(), records.end(), [](const ProbeRecord& a, const ProbeRecord& b) {
    const bool an = std::isnan(a.margin), bn = std::isnan(b.margin);
    if (an != bn) return bn;
    return !an && a.margin < b.margin;
  });
  return records;
}

}  // namespace cventropic
