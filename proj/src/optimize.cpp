#include "cventropic/optimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "cventropic/bounds.hpp"
#include "cventropic/entropy.hpp"
#include "cventropic/errors.hpp"

namespace cventropic {

namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxCenter = 4.0;
constexpr double kMaxLogit = 12.0;
constexpr double kMaxCoefficient = 4.0;
const double kMaxLogSqueeze = std::log(16.0);

constexpr std::size_t kGaussianBlock = 4;

GaussianMode mode_from(std::span<const double> p) {
  return {p[0], p[1], std::exp(p[2]), p[3]};
}

// GaussianMode whose (x, p) covariance is `v` (det v = 1/4).
GaussianMode mode_from_covariance(const Eigen::Matrix2d& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(2.0 * v);
  const double squeeze = es.eigenvalues()(1);
  const Eigen::Vector2d u = es.eigenvectors().col(1);
  GaussianMode m;
  m.squeeze = squeeze;
  m.rotation = std::atan2(u(1), u(0));
  return m;
}

// Covariance of a one-mode Gaussian saturating (x cos t + p sin t, x): the
// pair is uncorrelated with Var(x) = width * |sin t| / 2.
Eigen::Matrix2d canonical_covariance(double theta, double width = 1.0) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double vx = 0.5 * width * std::abs(s);
  const double cxp = -vx * c / s;
  Eigen::Matrix2d v;
  v << vx, cxp, cxp, (0.25 + cxp * cxp) / vx;
  return v;
}

}  // namespace

std::string to_string(FamilyId id) {
  switch (id) {
    case FamilyId::gaussian:
      return "gaussian";
    case FamilyId::gaussian_mixture:
      return "gaussian_mixture";
    case FamilyId::hermite_superposition:
      return "hermite_superposition";
  }
  return "unknown";
}

FamilyId family_from_string(const std::string& name) {
  if (name == "gaussian") return FamilyId::gaussian;
  if (name == "gaussian_mixture") return FamilyId::gaussian_mixture;
  if (name == "hermite_superposition") return FamilyId::hermite_superposition;
  throw DomainError("unknown state family '" + name + "'");
}

std::size_t StateFamily::parameter_count() const {
  switch (id) {
    case FamilyId::gaussian:
      return kGaussianBlock * modes;
    case FamilyId::gaussian_mixture:
      return components * (kGaussianBlock * modes + 1);
    case FamilyId::hermite_superposition:
      return 2 * components;
  }
  return 0;
}

bool StateFamily::in_range(std::span<const double> params) const {
  if (params.size() != parameter_count()) return false;
  for (double v : params)
    if (!std::isfinite(v)) return false;
  auto gaussian_ok = [&](std::span<const double> block) {
    for (std::size_t m = 0; m < modes; ++m) {
      const auto p = block.subspan(kGaussianBlock * m, kGaussianBlock);
      if (std::abs(p[0]) > kMaxCenter || std::abs(p[1]) > kMaxCenter || std::abs(p[2]) > kMaxLogSqueeze) return false;
    }
    return true;
  };
  switch (id) {
    case FamilyId::gaussian:
      return gaussian_ok(params);
    case FamilyId::gaussian_mixture: {
      const std::size_t block = kGaussianBlock * modes;
      for (std::size_t k = 0; k < components; ++k)
        if (!gaussian_ok(params.subspan(k * block, block))) return false;
      for (std::size_t k = 0; k < components; ++k)
        if (std::abs(params[components * block + k]) > kMaxLogit) return false;
      return true;
    }
    case FamilyId::hermite_superposition: {
      double norm = 0.0;
      for (double v : params) {
        if (std::abs(v) > kMaxCoefficient) return false;
        norm += v * v;
      }
      return norm > 1e-12;
    }
  }
  return false;
}

PureEnsemble StateFamily::build(std::span<const double> params) const {
  if (grid.axes != modes) throw DomainError("family mode count does not match grid axes");
  if (!in_range(params)) throw DomainError("parameters outside family range");
  auto gaussian_state = [&](std::span<const double> block) {
    std::vector<GaussianMode> ms;
    for (std::size_t m = 0; m < modes; ++m) ms.push_back(mode_from(block.subspan(kGaussianBlock * m, kGaussianBlock)));
    return make_gaussian(grid, ms);
  };
  switch (id) {
    case FamilyId::gaussian:
      return PureEnsemble::single(gaussian_state(params));
    case FamilyId::gaussian_mixture: {
      const std::size_t block = kGaussianBlock * modes;
      const auto logits = params.subspan(components * block, components);
      const double top = *std::max_element(logits.begin(), logits.end());
      std::vector<double> w(components);
      for (std::size_t k = 0; k < components; ++k) w[k] = std::exp(logits[k] - top);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      std::vector<PureEnsemble::Member> members;
      for (std::size_t k = 0; k < components; ++k) {
        members.push_back({w[k] / total, gaussian_state(params.subspan(k * block, block))});
      }
      return PureEnsemble(std::move(members));
    }
    case FamilyId::hermite_superposition: {
      if (modes != 1) throw DomainError("hermite_superposition is a one-mode family");
      std::vector<Complex> c(components);
      for (std::size_t k = 0; k < components; ++k) c[k] = {params[2 * k], params[2 * k + 1]};
      return PureEnsemble::single(make_hermite_superposition(grid, c));
    }
  }
  throw DomainError("unknown family");
}

std::vector<double> StateFamily::random_start(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> p(parameter_count());
  auto fill_gaussian = [&](std::size_t offset) {
    for (std::size_t m = 0; m < modes; ++m) {
      const std::size_t o = offset + kGaussianBlock * m;
      p[o] = unit(rng);
      p[o + 1] = unit(rng);
      p[o + 2] = 1.5 * unit(rng);
      p[o + 3] = pi * unit(rng);
    }
  };
  switch (id) {
    case FamilyId::gaussian:
      fill_gaussian(0);
      break;
    case FamilyId::gaussian_mixture: {
      const std::size_t block = kGaussianBlock * modes;
      for (std::size_t k = 0; k < components; ++k) fill_gaussian(k * block);
      for (std::size_t k = 0; k < components; ++k) p[components * block + k] = unit(rng);
      break;
    }
    case FamilyId::hermite_superposition:
      for (auto& v : p) v = unit(rng);
      break;
  }
  return p;
}

std::vector<double> StateFamily::step_sizes() const {
  return std::vector<double>(parameter_count(), id == FamilyId::hermite_superposition ? 0.3 : 0.5);
}

double objective(std::span<const double> params, const StateFamily& family, const QuadratureOp& a,
                 const QuadratureOp& b) {
  if (!family.in_range(params)) return kInf;
  try {
    const auto state = family.build(params);
    return differential_entropy(distribution_of(state, a)).value +
           differential_entropy(distribution_of(state, b)).value;
  } catch (const ResolutionError&) {
    return kInf;
  }
}

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                          std::span<const double> steps, std::size_t budget, double tolerance) {
  const std::size_t n = start.size();
  SimplexResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return f(x);
  };
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  vals[0] = eval(start);
  for (std::size_t i = 0; i < n && out.evaluations < budget; ++i) {
    pts[i + 1][i] += steps[i];
    vals[i + 1] = eval(pts[i + 1]);
  }
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](double t, const std::vector<double>& from, std::vector<double>& into) {
    for (std::size_t j = 0; j < n; ++j) into[j] = centroid[j] + t * (from[j] - centroid[j]);
  };

  while (out.evaluations < budget) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return vals[i] < vals[j]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::isfinite(vals[worst]) && vals[worst] - vals[best] <= tolerance) {
      out.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[order[k]][j] / static_cast<double>(n);

    along(-1.0, pts[worst], trial);
    const double fr = eval(trial);
    if (fr < vals[best]) {
      along(-2.0, pts[worst], trial2);
      const double fe = out.evaluations < budget ? eval(trial2) : kInf;
      if (fe < fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
      continue;
    }
    if (out.evaluations >= budget) break;
    const bool outside = fr < vals[worst];
    along(outside ? -0.5 : 0.5, pts[worst], trial2);
    const double fc = eval(trial2);
    if (fc < std::min(fr, vals[worst])) {
      pts[worst] = trial2;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n && out.evaluations < budget; ++k) {
      auto& p = pts[order[k]];
      for (std::size_t j = 0; j < n; ++j) p[j] = pts[best][j] + 0.5 * (p[j] - pts[best][j]);
      vals[order[k]] = eval(p);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  out.value = *it;
  out.x = pts[static_cast<std::size_t>(it - vals.begin())];
  return out;
}

OptResult minimize(const StateFamily& family, const QuadratureOp& a, const QuadratureOp& b,
                   const MinimizeSettings& settings) {
  if (settings.budget < 100) throw DomainError("optimizer budget must be at least 100 evaluations");
  const std::size_t restarts = std::max<std::size_t>(settings.restarts, 1);
  const std::size_t per_restart = settings.budget / restarts;
  auto f = [&](std::span<const double> x) { return objective(x, family, a, b); };

  auto run_restart = [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(settings.seed), static_cast<std::uint32_t>(settings.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<double> start;
    std::size_t draws = 0;
    // Draw until feasible; each probe counts against the restart's budget.
    do {
      start = family.random_start(rng);
      ++draws;
    } while (!std::isfinite(f(start)) && draws < 50);
    const auto steps = family.step_sizes();
    auto res = nelder_mead(f, start, steps, per_restart > draws ? per_restart - draws : 1);
    res.evaluations += draws;
    return res;
  };

  std::vector<SimplexResult> results(restarts);
  const std::size_t workers = std::max<std::size_t>(settings.workers, 1);
  for (std::size_t base = 0; base < restarts; base += workers) {
    std::vector<std::future<SimplexResult>> batch;
    for (std::size_t r = base; r < std::min(restarts, base + workers); ++r) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_restart, r));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) results[base + k] = batch[k].get();
  }

  OptResult out;
  out.best_value = kInf;
  for (const auto& r : results) {
    out.evaluations += r.evaluations;
    out.restart_values.push_back(r.value);
    if (!r.converged) out.budget_exhausted = true;
    if (r.value < out.best_value) {
      out.best_value = r.value;
      out.best_params = r.x;
    }
  }
  out.gap_to_bound = out.best_value - entropic_rhs(a, b);
  return out;
}

GaussianMode saturating_gaussian(const QuadratureOp& a, const QuadratureOp& b) {
  if (a.modes() != 1 || b.modes() != 1) throw DomainError("saturating_gaussian is for one-mode pairs");
  const auto red = reduce_pair(a, b);
  if (red.degenerate || commutator_value(a, b) == 0.0) throw DomainError("commuting pair has no saturating state");
  // The reduced-frame state is carried back by F(-phi), which rotates the
  // covariance by phi in phase space.
  const double phi = -red.first_angles[0];
  Eigen::Matrix2d m;
  m << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
  return mode_from_covariance(m * canonical_covariance(red.theta) * m.transpose());
}

WaveFunction saturating_state(const QuadratureOp& a, const QuadratureOp& b, const GridSpec& grid,
                              const std::optional<GaussianMode>& spectator) {
  if (a.modes() != grid.axes || b.modes() != grid.axes) throw DomainError("pair mode count does not match grid");
  if (grid.axes == 1) return make_gaussian(grid, saturating_gaussian(a, b));
  const auto red = reduce_pair(a, b);
  if (red.degenerate || commutator_value(a, b) == 0.0) throw DomainError("commuting pair has no saturating state");
  const double kappa = -red.mu / std::sin(red.theta);

  // Recovery is an orthogonal symplectic map, so the spectrum of the reduced-frame
  // covariance fixes how far the final state spreads. Rank (width, spectator)
  // candidates by its largest eigenvalue.
  struct Candidate {
    double spread;
    GaussianMode lead;
    GaussianMode spec;
  };
  std::vector<Candidate> candidates;
  Eigen::Matrix4d shear = Eigen::Matrix4d::Identity();
  shear(1, 2) = kappa;
  shear(3, 0) = kappa;
  for (int k = -8; k <= 8; ++k) {
    const Eigen::Matrix2d lead_cov = canonical_covariance(red.theta, std::exp2(0.5 * k));
    GaussianMode lead;
    try {
      lead = mode_from_covariance(lead_cov);
    } catch (const DomainError&) {
      continue;
    }
    for (int j = -8; j <= 8; ++j) {
      if (spectator && j != 0) continue;
      GaussianMode spec = spectator.value_or(GaussianMode{0.0, 0.0, std::exp2(0.5 * j), 0.0});
      const double c = std::cos(spec.rotation), sn = std::sin(spec.rotation);
      Eigen::Matrix2d rot;
      rot << c, -sn, sn, c;
      const Eigen::Matrix2d spec_cov = rot * Eigen::Vector2d(0.5 * spec.squeeze, 0.5 / spec.squeeze).asDiagonal() * rot.transpose();
      Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
      v.topLeftCorner<2, 2>() = lead_cov;
      v.bottomRightCorner<2, 2>() = spec_cov;
      const Eigen::Matrix4d w = shear * v * shear.transpose();
      const double spread = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(w, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
      candidates.push_back({spread, lead, spec});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.spread < y.spread; });

  const std::size_t n = grid.points_per_axis;
  std::string last_error = "no feasible candidate";
  const std::size_t attempts = std::min<std::size_t>(candidates.size(), 4);
  for (std::size_t t = 0; t < attempts; ++t) {
    try {
      const auto product = make_gaussian(grid, std::vector<GaussianMode>{candidates[t].lead, candidates[t].spec});
      std::vector<Complex> amps(product.amplitudes().begin(), product.amplitudes().end());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          amps[i * n + j] *= std::polar(1.0, kappa * grid.coordinate(i) * grid.coordinate(j));
      auto state = red.recover_state(WaveFunction(grid, std::move(amps)));
      distribution_of(state, a);
      distribution_of(state, b);
      return state;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw ResolutionError("no saturating state resolvable on the grid: " + last_error);
}

}  // namespace cventropic
