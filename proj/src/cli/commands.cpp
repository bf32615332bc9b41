#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "cventropic/bounds.hpp"
#include "cventropic/cli.hpp"
#include "cventropic/conjecture.hpp"
#include "cventropic/entropy.hpp"
#include "cventropic/errors.hpp"
#include "cventropic/frft.hpp"

namespace cventropic::cli {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

// Stream tags keep the random draws of different commands independent.
enum Stream : std::uint32_t { kSelftest = 0x5e1f, kScan = 0x5ca9, kSaturate = 0x5a70, kConjecture = 0xc09e };

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Runs fn(0..count-1) on up to `workers` threads; results come back in index order.
template <typename Fn>
auto parallel_map(std::size_t count, std::size_t workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> out(count);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string coeff_text(const QuadratureOp& op) {
  std::string s;
  for (std::size_t i = 0; i < op.coeffs().size(); ++i) {
    if (i) s += ';';
    s += json(op.coeffs()[i]).dump();
  }
  return s;
}

std::string summarize(const std::map<std::string, std::string>& diagnostics) {
  std::string s;
  for (const auto& [k, v] : diagnostics) {
    if (!s.empty()) s += ';';
    s += k + '=' + v;
  }
  return s;
}

json pair_json(const QuadratureOp& a, const QuadratureOp& b) {
  json ja = json::array(), jb = json::array();
  for (double v : a.coeffs()) ja.push_back(v);
  for (double v : b.coeffs()) jb.push_back(v);
  return {{"A", ja}, {"B", jb}, {"commutator", commutator_value(a, b)}};
}

json report_json(const BoundReport& r) {
  return {{"relation", to_string(r.relation)}, {"lhs", number(r.lhs)},         {"rhs", number(r.rhs)},
          {"margin", number(r.margin)},       {"tolerance", r.tolerance},      {"pass", r.pass},
          {"diagnostics", r.diagnostics}};
}

CsvRow report_row(const BoundReport& r, const QuadratureOp& a, const QuadratureOp& b, const std::string& item) {
  auto diag = r.diagnostics;
  diag["item"] = item;
  return {to_string(r.relation), a.modes(), coeff_text(a), coeff_text(b), r.lhs, r.rhs, r.margin, r.pass,
          summarize(diag)};
}

CsvRow error_row(const std::string& relation, const QuadratureOp& a, const QuadratureOp& b, const std::string& item,
                 const std::string& kind, const std::string& message) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {relation, a.modes(), coeff_text(a), coeff_text(b), nan, nan, nan, false,
          "error=" + kind + ": " + message + ";item=" + item};
}

struct Tally {
  std::size_t failures = 0;
  std::size_t resolution_errors = 0;
  std::size_t other_errors = 0;

  int exit_code() const {
    if (resolution_errors > 0) return kResolutionError;
    if (failures > 0 || other_errors > 0) return kCheckFailure;
    return kOk;
  }
  json to_json() const {
    return {{"failures", failures}, {"resolution_errors", resolution_errors}, {"other_errors", other_errors}};
  }
};

json base_report(const RunConfig& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "cventropic"},
          {"tool_version", tool_version()},
          {"command", to_string(cfg.command)},
          {"config", cfg.echo()}};
}

std::vector<PairSpec> pairs_or_default(const RunConfig& cfg) {
  if (!cfg.pairs.empty()) return cfg.pairs;
  const std::size_t n = cfg.grid.axes;
  return {{QuadratureOp::position(0, n), QuadratureOp::momentum(0, n)}};
}

std::vector<double> random_unit_coeffs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> c(2 * n);
  for (auto& v : c) v = unit(rng);
  return c;
}

std::vector<GaussianMode> random_modes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<GaussianMode> modes(n);
  for (auto& m : modes) {
    m.center_x = unit(rng);
    m.center_p = unit(rng);
    m.squeeze = std::exp(0.7 * unit(rng));
    m.rotation = pi * unit(rng);
  }
  return modes;
}

double l2_distance(std::span<const Complex> a, std::span<const Complex> b, double cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * cell);
}

double l1_distance(const GriddedDensity& a, const GriddedDensity& b) {
  if (a.mass.size() != b.mass.size() || std::abs(a.spacing - b.spacing) > 1e-12 * a.spacing ||
      std::abs(a.support_min - b.support_min) > 1e-9) {
    throw DomainError("densities live on different bins");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return s * a.spacing;
}

/// One selftest measurement: error against a tolerance.
struct Check {
  std::string name;
  std::size_t trial = 0;
  std::string detail;
  double error = 0.0;
  double tolerance = 0.0;
  std::string failure;  // exception text
  bool resolution = false;
};

template <typename Fn>
Check measure(std::string name, std::size_t trial, double tolerance, Fn fn) {
  Check c{std::move(name), trial, {}, 0.0, tolerance, {}, false};
  try {
    fn(c);
  } catch (const ResolutionError& e) {
    c.failure = e.what();
    c.resolution = true;
  } catch (const Error& e) {
    c.failure = e.what();
  }
  return c;
}

}  // namespace

RunResult run_selftest(const RunConfig& cfg) {
  const GridSpec line{cfg.grid.points_per_axis, cfg.grid.half_extent, 1};
  const std::size_t n = cfg.grid.axes;
  const auto& st = cfg.selftest;

  std::vector<std::function<Check()>> jobs;
  for (std::size_t t = 0; t < st.frft_trials; ++t) {
    jobs.emplace_back([&, t] {
      return measure("frft_additivity", t, 1e-5, [&](Check& c) {
        auto rng = stream_rng(cfg.seed, kSelftest, 1000 + t);
        std::uniform_real_distribution<double> angle(-pi, pi);
        const double t1 = angle(rng), t2 = angle(rng);
        const auto psi = make_gaussian(line, random_modes(rng, 1));
        const auto two = frft_apply(frft_apply(psi, 0, t2), 0, t1);
        const auto one = frft_apply(psi, 0, t1 + t2);
        c.error = l2_distance(two.amplitudes(), one.amplitudes(), line.spacing());
        c.detail = "theta1=" + json(t1).dump() + ";theta2=" + json(t2).dump();
      });
    });
    jobs.emplace_back([&, t] {
      return measure("frft_unitarity", t, 1e-6, [&](Check& c) {
        auto rng = stream_rng(cfg.seed, kSelftest, 2000 + t);
        std::uniform_real_distribution<double> angle(-pi, pi);
        const double theta = angle(rng);
        const auto psi = make_gaussian(line, random_modes(rng, 1));
        std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
        FrftPlan::cached(line, theta)->apply_line(amps);
        double norm = 0.0;
        for (const auto& a : amps) norm += std::norm(a);
        c.error = std::abs(norm * line.spacing() - 1.0);
        c.detail = "theta=" + json(theta).dump();
      });
    });
  }
  for (std::size_t t = 0; t < st.fourier_trials; ++t) {
    jobs.emplace_back([&, t] {
      return measure("frft_fourier_agreement", t, 1e-8, [&](Check& c) {
        auto rng = stream_rng(cfg.seed, kSelftest, 3000 + t);
        const auto psi = make_gaussian(line, random_modes(rng, 1));
        c.error = l2_distance(frft_apply(psi, 0, 0.5 * pi).amplitudes(), fourier_apply(psi, 0).amplitudes(),
                              line.spacing());
      });
    });
  }
  const double scales[] = {0.5, 2.0, std::numbers::e};
  for (std::size_t t = 0; t < st.entropy_trials; ++t) {
    for (double c_scale : scales) {
      jobs.emplace_back([&, t, c_scale] {
        return measure("entropy_scaling", t, 5e-4, [&](Check& c) {
          auto rng = stream_rng(cfg.seed, kSelftest, 4000 + t);
          const auto psi = make_gaussian(line, random_modes(rng, 1));
          const QuadratureOp a(random_unit_coeffs(rng, 1));
          const double h = differential_entropy(distribution_of(psi, a)).value;
          const double hc = differential_entropy(distribution_of(psi, c_scale * a)).value;
          c.error = std::abs(hc - h - std::log(c_scale));
          c.detail = "c=" + json(c_scale).dump();
        });
      });
    }
  }
  for (std::size_t t = 0; t < st.invariance_trials; ++t) {
    jobs.emplace_back([&, t] {
      return measure("commutator_invariance", t, 1e-12, [&](Check& c) {
        auto rng = stream_rng(cfg.seed, kSelftest, 5000 + t);
        std::uniform_real_distribution<double> angle(-pi, pi);
        const QuadratureOp a(random_unit_coeffs(rng, n)), b(random_unit_coeffs(rng, n));
        std::vector<double> angles(n);
        for (auto& v : angles) v = angle(rng);
        double err = std::abs(commutator_value(local_rotate(a, angles), local_rotate(b, angles)) - commutator_value(a, b));
        if (n == 2) {
          const Eigen::MatrixXd r = rotation_matrix(angle(rng));
          err = std::max(err, std::abs(commutator_value(global_rotate(a, r), global_rotate(b, r)) - commutator_value(a, b)));
        }
        c.error = err;
      });
    });
    jobs.emplace_back([&, t] {
      return measure("local_rotation_invariance", t, 1e-4, [&](Check& c) {
        auto rng = stream_rng(cfg.seed, kSelftest, 6000 + t);
        std::uniform_real_distribution<double> angle(-pi, pi);
        const auto psi = make_gaussian(cfg.grid, random_modes(rng, n));
        const QuadratureOp a(random_unit_coeffs(rng, n));
        std::vector<double> angles(n);
        auto rotated = psi;
        for (std::size_t i = 0; i < n; ++i) {
          angles[i] = angle(rng);
          rotated = frft_apply(rotated, i, angles[i]);
        }
        c.error = l1_distance(distribution_of(rotated, local_rotate(a, angles)), distribution_of(psi, a));
      });
    });
    if (n == 2) {
      jobs.emplace_back([&, t] {
        return measure("global_rotation_invariance", t, 1e-3, [&](Check& c) {
          auto rng = stream_rng(cfg.seed, kSelftest, 7000 + t);
          std::uniform_real_distribution<double> angle(-pi, pi);
          const auto psi = make_gaussian(cfg.grid, random_modes(rng, n));
          const QuadratureOp a(random_unit_coeffs(rng, n));
          const double alpha = angle(rng);
          const auto moved = rotate_state(psi, alpha);
          c.error = l1_distance(distribution_of(moved, global_rotate(a, rotation_matrix(alpha))), distribution_of(psi, a));
          c.detail = "alpha=" + json(alpha).dump();
        });
      });
    }
  }

  const auto checks = parallel_map(jobs.size(), cfg.workers, [&](std::size_t i) { return jobs[i](); });

  RunResult result;
  result.report = base_report(cfg);
  Tally tally;
  json records = json::array();
  const QuadratureOp none(std::vector<double>(2 * n, 0.0));
  for (const auto& c : checks) {
    const bool ok = c.failure.empty() && c.error <= c.tolerance;
    json rec = {{"check", c.name}, {"trial", c.trial}, {"error", number(c.error)}, {"tolerance", c.tolerance},
                {"margin", number(c.tolerance - c.error)}, {"pass", ok}};
    if (!c.detail.empty()) rec["detail"] = c.detail;
    std::string summary = "trial=" + std::to_string(c.trial);
    if (!c.detail.empty()) summary += ";" + c.detail;
    if (!c.failure.empty()) {
      rec["error_message"] = c.failure;
      rec["error"] = nullptr;
      rec["margin"] = nullptr;
      summary += std::string(";error=") + (c.resolution ? "resolution: " : "") + c.failure;
      (c.resolution ? tally.resolution_errors : tally.other_errors)++;
    } else if (!ok) {
      tally.failures++;
    }
    records.push_back(rec);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool err = !c.failure.empty();
    result.rows.push_back({c.name, n, "", "", err ? nan : c.error, c.tolerance, err ? nan : c.tolerance - c.error, ok,
                           summary});
  }
  result.report["summary"] = tally.to_json();
  result.report["summary"]["checks"] = checks.size();
  result.report["records"] = std::move(records);
  result.exit_code = tally.exit_code();
  return result;
}

RunResult run_verify(const RunConfig& cfg) {
  const auto items = expand_states(cfg);
  const auto pairs = pairs_or_default(cfg);
  struct Outcome {
    json record;
    std::vector<CsvRow> rows;
    Tally tally;
  };
  const std::size_t total = items.size() * pairs.size();
  const auto outcomes = parallel_map(total, cfg.workers, [&](std::size_t k) {
    const auto& item = items[k / pairs.size()];
    const auto& pair = pairs[k % pairs.size()];
    Outcome out;
    out.record = {{"state", item.descriptor}, {"state_spec", item.spec}, {"pair", pair_json(pair.a, pair.b)}};
    json reports = json::array();
    const char* relations[] = {"entropic", "robertson", "covariance_psd", "entropy_variance_chain"};
    std::optional<PureEnsemble> state;
    std::string build_error;
    bool build_resolution = false;
    try {
      state.emplace(build_state(item.spec, cfg.grid));
    } catch (const ResolutionError& e) {
      build_error = e.what();
      build_resolution = true;
    } catch (const Error& e) {
      build_error = e.what();
    }
    for (std::size_t r = 0; r < 4; ++r) {
      try {
        if (!state) {
          if (build_resolution) throw ResolutionError(build_error);
          throw DomainError(build_error);
        }
        BoundReport rep;
        switch (r) {
          case 0:
            rep = check_entropic(*state, pair.a, pair.b);
            break;
          case 1:
            rep = check_robertson(*state, pair.a, pair.b);
            break;
          case 2:
            rep = check_covariance_psd(covariance_of(*state));
            break;
          default:
            rep = check_chain(*state, pair.a, pair.b);
            break;
        }
        if (!rep.pass) out.tally.failures++;
        reports.push_back(report_json(rep));
        out.rows.push_back(report_row(rep, pair.a, pair.b, item.descriptor));
      } catch (const ResolutionError& e) {
        out.tally.resolution_errors++;
        reports.push_back({{"relation", relations[r]}, {"pass", false}, {"error", std::string("resolution: ") + e.what()}});
        out.rows.push_back(error_row(relations[r], pair.a, pair.b, item.descriptor, "resolution", e.what()));
      } catch (const Error& e) {
        out.tally.other_errors++;
        reports.push_back({{"relation", relations[r]}, {"pass", false}, {"error", e.what()}});
        out.rows.push_back(error_row(relations[r], pair.a, pair.b, item.descriptor, "domain", e.what()));
      }
    }
    out.record["reports"] = std::move(reports);
    return out;
  });

  RunResult result;
  result.report = base_report(cfg);
  Tally tally;
  json records = json::array();
  for (const auto& o : outcomes) {
    records.push_back(o.record);
    result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
    tally.failures += o.tally.failures;
    tally.resolution_errors += o.tally.resolution_errors;
    tally.other_errors += o.tally.other_errors;
  }
  result.report["summary"] = tally.to_json();
  result.report["summary"]["items"] = total;
  result.report["summary"]["rows"] = result.rows.size();
  result.report["records"] = std::move(records);
  result.exit_code = tally.exit_code();
  return result;
}

RunResult run_saturate(const RunConfig& cfg) {
  const auto pairs = pairs_or_default(cfg);
  RunResult result;
  result.report = base_report(cfg);
  Tally tally;
  json records = json::array();
  const StateFamily family{cfg.optimizer.family, cfg.grid.axes, cfg.optimizer.components, cfg.grid};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [a, b] = pairs[k];
    const std::string item = "pair#" + std::to_string(k);
    json rec = {{"pair", pair_json(a, b)}, {"family", to_string(family.id)}};
    const double rhs = entropic_rhs(a, b);
    rec["rhs"] = number(rhs);

    const bool degenerate = !std::isfinite(rhs);
    const double gap_tol = cfg.optimizer.gap_tolerance;
    // A route attains the bound when its gap lies in [-tol, gap_tol]; a row
    // passes when it does not fall below the bound.
    auto attains = [&](double gap) { return std::isfinite(gap) && gap <= gap_tol && gap >= -tolerance::entropic; };
    bool attained = degenerate, violated = false, optimizer_resolution = false;

    MinimizeSettings settings;
    settings.budget = cfg.optimizer.budget;
    settings.restarts = cfg.optimizer.restarts;
    settings.workers = cfg.workers;
    settings.seed = stream_rng(cfg.seed, kSaturate, k)();
    try {
      const auto opt = minimize(family, a, b, settings);
      const bool hit = attains(opt.gap_to_bound);
      const bool ok = degenerate || !(opt.gap_to_bound < -tolerance::entropic);
      attained = attained || hit;
      violated = violated || !ok;
      json restarts = json::array();
      for (double v : opt.restart_values) restarts.push_back(number(v));
      rec["optimizer"] = {{"best_value", number(opt.best_value)}, {"best_params", opt.best_params},
                          {"gap_to_bound", number(opt.gap_to_bound)}, {"evaluations", opt.evaluations},
                          {"budget_exhausted", opt.budget_exhausted}, {"restart_values", restarts},
                          {"attained", hit}, {"pass", ok}};
      std::map<std::string, std::string> diag{{"method", "optimizer"},
                                              {"attained", hit ? "true" : "false"},
                                              {"evaluations", std::to_string(opt.evaluations)},
                                              {"budget_exhausted", opt.budget_exhausted ? "true" : "false"},
                                              {"item", item}};
      if (degenerate) diag["degenerate"] = "commuting pair: bound unbounded below";
      result.rows.push_back({"entropic", a.modes(), coeff_text(a), coeff_text(b), opt.best_value, rhs,
                             opt.gap_to_bound, ok, summarize(diag)});
    } catch (const ResolutionError& e) {
      optimizer_resolution = true;
      rec["optimizer"] = {{"error", std::string("resolution: ") + e.what()}, {"pass", false}};
      result.rows.push_back(error_row("entropic", a, b, item, "resolution", e.what()));
    } catch (const Error& e) {
      tally.other_errors++;
      rec["optimizer"] = {{"error", e.what()}, {"pass", false}};
      result.rows.push_back(error_row("entropic", a, b, item, "domain", e.what()));
    }

    if (!degenerate) {
      try {
        const auto state = saturating_state(a, b, cfg.grid);
        auto rep = check_entropic(state, a, b);
        const bool hit = attains(rep.margin);
        attained = attained || hit;
        violated = violated || !rep.pass;
        rep.note("method", "construction");
        rep.note("attained", hit ? "true" : "false");
        rec["construction"] = report_json(rep);
        rec["construction"]["attained"] = hit;
        result.rows.push_back(report_row(rep, a, b, item));
      } catch (const ResolutionError& e) {
        rec["construction"] = {{"error", std::string("resolution: ") + e.what()}};
      }
    }
    rec["attained"] = attained;
    if (violated) {
      tally.failures++;
    } else if (!attained) {
      if (optimizer_resolution) {
        tally.resolution_errors++;
      } else {
        tally.failures++;
      }
    }
    records.push_back(std::move(rec));
  }
  result.report["summary"] = tally.to_json();
  result.report["summary"]["pairs"] = pairs.size();
  result.report["records"] = std::move(records);
  result.exit_code = tally.exit_code();
  return result;
}

RunResult run_scan(const RunConfig& cfg) {
  const std::size_t n = cfg.grid.axes;
  struct Outcome {
    json record;
    std::vector<CsvRow> rows;
    Tally tally;
  };
  const auto outcomes = parallel_map(cfg.scan.draws, cfg.workers, [&](std::size_t d) {
    auto rng = stream_rng(cfg.seed, kScan, d);
    std::vector<double> ca, cb;
    do {
      ca = random_unit_coeffs(rng, n);
      cb = random_unit_coeffs(rng, n);
    } while (std::abs(commutator_value(QuadratureOp(ca), QuadratureOp(cb))) < 0.05);
    const QuadratureOp a(ca), b(cb);
    const auto modes = random_modes(rng, n);
    json mj = json::array();
    for (const auto& m : modes)
      mj.push_back({{"center_x", m.center_x}, {"center_p", m.center_p}, {"squeeze", m.squeeze}, {"rotation", m.rotation}});
    const std::string item = "draw#" + std::to_string(d);
    Outcome out;
    out.record = {{"draw", d}, {"state_spec", {{"type", "gaussian"}, {"modes", mj}}}, {"pair", pair_json(a, b)}};
    json reports = json::array();
    try {
      const auto state = make_gaussian(cfg.grid, modes);
      for (const auto& rep : {check_entropic(state, a, b), check_robertson(state, a, b)}) {
        if (!rep.pass) out.tally.failures++;
        reports.push_back(report_json(rep));
        out.rows.push_back(report_row(rep, a, b, item));
      }
    } catch (const ResolutionError& e) {
      out.tally.resolution_errors++;
      reports.push_back({{"error", std::string("resolution: ") + e.what()}});
      out.rows.push_back(error_row("entropic", a, b, item, "resolution", e.what()));
    } catch (const Error& e) {
      out.tally.other_errors++;
      reports.push_back({{"error", e.what()}});
      out.rows.push_back(error_row("entropic", a, b, item, "domain", e.what()));
    }
    out.record["reports"] = std::move(reports);
    return out;
  });

  RunResult result;
  result.report = base_report(cfg);
  Tally tally;
  json records = json::array();
  for (const auto& o : outcomes) {
    records.push_back(o.record);
    result.rows.insert(result.rows.end(), o.rows.begin(), o.rows.end());
    tally.failures += o.tally.failures;
    tally.resolution_errors += o.tally.resolution_errors;
    tally.other_errors += o.tally.other_errors;
  }
  result.report["summary"] = tally.to_json();
  result.report["summary"]["draws"] = cfg.scan.draws;
  result.report["records"] = std::move(records);
  result.exit_code = tally.exit_code();
  return result;
}

RunResult run_conjecture(const RunConfig& cfg) {
  RunConfig state_cfg = cfg;
  if (state_cfg.states.empty()) state_cfg.states = json::array({json{{"type", "random"}, {"count", 20}}});
  const auto items = expand_states(state_cfg);
  std::vector<DiagonalObservable> fs, gs;
  for (const auto& f : cfg.conjecture.f) fs.push_back(DiagonalObservable::parse(f, cfg.grid));
  for (const auto& g : cfg.conjecture.g) gs.push_back(DiagonalObservable::parse(g, cfg.grid));

  const auto per_state = parallel_map(items.size(), cfg.workers, [&](std::size_t i) {
    std::vector<ProbeRecord> recs;
    std::optional<PureEnsemble> ensemble;
    std::string failure;
    try {
      ensemble.emplace(build_state(items[i].spec, cfg.grid));
      if (ensemble->members().size() != 1) failure = "conjecture probes need pure states";
    } catch (const Error& e) {
      failure = e.what();
    }
    for (const auto& f : fs) {
      for (const auto& g : gs) {
        if (!failure.empty()) {
          ProbeRecord r;
          r.state_descriptor = items[i].descriptor;
          r.f_descriptor = f.descriptor;
          r.g_descriptor = g.descriptor;
          r.error = failure;
          r.margin = std::numeric_limits<double>::quiet_NaN();
          recs.push_back(std::move(r));
        } else {
          recs.push_back(probe(ensemble->members().front().state, f, g, items[i].descriptor));
        }
      }
    }
    return recs;
  });
  std::vector<ProbeRecord> all;
  for (const auto& v : per_state) all.insert(all.end(), v.begin(), v.end());
  const auto ranked = rank_records(std::move(all));

  RunResult result;
  result.report = base_report(cfg);
  json records = json::array();
  json states = json::array();
  for (const auto& it : items) states.push_back({{"state", it.descriptor}, {"state_spec", it.spec}});
  std::size_t errors = 0, low = 0, trivial = 0, negative = 0;
  for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
    const auto& r = ranked[rank];
    json rec = {{"rank", rank},
                {"state", r.state_descriptor},
                {"f", r.f_descriptor},
                {"g", r.g_descriptor},
                {"entropy_a", number(r.entropy_a)},
                {"entropy_b", number(r.entropy_b)},
                {"commutator_expectation", number(r.commutator_expectation)},
                {"rhs", number(r.rhs)},
                {"margin", number(r.margin)},
                {"low_confidence", r.low_confidence},
                {"trivially_satisfied", r.trivially_satisfied}};
    if (!r.error.empty()) rec["error"] = r.error;
    records.push_back(std::move(rec));
    errors += !r.error.empty();
    low += r.low_confidence;
    trivial += r.trivially_satisfied;
    negative += r.error.empty() && r.margin < -tolerance::entropic;

    std::map<std::string, std::string> diag{{"state", r.state_descriptor},
                                            {"rank", std::to_string(rank)},
                                            {"commutator_expectation", json(number(r.commutator_expectation)).dump()},
                                            {"H_A", json(number(r.entropy_a)).dump()},
                                            {"H_B", json(number(r.entropy_b)).dump()},
                                            {"low_confidence", r.low_confidence ? "true" : "false"}};
    if (r.trivially_satisfied) diag["trivially_satisfied"] = "true";
    if (!r.error.empty()) diag["error"] = r.error;
    const bool pass = r.error.empty() && (r.trivially_satisfied || r.margin >= -tolerance::entropic);
    result.rows.push_back({"conjecture", 1, r.f_descriptor, r.g_descriptor, r.entropy_a + r.entropy_b, r.rhs, r.margin,
                           pass, summarize(diag)});
  }
  result.report["summary"] = {{"records", ranked.size()},
                              {"errors", errors},
                              {"low_confidence", low},
                              {"trivially_satisfied", trivial},
                              {"below_rhs", negative}};
  result.report["states"] = std::move(states);
  result.report["records"] = std::move(records);
  result.exit_code = kOk;
  return result;
}

RunResult run_command(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::selftest:
      return run_selftest(cfg);
    case Command::verify:
      return run_verify(cfg);
    case Command::saturate:
      return run_saturate(cfg);
    case Command::scan:
      return run_scan(cfg);
    case Command::conjecture:
      return run_conjecture(cfg);
  }
  throw ConfigError("unknown command");
}

}  // namespace cventropic::cli
