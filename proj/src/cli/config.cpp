#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "cventropic/cli.hpp"
#include "cventropic/conjecture.hpp"
#include "cventropic/errors.hpp"

namespace cventropic::cli {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  require(obj.is_object(), where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    require(allowed.count(key) > 0, "unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  require(v.is_number(), where + "." + key + " must be a number");
  const double d = v.get<double>();
  require(std::isfinite(d), where + "." + key + " must be finite");
  return d;
}

std::size_t get_count(const json& obj, const std::string& key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  require(v.is_number_integer() && v.get<long long>() >= 0, where + "." + key + " must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> get_coefficients(const json& v, const std::string& where) {
  require(v.is_array() && !v.empty(), where + " must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    require(x.is_number(), where + " must contain numbers only");
    out.push_back(x.get<double>());
    require(std::isfinite(out.back()), where + " must contain finite numbers");
  }
  return out;
}

json gaussian_mode_json(const GaussianMode& m) {
  return {{"center_x", m.center_x}, {"center_p", m.center_p}, {"squeeze", m.squeeze}, {"rotation", m.rotation}};
}

GaussianMode parse_mode(const json& v, const std::string& where) {
  check_keys(v, {"center_x", "center_p", "squeeze", "rotation"}, where);
  GaussianMode m;
  m.center_x = get_number(v, "center_x", 0.0, where);
  m.center_p = get_number(v, "center_p", 0.0, where);
  m.squeeze = get_number(v, "squeeze", 1.0, where);
  m.rotation = get_number(v, "rotation", 0.0, where);
  require(m.squeeze > 0.0, where + ".squeeze must be positive");
  return m;
}

std::vector<GaussianMode> parse_modes(const json& spec, std::size_t axes, const std::string& where) {
  if (!spec.contains("modes")) return std::vector<GaussianMode>(axes);
  const auto& arr = spec.at("modes");
  require(arr.is_array() && arr.size() == axes, where + ".modes must list one entry per grid axis");
  std::vector<GaussianMode> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_mode(arr[i], where + ".modes[" + std::to_string(i) + "]"));
  return out;
}

Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
          where + " must be a number or a [re, im] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

void validate_state(const json& spec, std::size_t axes, const std::string& where, bool allow_random) {
  require(spec.is_object() && spec.contains("type") && spec.at("type").is_string(), where + " needs a string 'type'");
  const std::string type = spec.at("type").get<std::string>();
  if (type == "vacuum") {
    check_keys(spec, {"type"}, where);
  } else if (type == "gaussian") {
    check_keys(spec, {"type", "modes"}, where);
    parse_modes(spec, axes, where);
  } else if (type == "hermite") {
    check_keys(spec, {"type", "coefficients"}, where);
    require(axes == 1, where + ": hermite states are one-mode only");
    require(spec.contains("coefficients") && spec.at("coefficients").is_array() && !spec.at("coefficients").empty(),
            where + ".coefficients must be a nonempty array");
    for (const auto& c : spec.at("coefficients")) parse_complex(c, where + ".coefficients");
  } else if (type == "superposition") {
    check_keys(spec, {"type", "terms"}, where);
    require(spec.contains("terms") && spec.at("terms").is_array() && !spec.at("terms").empty(),
            where + ".terms must be a nonempty array");
    for (std::size_t i = 0; i < spec.at("terms").size(); ++i) {
      const auto& t = spec.at("terms")[i];
      const std::string w = where + ".terms[" + std::to_string(i) + "]";
      check_keys(t, {"coefficient", "modes"}, w);
      require(t.contains("coefficient"), w + " needs a coefficient");
      parse_complex(t.at("coefficient"), w + ".coefficient");
      parse_modes(t, axes, w);
    }
  } else if (type == "mixture") {
    check_keys(spec, {"type", "members"}, where);
    require(spec.contains("members") && spec.at("members").is_array() && !spec.at("members").empty(),
            where + ".members must be a nonempty array");
    double total = 0.0;
    for (std::size_t i = 0; i < spec.at("members").size(); ++i) {
      const auto& m = spec.at("members")[i];
      const std::string w = where + ".members[" + std::to_string(i) + "]";
      check_keys(m, {"weight", "state"}, w);
      require(m.contains("weight") && m.at("weight").is_number(), w + ".weight must be a number");
      require(m.contains("state"), w + " needs a state");
      validate_state(m.at("state"), axes, w + ".state", false);
      require(m.at("state").at("type") != "mixture", w + ": nested mixtures are not supported");
      const double weight = m.at("weight").get<double>();
      require(weight > 0.0 && weight <= 1.0, w + ".weight must lie in (0, 1]");
      total += weight;
    }
    require(std::abs(total - 1.0) <= 1e-9, where + ": member weights must sum to 1");
  } else if (type == "random") {
    require(allow_random, where + ": random draws are only allowed at the top level");
    check_keys(spec, {"type", "count", "family", "components", "max_center", "max_log_squeeze"}, where);
    require(spec.contains("count"), where + " needs a count");
    get_count(spec, "count", 0, where);
    if (spec.contains("family")) {
      require(spec.at("family").is_string(), where + ".family must be a string");
      try {
        const auto id = family_from_string(spec.at("family").get<std::string>());
        require(id != FamilyId::hermite_superposition || axes == 1, where + ": hermite family is one-mode only");
      } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    require(get_count(spec, "components", 2, where) >= 1, where + ".components must be at least 1");
    require(get_number(spec, "max_center", 1.0, where) >= 0.0, where + ".max_center must be nonnegative");
    const double ls = get_number(spec, "max_log_squeeze", 1.0, where);
    require(ls >= 0.0 && ls <= std::log(16.0), where + ".max_log_squeeze must lie in [0, ln 16]");
  } else {
    throw ConfigError(where + ": unknown state type '" + type + "'");
  }
}

json random_gaussian_modes(std::mt19937_64& rng, std::size_t axes, double max_center, double max_log_squeeze) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  json modes = json::array();
  for (std::size_t m = 0; m < axes; ++m) {
    GaussianMode g;
    g.center_x = max_center * unit(rng);
    g.center_p = max_center * unit(rng);
    g.squeeze = std::exp(max_log_squeeze * unit(rng));
    g.rotation = std::numbers::pi * unit(rng);
    modes.push_back(gaussian_mode_json(g));
  }
  return modes;
}

json draw_random_state(const json& spec, std::size_t axes, std::mt19937_64& rng) {
  const auto family = family_from_string(spec.value("family", std::string("gaussian")));
  const std::size_t components = spec.value("components", std::size_t{2});
  const double max_center = spec.value("max_center", 1.0);
  const double max_log_squeeze = spec.value("max_log_squeeze", 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  switch (family) {
    case FamilyId::gaussian:
      return {{"type", "gaussian"}, {"modes", random_gaussian_modes(rng, axes, max_center, max_log_squeeze)}};
    case FamilyId::gaussian_mixture: {
      std::vector<double> w(components);
      double total = 0.0;
      for (auto& x : w) total += (x = 0.2 + 0.8 * (0.5 + 0.5 * unit(rng)));
      json members = json::array();
      for (std::size_t k = 0; k < components; ++k) {
        members.push_back({{"weight", w[k] / total},
                           {"state", {{"type", "gaussian"},
                                      {"modes", random_gaussian_modes(rng, axes, max_center, max_log_squeeze)}}}});
      }
      return {{"type", "mixture"}, {"members", members}};
    }
    case FamilyId::hermite_superposition: {
      json coeffs = json::array();
      for (std::size_t k = 0; k < components; ++k) coeffs.push_back({unit(rng), unit(rng)});
      return {{"type", "hermite"}, {"coefficients", coeffs}};
    }
  }
  return {};
}

std::string coefficient_list(std::span<const double> c) {
  json arr = json::array();
  for (double v : c) arr.push_back(v);
  return arr.dump();
}

}  // namespace

const char* tool_version() { return CVENTROPIC_VERSION; }

std::string to_string(Command c) {
  switch (c) {
    case Command::selftest:
      return "selftest";
    case Command::verify:
      return "verify";
    case Command::saturate:
      return "saturate";
    case Command::scan:
      return "scan";
    case Command::conjecture:
      return "conjecture";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (auto c : {Command::selftest, Command::verify, Command::saturate, Command::scan, Command::conjecture})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown command '" + name + "'");
}

RunConfig parse_config(const std::string& text, Command command) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, {"command", "seed", "workers", "out", "grid", "pairs", "states", "optimizer", "selftest", "scan",
                    "conjecture"},
             "config");

  RunConfig cfg;
  cfg.command = command;
  if (root.contains("command")) {
    require(root.at("command").is_string(), "config.command must be a string");
    require(command_from_string(root.at("command").get<std::string>()) == command,
            "config.command does not match the command line");
  }
  if (root.contains("seed")) {
    require(root.at("seed").is_number_unsigned(), "config.seed must be a nonnegative integer");
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }
  cfg.workers = get_count(root, "workers", 1, "config");
  require(cfg.workers >= 1, "config.workers must be at least 1");
  if (root.contains("out")) {
    require(root.at("out").is_string() && !root.at("out").get<std::string>().empty(), "config.out must be a path");
    cfg.out_dir = root.at("out").get<std::string>();
  }

  if (root.contains("grid")) {
    const auto& g = root.at("grid");
    check_keys(g, {"points", "half_extent", "modes"}, "grid");
    const std::size_t modes = get_count(g, "modes", 1, "grid");
    const GridSpec base = modes == 2 ? GridSpec::desk_2d() : GridSpec::desk_1d();
    cfg.grid = {get_count(g, "points", base.points_per_axis, "grid"), get_number(g, "half_extent", base.half_extent, "grid"),
                modes};
  }
  try {
    cfg.grid.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  const std::size_t axes = cfg.grid.axes;

  if (root.contains("pairs")) {
    const auto& arr = root.at("pairs");
    require(arr.is_array(), "config.pairs must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string w = "pairs[" + std::to_string(i) + "]";
      check_keys(arr[i], {"A", "B"}, w);
      require(arr[i].contains("A") && arr[i].contains("B"), w + " needs A and B");
      auto a = get_coefficients(arr[i].at("A"), w + ".A");
      auto b = get_coefficients(arr[i].at("B"), w + ".B");
      require(a.size() % 2 == 0 && b.size() % 2 == 0, w + ": coefficient lists must have even length 2n");
      require(a.size() == 2 * axes && b.size() == 2 * axes,
              w + ": operators act on " + std::to_string(a.size() / 2) + " and " + std::to_string(b.size() / 2) +
                  " modes but the grid has " + std::to_string(axes));
      require(!QuadratureOp(b).is_zero() && !QuadratureOp(a).is_zero(), w + ": operators must be nonzero");
      cfg.pairs.push_back({QuadratureOp(std::move(a)), QuadratureOp(std::move(b))});
    }
  }

  if (root.contains("states")) {
    const auto& arr = root.at("states");
    require(arr.is_array(), "config.states must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) validate_state(arr[i], axes, "states[" + std::to_string(i) + "]", true);
    cfg.states = arr;
  }

  if (root.contains("optimizer")) {
    const auto& o = root.at("optimizer");
    check_keys(o, {"family", "components", "budget", "restarts", "gap_tolerance"}, "optimizer");
    if (o.contains("family")) {
      require(o.at("family").is_string(), "optimizer.family must be a string");
      try {
        cfg.optimizer.family = family_from_string(o.at("family").get<std::string>());
      } catch (const DomainError& e) {
        throw ConfigError(std::string("optimizer: ") + e.what());
      }
    }
    cfg.optimizer.components = get_count(o, "components", cfg.optimizer.components, "optimizer");
    cfg.optimizer.budget = get_count(o, "budget", cfg.optimizer.budget, "optimizer");
    cfg.optimizer.restarts = get_count(o, "restarts", cfg.optimizer.restarts, "optimizer");
    cfg.optimizer.gap_tolerance = get_number(o, "gap_tolerance", cfg.optimizer.gap_tolerance, "optimizer");
    require(cfg.optimizer.components >= 1, "optimizer.components must be at least 1");
    require(cfg.optimizer.restarts >= 1, "optimizer.restarts must be at least 1");
    require(cfg.optimizer.budget >= 100, "optimizer.budget must be at least 100");
    require(cfg.optimizer.family != FamilyId::hermite_superposition || axes == 1,
            "optimizer: hermite_superposition is one-mode only");
  }

  if (root.contains("selftest")) {
    const auto& s = root.at("selftest");
    check_keys(s, {"frft_trials", "fourier_trials", "entropy_trials", "invariance_trials"}, "selftest");
    cfg.selftest.frft_trials = get_count(s, "frft_trials", cfg.selftest.frft_trials, "selftest");
    cfg.selftest.fourier_trials = get_count(s, "fourier_trials", cfg.selftest.fourier_trials, "selftest");
    cfg.selftest.entropy_trials = get_count(s, "entropy_trials", cfg.selftest.entropy_trials, "selftest");
    cfg.selftest.invariance_trials = get_count(s, "invariance_trials", cfg.selftest.invariance_trials, "selftest");
  }

  if (root.contains("scan")) {
    const auto& s = root.at("scan");
    check_keys(s, {"draws"}, "scan");
    cfg.scan.draws = get_count(s, "draws", cfg.scan.draws, "scan");
  }

  if (root.contains("conjecture")) {
    const auto& c = root.at("conjecture");
    check_keys(c, {"f", "g"}, "conjecture");
    auto strings = [&](const char* key, std::vector<std::string>& dst) {
      if (!c.contains(key)) return;
      const auto& arr = c.at(key);
      require(arr.is_array() && !arr.empty(), std::string("conjecture.") + key + " must be a nonempty array");
      dst.clear();
      for (const auto& v : arr) {
        require(v.is_string(), std::string("conjecture.") + key + " must contain strings");
        dst.push_back(v.get<std::string>());
      }
    };
    strings("f", cfg.conjecture.f);
    strings("g", cfg.conjecture.g);
  }
  if (command == Command::conjecture) {
    require(axes == 1, "conjecture probes run on one-mode grids");
    try {
      for (const auto& f : cfg.conjecture.f)
        require(DiagonalObservable::parse(f, cfg.grid).basis == Basis::position,
                "conjecture.f entries must be functions of x: " + f);
      for (const auto& g : cfg.conjecture.g)
        require(DiagonalObservable::parse(g, cfg.grid).basis == Basis::momentum,
                "conjecture.g entries must be functions of p: " + g);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("conjecture: ") + e.what());
    }
  }
  return cfg;
}

json RunConfig::echo() const {
  json pairs_json = json::array();
  for (const auto& p : pairs) {
    pairs_json.push_back({{"A", json::parse(coefficient_list(p.a.coeffs()))}, {"B", json::parse(coefficient_list(p.b.coeffs()))}});
  }
  return {{"command", to_string(command)},
          {"seed", seed},
          {"workers", workers},
          {"out", out_dir},
          {"grid", {{"points", grid.points_per_axis}, {"half_extent", grid.half_extent}, {"modes", grid.axes}}},
          {"pairs", pairs_json},
          {"states", states},
          {"optimizer",
           {{"family", to_string(optimizer.family)},
            {"components", optimizer.components},
            {"budget", optimizer.budget},
            {"restarts", optimizer.restarts},
            {"gap_tolerance", optimizer.gap_tolerance}}},
          {"selftest",
           {{"frft_trials", selftest.frft_trials},
            {"fourier_trials", selftest.fourier_trials},
            {"entropy_trials", selftest.entropy_trials},
            {"invariance_trials", selftest.invariance_trials}}},
          {"scan", {{"draws", scan.draws}}},
          {"conjecture", {{"f", conjecture.f}, {"g", conjecture.g}}}};
}

void apply_overrides(RunConfig& cfg, const Overrides& o, const char* env_out_dir) {
  if (env_out_dir != nullptr && *env_out_dir != '\0') cfg.out_dir = env_out_dir;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("--workers must be at least 1");
    cfg.workers = *o.workers;
  }
}

std::vector<StateItem> expand_states(const RunConfig& cfg) {
  json specs = cfg.states;
  if (specs.empty()) specs = json::array({json{{"type", "vacuum"}}});
  std::vector<StateItem> items;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const std::string type = spec.at("type").get<std::string>();
    if (type != "random") {
      items.push_back({type + "#" + std::to_string(i), spec});
      continue;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 0x57a7e5u,
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const std::size_t count = spec.at("count").get<std::size_t>();
    for (std::size_t k = 0; k < count; ++k) {
      items.push_back({"random#" + std::to_string(i) + "." + std::to_string(k), draw_random_state(spec, cfg.grid.axes, rng)});
    }
  }
  return items;
}

PureEnsemble build_state(const json& spec, const GridSpec& grid) {
  const std::string type = spec.at("type").get<std::string>();
  const std::string where = "state";
  if (type == "vacuum") {
    return PureEnsemble::single(make_gaussian(grid, std::vector<GaussianMode>(grid.axes)));
  }
  if (type == "gaussian") return PureEnsemble::single(make_gaussian(grid, parse_modes(spec, grid.axes, where)));
  if (type == "hermite") {
    std::vector<Complex> c;
    for (const auto& v : spec.at("coefficients")) c.push_back(parse_complex(v, where));
    return PureEnsemble::single(make_hermite_superposition(grid, c));
  }
  if (type == "superposition") {
    std::vector<SuperpositionTerm> terms;
    for (const auto& t : spec.at("terms")) terms.push_back({parse_complex(t.at("coefficient"), where), parse_modes(t, grid.axes, where)});
    return PureEnsemble::single(make_superposition(grid, terms));
  }
  if (type == "mixture") {
    std::vector<PureEnsemble::Member> members;
    for (const auto& m : spec.at("members")) {
      auto inner = build_state(m.at("state"), grid);
      members.push_back({m.at("weight").get<double>(), inner.members().front().state});
    }
    return PureEnsemble(std::move(members));
  }
  throw DomainError("cannot build state of type '" + type + "'");
}

}  // namespace cventropic::cli
