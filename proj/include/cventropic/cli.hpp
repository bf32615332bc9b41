#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cventropic/optimize.hpp"
#include "cventropic/quadrature.hpp"
#include "cventropic/qstate.hpp"
#include "json.hpp"

namespace cventropic::cli {

inline constexpr const char* kSchemaVersion = "1.0";
const char* tool_version();

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kConfigError = 2, kResolutionError = 3 };

enum class Command { selftest, verify, saturate, scan, conjecture };
std::string to_string(Command c);
Command command_from_string(const std::string& name);

struct PairSpec {
  QuadratureOp a;
  QuadratureOp b;
};

struct OptimizerConfig {
  FamilyId family = FamilyId::gaussian;
  std::size_t components = 1;
  std::size_t budget = 2000;
  std::size_t restarts = 4;
  double gap_tolerance = 0.02;
};

struct SelftestConfig {
  std::size_t frft_trials = 50;
  std::size_t fourier_trials = 5;
  std::size_t entropy_trials = 20;
  std::size_t invariance_trials = 20;
};

struct ScanConfig {
  std::size_t draws = 50;
};

struct ConjectureConfig {
  std::vector<std::string> f{"x", "x^2", "x^3"};
  std::vector<std::string> g{"p", "p^2"};
};

/// Everything a run needs. The state list is kept in its JSON form and expanded
/// (random draws included) by expand_states.
struct RunConfig {
  Command command = Command::selftest;
  GridSpec grid = GridSpec::desk_1d();
  std::vector<PairSpec> pairs;
  nlohmann::json states = nlohmann::json::array();
  OptimizerConfig optimizer;
  SelftestConfig selftest;
  ScanConfig scan;
  ConjectureConfig conjecture;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  std::string out_dir = "cventropic_out";

  /// Canonical echo of the effective configuration, written into every report.
  nlohmann::json echo() const;
};

/// Values given on the command line; they win over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;
};

/// Name of the environment variable that may override the output directory.
inline constexpr const char* kOutDirEnv = "CVENTROPIC_OUT_DIR";

/// Parses and validates a JSON config. Throws ConfigError on malformed JSON,
/// unknown keys, wrong types, or operator/grid dimension mismatch.
RunConfig parse_config(const std::string& text, Command command);

/// Applies, in increasing precedence, the config file, the environment
/// override and the command-line flags.
void apply_overrides(RunConfig& cfg, const Overrides& o, const char* env_out_dir);

/// One named state of a run. Random draws are already expanded into explicit
/// specs, so the report records exactly which states were used.
struct StateItem {
  std::string descriptor;
  nlohmann::json spec;
};

/// Expands random draws into individual items; deterministic in cfg.seed.
std::vector<StateItem> expand_states(const RunConfig& cfg);

/// Builds one state spec. May throw ResolutionError or DomainError.
PureEnsemble build_state(const nlohmann::json& spec, const GridSpec& grid);

/// One CSV row. Fixed columns, see kCsvHeader.
struct CsvRow {
  std::string relation_id;
  std::size_t n = 0;
  std::string coeffs_a;
  std::string coeffs_b;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::string diagnostics_summary;
};

inline constexpr const char* kCsvHeader =
    "relation_id,n,coeffs_A,coeffs_B,lhs,rhs,margin,pass,diagnostics_summary";

std::string to_csv(const std::vector<CsvRow>& rows);

struct RunResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::vector<CsvRow> rows;
};

RunResult run_selftest(const RunConfig& cfg);
RunResult run_verify(const RunConfig& cfg);
RunResult run_saturate(const RunConfig& cfg);
RunResult run_scan(const RunConfig& cfg);
RunResult run_conjecture(const RunConfig& cfg);
RunResult run_command(const RunConfig& cfg);

/// Writes <out>/<command>.json and <out>/<command>.csv.
void write_reports(const RunConfig& cfg, const RunResult& result);

/// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace cventropic::cli
