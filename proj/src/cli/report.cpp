#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cventropic/cli.hpp"
#include "cventropic/errors.hpp"

namespace cventropic::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
  f << content;
  if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\r\n";
  for (const auto& r : rows) {
    out += csv_field(r.relation_id) + ',' + std::to_string(r.n) + ',' + csv_field(r.coeffs_a) + ',' +
           csv_field(r.coeffs_b) + ',' + format_double(r.lhs) + ',' + format_double(r.rhs) + ',' +
           format_double(r.margin) + ',' + (r.pass ? "true" : "false") + ',' + csv_field(r.diagnostics_summary) +
           "\r\n";
  }
  return out;
}

void write_reports(const RunConfig& cfg, const RunResult& result) {
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  const std::string name = to_string(cfg.command);
  auto report = result.report;
  report["exit_code"] = result.exit_code;
  write_file(dir / (name + ".json"), report.dump(2) + "\n");
  write_file(dir / (name + ".csv"), to_csv(result.rows));
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Entropic uncertainty relations for continuous-variable quadratures", "cventropic"};
  app.set_version_flag("--version", std::string(tool_version()));
  std::string command_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;
  app.add_option("command", command_name, "selftest | verify | saturate | scan | conjecture")
      ->required()
      ->check(CLI::IsMember({"selftest", "verify", "saturate", "scan", "conjecture"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", out_dir, "output directory (overrides config and " + std::string(kOutDirEnv) + ")");
  app.add_option("--workers", workers, "number of worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(read_file(config_path), command_from_string(command_name));
    apply_overrides(cfg, Overrides{seed, out_dir, workers}, std::getenv(kOutDirEnv));
  } catch (const Error& e) {
    std::cerr << "cventropic: config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto result = run_command(cfg);
    write_reports(cfg, result);
    std::cout << command_name << ": " << result.rows.size() << " rows, exit " << result.exit_code << ", reports in "
              << cfg.out_dir << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "cventropic: " << e.what() << "\n";
    return kConfigError;
  } catch (const ResolutionError& e) {
    std::cerr << "cventropic: resolution error: " << e.what() << "\n";
    return kResolutionError;
  } catch (const Error& e) {
    std::cerr << "cventropic: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace cventropic::cli
