#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fdsense/errors.hpp"
#include "fdsense/run_config.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInfeasible = 3, kIoError = 4 };

nlohmann::json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fdsense::IoError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw fdsense::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_table(const fdsense::CsvTable& table, const std::optional<std::string>& path) {
  if (!path) {
    fdsense::write_csv(std::cout, table);
    std::cout.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw fdsense::IoError("cannot open output file '" + *path + "'");
  fdsense::write_csv(out, table);
  out.close();
  if (!out) throw fdsense::IoError("failed writing output file '" + *path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-detection sensing for full-duplex V2V links"};
  std::string command;
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = fdsense::kDefaultSeed;
  std::uint64_t trials = fdsense::kDefaultTrials;
  std::vector<std::string> overrides;

  app.add_option("command", command,
                 "thresholds | roc | validate | sensitivity | sic-sweep | sensing-time-sweep | "
                 "fluctuation | vanet")
      ->required();
  app.add_option("overrides", overrides, "section.key=value parameter overrides");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "output CSV path (stdout when omitted)");
  app.add_option("--seed", seed, "base random seed");
  app.add_option("--trials", trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    fdsense::RunConfig config;
    config.command = fdsense::parse_command(command);
    const nlohmann::json document = config_path.empty() ? nlohmann::json() : read_document(config_path);
    config.parameters = fdsense::resolve_parameters(document, overrides);
    if (!out_path.empty()) config.output_path = out_path;
    config.seed = seed;
    config.trials = trials;

    const fdsense::RunOutput result = fdsense::execute(config);
    write_table(result.table, config.output_path);
    if (result.secondary) write_table(*result.secondary, result.secondary_path);
    return kOk;
  } catch (const fdsense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fdsense::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fdsense::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const fdsense::RangeError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const fdsense::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
