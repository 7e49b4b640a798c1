#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdsense/csv.hpp"
#include "fdsense/detector_math.hpp"
#include "fdsense/vanet.hpp"
#include "fdsense/waveform.hpp"

namespace fdsense {

inline constexpr std::uint64_t kDefaultSeed = 20180601;
inline constexpr std::uint64_t kDefaultTrials = 100000;

enum class Command {
  Thresholds,
  Roc,
  Validate,
  Sensitivity,
  SicSweep,
  SensingTimeSweep,
  Fluctuation,
  Vanet,
};

Command parse_command(std::string_view name);
std::string_view to_string(Command c);

/// The full parameter document with every key at its default. It doubles as
/// the schema: a key absent here is rejected.
nlohmann::json default_parameters();

/// Applies a config document and then `section.key=value` overrides on top of
/// the defaults. Values are parsed as JSON when possible, otherwise taken as
/// strings. Throws ConfigError on unknown keys or type mismatches.
nlohmann::json resolve_parameters(const nlohmann::json& document,
                                  std::span<const std::string> overrides);

struct RunConfig {
  Command command = Command::Thresholds;
  nlohmann::json parameters = default_parameters();
  std::optional<std::string> output_path;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t trials = kDefaultTrials;
};

// Typed views of the resolved document.
DetectorConfig detector_from(const nlohmann::json& parameters);
Modulation modulation_from(const nlohmann::json& parameters);
TargetProbabilities targets_from(const nlohmann::json& parameters);
VanetScenario vanet_scenario_from(const nlohmann::json& parameters, std::uint64_t seed);

struct RunOutput {
  CsvTable table;
  // Extra table and its destination, e.g. the VANET per-density summary.
  std::optional<CsvTable> secondary;
  std::optional<std::string> secondary_path;
};

/// Runs one command. Library errors propagate unchanged.
RunOutput execute(const RunConfig& config);

}  // namespace fdsense
