#include "fdsense/run_config.hpp"

#include <cmath>
#include <string>

#include "fdsense/montecarlo.hpp"
#include "fdsense/studies.hpp"

namespace fdsense {

using nlohmann::json;

namespace {

struct CommandName {
  Command command;
  std::string_view name;
};

constexpr CommandName kCommands[] = {
    {Command::Thresholds, "thresholds"},
    {Command::Roc, "roc"},
    {Command::Validate, "validate"},
    {Command::Sensitivity, "sensitivity"},
    {Command::SicSweep, "sic-sweep"},
    {Command::SensingTimeSweep, "sensing-time-sweep"},
    {Command::Fluctuation, "fluctuation"},
    {Command::Vanet, "vanet"},
};

bool compatible(const json& expected, const json& value) {
  if (value.is_null()) return expected.is_null();
  switch (expected.type()) {
    case json::value_t::null:
      return value.is_number() || value.is_string();
    case json::value_t::number_float:
      return value.is_number();
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return value.is_number_integer();
    case json::value_t::boolean:
      return value.is_boolean();
    case json::value_t::string:
      return value.is_string();
    case json::value_t::array: {
      if (!value.is_array()) return false;
      if (expected.empty()) return true;
      for (const json& v : value) {
        if (!compatible(expected.front(), v)) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

void set_value(json& doc, const std::string& section, const std::string& key, const json& value) {
  const json defaults = default_parameters();
  if (!defaults.contains(section)) throw ConfigError("unknown config section '" + section + "'");
  if (!defaults[section].contains(key))
    throw ConfigError("unknown key '" + section + "." + key + "'");
  if (!compatible(defaults[section][key], value)) {
    throw ConfigError("key '" + section + "." + key + "' has the wrong type");
  }
  doc[section][key] = value;
}

json parse_scalar(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
  }
  if (text.find(',') == std::string::npos) return json(text);
  json list = json::array();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    list.push_back(parse_scalar(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return list;
}

double number(const json& section, const char* key) { return section.at(key).get<double>(); }

std::vector<double> numbers(const json& section, const char* key) {
  const json& v = section.at(key);
  if (v.empty()) throw ConfigError(std::string("list '") + key + "' is empty");
  return v.get<std::vector<double>>();
}

std::optional<double> optional_number(const json& section, const char* key) {
  const json& v = section.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> eta_grid(const json& sweep) {
  return arange(number(sweep, "eta_min"), number(sweep, "eta_max"), number(sweep, "eta_step"));
}

std::vector<double> snr_grid(const json& sweep) {
  return arange(number(sweep, "snr_min_db"), number(sweep, "snr_max_db"),
                number(sweep, "snr_step_db"));
}

// Threshold grid in dB; `auto_lo`/`auto_hi`/`auto_points` apply to unset keys.
std::vector<double> threshold_grid(const json& sweep, double auto_lo, double auto_hi,
                                   int auto_points) {
  const double lo = optional_number(sweep, "eps_min_db").value_or(auto_lo);
  const double hi = optional_number(sweep, "eps_max_db").value_or(auto_hi);
  const auto points = optional_number(sweep, "eps_points");
  const int n = points ? static_cast<int>(*points) : auto_points;
  if (!(hi >= lo)) throw ConfigError("threshold grid upper bound is below the lower bound");
  std::vector<double> eps;
  for (double db : linspace(lo, hi, n)) eps.push_back(db_to_linear(db));
  return eps;
}

}  // namespace

Command parse_command(std::string_view name) {
  for (const auto& c : kCommands)
    if (c.name == name) return c.command;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command c) {
  for (const auto& entry : kCommands)
    if (entry.command == c) return entry.name;
  return "?";
}

json default_parameters() {
  return json{
      {"detector",
       {{"num_samples", 1000},
        {"noise_power", 1.0},
        {"snr_self_db", 10.0},
        {"snr_self", nullptr},
        {"snr_other_db", -10.0},
        {"snr_other", nullptr},
        {"sic_factor", 0.1},
        {"modulation", "qpsk"}}},
      {"targets", {{"pd_before", 0.9}, {"pd_during", 0.5}}},
      {"sweep",
       {{"eta_min", 0.0},
        {"eta_max", 0.4},
        {"eta_step", 0.01},
        {"snr_min_db", -20.0},
        {"snr_max_db", 0.0},
        {"snr_step_db", 1.0},
        {"eps_min_db", nullptr},
        {"eps_max_db", nullptr},
        {"eps_points", nullptr},
        {"tau_min", 10e-6},
        {"tau_max", 100e-6},
        {"tau_points", 10},
        {"sample_rate", 20e6},
        {"eta0", 0.2},
        {"fluctuation", 0.1},
        {"vs", "eta"},
        {"grid_num_samples", {400, 1000}},
        {"grid_snr_other_db", {-20.0, -15.0, -10.0, -5.0, 0.0}},
        {"grid_eta", {0.0, 0.1, 0.3}}}},
      {"vanet",
       {{"densities", {0.0, 25.0, 50.0, 75.0, 100.0, 125.0, 150.0, 175.0, 200.0}},
        {"repetitions", 20},
        {"road_length_km", 4.0},
        {"tx_range_km", 1.0},
        {"packet_duration_s", 0.5e-3},
        {"cam_interval_s", 0.1},
        {"sensing_time_s", 20e-6},
        {"sample_rate_hz", 20e6},
        {"sim_duration_s", 10.0},
        {"modes", {"HD", "FD-CD"}},
        {"pf_override", nullptr},
        {"fading", "off"},
        {"edge_snr_db", -10.0},
        {"path_loss_exponent", 3.0},
        {"max_snr_gain_db", 40.0},
        {"sample_level", false},
        {"summary_out", nullptr}}},
  };
}

json resolve_parameters(const json& document, std::span<const std::string> overrides) {
  json doc = default_parameters();
  if (!document.is_null()) {
    if (!document.is_object()) throw ConfigError("config document must be a JSON object");
    for (const auto& [section, body] : document.items()) {
      if (!doc.contains(section)) throw ConfigError("unknown config section '" + section + "'");
      if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) set_value(doc, section, key, value);
    }
  }
  for (const std::string& item : overrides) {
    const std::size_t eq = item.find('=');
    const std::size_t dot = item.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override '" + item + "' is not of the form section.key=value");
    }
    const std::string section = item.substr(0, dot);
    const std::string key = item.substr(dot + 1, eq - dot - 1);
    json value = parse_override_value(item.substr(eq + 1));
    // A single item given for a list key becomes a one-element list.
    if (doc.contains(section) && doc[section].contains(key) && doc[section][key].is_array() &&
        !value.is_array()) {
      value = json::array({value});
    }
    set_value(doc, section, key, value);
  }
  return doc;
}

DetectorConfig detector_from(const json& parameters) {
  const json& d = parameters.at("detector");
  DetectorConfig cfg;
  cfg.num_samples = d.at("num_samples").get<int>();
  cfg.noise_power = number(d, "noise_power");
  cfg.snr_self = optional_number(d, "snr_self").value_or(db_to_linear(number(d, "snr_self_db")));
  cfg.snr_other =
      optional_number(d, "snr_other").value_or(db_to_linear(number(d, "snr_other_db")));
  cfg.sic_factor = number(d, "sic_factor");
  cfg.validate();
  return cfg;
}

Modulation modulation_from(const json& parameters) {
  return parse_modulation(parameters.at("detector").at("modulation").get<std::string>());
}

TargetProbabilities targets_from(const json& parameters) {
  const json& t = parameters.at("targets");
  TargetProbabilities targets{number(t, "pd_before"), number(t, "pd_during")};
  targets.validate();
  return targets;
}

VanetScenario vanet_scenario_from(const json& parameters, std::uint64_t seed) {
  const json& v = parameters.at("vanet");
  VanetScenario s;
  s.road_length = number(v, "road_length_km");
  s.tx_range = number(v, "tx_range_km");
  s.packet_duration = number(v, "packet_duration_s");
  s.cam_interval = number(v, "cam_interval_s");
  s.sensing_time = number(v, "sensing_time_s");
  s.sample_rate = number(v, "sample_rate_hz");
  s.sim_duration = number(v, "sim_duration_s");
  s.detector = detector_from(parameters);
  s.targets = targets_from(parameters);
  s.pf_override = optional_number(v, "pf_override");
  s.fading = parse_fading(v.at("fading").get<std::string>());
  s.edge_snr_db = number(v, "edge_snr_db");
  s.path_loss_exponent = number(v, "path_loss_exponent");
  s.max_snr_gain_db = number(v, "max_snr_gain_db");
  s.sample_level = v.at("sample_level").get<bool>();
  s.seed = seed;
  s.validate();
  return s;
}

RunOutput execute(const RunConfig& config) {
  const json& p = config.parameters;
  const json& sweep = p.at("sweep");
  const DetectorConfig detector = detector_from(p);
  const TargetProbabilities targets = targets_from(p);
  MonteCarloOptions mc;
  mc.modulation = modulation_from(p);

  RunOutput out;
  switch (config.command) {
    case Command::Thresholds: {
      const auto etas = eta_grid(sweep);
      out.table = thresholds_table(detector, targets, etas);
      break;
    }
    case Command::Roc: {
      const auto eps = threshold_grid(sweep, 0.0, 1.5, 151);
      out.table = roc_table(detector, eps);
      break;
    }
    case Command::Validate: {
      std::vector<GridPoint> grid;
      for (double n : numbers(sweep, "grid_num_samples"))
        for (double db : numbers(sweep, "grid_snr_other_db"))
          for (double eta : numbers(sweep, "grid_eta")) {
            DetectorConfig c = detector.with_num_samples(static_cast<int>(n))
                                   .with_snr_other(db_to_linear(db))
                                   .with_sic_factor(eta);
            c.validate();
            grid.push_back({c, targets});
          }
      out.table = validation_table(validate_grid(grid, config.trials, config.seed, mc));
      break;
    }
    case Command::Sensitivity: {
      const double centre =
          linear_to_db(detector.snr_other + detector.residual_si_snr() + 1) +
          linear_to_db(detector.noise_power);
      const auto eps = threshold_grid(sweep, centre - 0.1, centre + 0.1, 11);
      const auto rows = threshold_sensitivity(detector, eps, config.trials, config.seed, mc);
      out.table = sensitivity_table(rows);
      break;
    }
    case Command::SicSweep: {
      const std::string vs = sweep.at("vs").get<std::string>();
      if (vs == "eta") {
        const auto etas = eta_grid(sweep);
        out.table = sic_sweep_table(sic_sweep(detector, targets.target_pd_during, etas));
      } else if (vs == "snr") {
        const auto snrs = snr_grid(sweep);
        out.table = strategy_table(compare_fixed_vs_dynamic(detector, targets, snrs));
      } else {
        throw ConfigError("sweep.vs must be 'eta' or 'snr'");
      }
      break;
    }
    case Command::SensingTimeSweep: {
      const auto taus = linspace(number(sweep, "tau_min"), number(sweep, "tau_max"),
                                 sweep.at("tau_points").get<int>());
      out.table = sensing_time_table(
          sensing_time_sweep(detector, targets, number(sweep, "sample_rate"), taus));
      break;
    }
    case Command::Fluctuation: {
      const auto snrs = snr_grid(sweep);
      out.table = fluctuation_table(fluctuation_sweep(detector, targets.target_pd_during,
                                                      number(sweep, "eta0"),
                                                      number(sweep, "fluctuation"), snrs));
      break;
    }
    case Command::Vanet: {
      const json& v = p.at("vanet");
      const VanetScenario base = vanet_scenario_from(p, config.seed);
      std::vector<DuplexMode> modes;
      for (const json& m : v.at("modes")) modes.push_back(parse_duplex_mode(m.get<std::string>()));
      const auto densities = numbers(v, "densities");
      const DensitySweep result =
          sweep_density(base, densities, v.at("repetitions").get<int>(), modes);
      out.table = vanet_table(result);
      if (!v.at("summary_out").is_null()) {
        out.secondary = vanet_summary_table(result);
        out.secondary_path = v.at("summary_out").get<std::string>();
      }
      break;
    }
  }
  return out;
}

}  // namespace fdsense
