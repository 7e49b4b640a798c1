#include <doctest.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fdsense/csv.hpp"
#include "fdsense/run_config.hpp"
#include "fdsense/studies.hpp"

using namespace fdsense;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(FD_SENSE_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fdsense_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

double column(const CsvTable& t, std::size_t row, std::size_t col) {
  return std::get<double>(t.rows[row][col]);
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("doubles round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e-7, 0.0}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("header, quoting and line endings") {
  CsvTable t;
  t.header = {"a", "b,c"};
  t.add_row({1.5, std::string("say \"hi\"")});
  t.add_row({std::int64_t{7}, std::string("plain")});
  CHECK(to_csv(t) == "a,\"b,c\"\n1.5,\"say \"\"hi\"\"\"\n7,plain\n");
  CHECK_THROWS(t.add_row({1.0}));
  CsvTable empty;
  empty.header = {"x"};
  CHECK(to_csv(empty) == "x\n");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("parameter resolution") {
  const json defaults = resolve_parameters(json(), {});
  CHECK(defaults == default_parameters());

  const std::vector<std::string> overrides = {"detector.sic_factor=0.25", "vanet.modes=HD",
                                              "vanet.densities=0,50", "sweep.vs=snr",
                                              "vanet.pf_override=0.1"};
  const json p = resolve_parameters(json{{"targets", {{"pd_during", 0.9}}}}, overrides);
  CHECK(p["detector"]["sic_factor"] == 0.25);
  CHECK(p["targets"]["pd_during"] == 0.9);
  CHECK(p["vanet"]["densities"] == json({0, 50}));
  CHECK(p["vanet"]["modes"] == json({"HD"}));
  CHECK(p["sweep"]["vs"] == "snr");
  CHECK(targets_from(p).target_pd_during == 0.9);
  CHECK(detector_from(p).sic_factor == 0.25);
  CHECK(detector_from(p).snr_self == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(*vanet_scenario_from(p, 3).pf_override == 0.1);

  std::vector<std::string> bad_key = {"detector.bogus=1"};
  CHECK_THROWS_AS(resolve_parameters(json(), bad_key), ConfigError);
  std::vector<std::string> bad_type = {"detector.num_samples=abc"};
  CHECK_THROWS_AS(resolve_parameters(json(), bad_type), ConfigError);
  std::vector<std::string> bad_form = {"num_samples=5"};
  CHECK_THROWS_AS(resolve_parameters(json(), bad_form), ConfigError);
  CHECK_THROWS_AS(resolve_parameters(json{{"extra", json::object()}}, {}), ConfigError);
  CHECK_THROWS_AS(resolve_parameters(json{{"detector", {{"snr", 1}}}}, {}), ConfigError);
  CHECK_THROWS_AS(parse_command("plot"), ConfigError);
  CHECK(parse_command("sensing-time-sweep") == Command::SensingTimeSweep);
  CHECK(to_string(Command::SicSweep) == "sic-sweep");
}

TEST_CASE("thresholds table: perfect SIC row and monotone thresholds") {
  RunConfig cfg;
  cfg.command = Command::Thresholds;
  std::vector<std::string> o = {"targets.pd_during=0.9"};
  cfg.parameters = resolve_parameters(json(), o);
  const CsvTable t = execute(cfg).table;
  REQUIRE(t.rows.size() == 41);
  CHECK(column(t, 0, 0) == 0.0);
  CHECK(column(t, 0, 1) == column(t, 0, 2));
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(column(t, i, 2) >= column(t, i - 1, 2));
    CHECK(column(t, i, 2) == doctest::Approx(column(t, i, 3)).epsilon(1e-12));
  }
}

TEST_CASE("sic sweep keeps detection at target") {
  DetectorConfig c;
  c.snr_other = db_to_linear(-10.0);
  const auto rows = sic_sweep(c, 0.9, arange(0.0, 0.4, 0.01));
  for (const auto& r : rows) CHECK(r.pd_during == doctest::Approx(0.9).epsilon(1e-12));
  const auto crossing = pf_crossing(rows, 0.1);
  REQUIRE(crossing.has_value());
  CHECK(*crossing > 0.10);
  CHECK(*crossing < 0.20);
  CHECK(rows.front().eps_fixed == rows.front().eps_during);
}

TEST_CASE("fixed versus dynamic strategy") {
  DetectorConfig c;
  const auto rows = compare_fixed_vs_dynamic(c, {0.9, 0.9}, arange(-20.0, 0.0, 1.0));
  REQUIRE(rows.size() == 21);
  CHECK(rows[0].fixed.pd_during == rows[0].dynamic.pd_during);
  CHECK(rows[0].fixed.pf_during == rows[0].dynamic.pf_during);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].fixed.pd_during >= rows[i - 1].fixed.pd_during);
    CHECK(rows[i].dynamic.pf_during < rows[i - 1].dynamic.pf_during);
    CHECK(rows[i].dynamic.pd_during == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(rows[i].fixed.pf_during >= rows[i].dynamic.pf_during);
  }
  CHECK(rows[1].fixed.pd_during > rows[0].fixed.pd_during);
  CHECK(rows.back().fixed.pd_during == doctest::Approx(1.0));
  CHECK(rows.back().fixed.pf_during == rows.front().fixed.pf_during);
}

TEST_CASE("grid helpers") {
  CHECK(arange(0.0, 0.4, 0.01).size() == 41);
  CHECK(arange(-20.0, 0.0, 1.0).back() == 0.0);
  CHECK(linspace(1.0, 2.0, 5) == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
  CHECK_THROWS_AS(arange(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), DomainError);
}

TEST_CASE("every table emits probabilities in [0, 1] and positive thresholds") {
  for (Command c : {Command::Thresholds, Command::Roc, Command::SicSweep, Command::SensingTimeSweep,
                    Command::Fluctuation}) {
    RunConfig cfg;
    cfg.command = c;
    const CsvTable t = execute(cfg).table;
    REQUIRE(!t.rows.empty());
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      const std::string& h = t.header[j];
      const bool probability = h.rfind("pd", 0) == 0 || h.rfind("pf", 0) == 0;
      const bool threshold = h.rfind("eps", 0) == 0 && h.find("db") == std::string::npos;
      for (const auto& row : t.rows) {
        if (!std::holds_alternative<double>(row[j])) continue;
        const double v = std::get<double>(row[j]);
        if (probability) CHECK((v >= 0.0 && v <= 1.0));
        if (threshold) CHECK(v > 0.0);
      }
    }
  }
}

TEST_CASE("binary exit codes") {
  CHECK(run_cli("thresholds") == 0);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("thresholds detector.unknown=1") == 2);
  CHECK(run_cli("thresholds --seed notanumber") == 2);
  CHECK(run_cli("thresholds detector.sic_factor=1.5") == 2);
  CHECK(run_cli("thresholds targets.pd_before=0.999999 detector.num_samples=1") == 3);
  CHECK(run_cli("thresholds --out /nonexistent-dir/x.csv") == 4);
  CHECK(run_cli("thresholds --config /nonexistent-dir/c.json") == 4);

  const auto bad_json = scratch("bad.json");
  std::ofstream(bad_json) << "{ not json";
  CHECK(run_cli("thresholds --config " + bad_json.string()) == 2);
  const auto unknown = scratch("unknown.json");
  std::ofstream(unknown) << R"({"detector": {"num_samples": 500}, "plotting": {}})";
  CHECK(run_cli("thresholds --config " + unknown.string()) == 2);
}

TEST_CASE("binary writes the CSV file and honours the config") {
  const auto config = scratch("cfg.json");
  std::ofstream(config) << R"({"sweep": {"eta_min": 0.0, "eta_max": 0.1, "eta_step": 0.05}})";
  const auto out = scratch("thr.csv");
  std::filesystem::remove(out);
  REQUIRE(run_cli("thresholds --config " + config.string() + " --out " + out.string()) == 0);
  std::ifstream in(out, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find('\r') == std::string::npos);
  const auto rows = lines(text);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "eta,eps_before,eps_during,eps_link,gap,eps_before_db,eps_during_db");
}

}  // TEST_SUITE
