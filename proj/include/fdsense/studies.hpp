#pragma once

// Parameter studies over the closed forms and simulators, each producing a
// CSV-ready table.

#include <optional>
#include <span>
#include <vector>

#include "fdsense/csv.hpp"
#include "fdsense/detector_math.hpp"
#include "fdsense/montecarlo.hpp"
#include "fdsense/vanet.hpp"

namespace fdsense {

/// lo, lo+step, ... up to hi inclusive (within step/1e6).
std::vector<double> arange(double lo, double hi, double step);
/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

// -- thresholds vs eta ------------------------------------------------------

CsvTable thresholds_table(const DetectorConfig& cfg, const TargetProbabilities& targets,
                          std::span<const double> etas);

// -- analytic curves vs threshold ------------------------------------------

CsvTable roc_table(const DetectorConfig& cfg, std::span<const double> eps);

// -- Monte Carlo --------------------------------------------------------------

CsvTable validation_table(const ValidationReport& report);
CsvTable sensitivity_table(std::span<const SensitivityRow> rows);

// -- SIC sweep ------------------------------------------------------------------

struct SicSweepRow {
  double eta = 0.0;
  double eps_during = 0.0;  // dynamic: recomputed at this eta
  double pd_during = 0.0;
  double pf_during = 0.0;
  double eps_fixed = 0.0;   // fixed: computed once at the first eta of the sweep
  double pd_fixed = 0.0;
  double pf_fixed = 0.0;
};

std::vector<SicSweepRow> sic_sweep(const DetectorConfig& cfg, double target_pd_during,
                                   std::span<const double> etas);
CsvTable sic_sweep_table(std::span<const SicSweepRow> rows);

/// First eta at which the dynamic-threshold pf_during reaches `level`,
/// linearly interpolated between grid points.
std::optional<double> pf_crossing(std::span<const SicSweepRow> rows, double level);

// -- fixed vs dynamic thresholds over SNR ------------------------------------

struct StrategyPoint {
  double eps_before = 0.0;
  double pd_before = 0.0;
  double pf_before = 0.0;
  double eps_during = 0.0;
  double pd_during = 0.0;
  double pf_during = 0.0;
};

struct StrategyRow {
  double snr_other_db = 0.0;
  StrategyPoint dynamic;
  StrategyPoint fixed;
};

/// Dynamic thresholds are recomputed at each SNR; fixed thresholds are
/// computed once at the first SNR of the sweep and held.
std::vector<StrategyRow> compare_fixed_vs_dynamic(const DetectorConfig& cfg,
                                                  const TargetProbabilities& targets,
                                                  std::span<const double> snr_other_db);
CsvTable strategy_table(std::span<const StrategyRow> rows);

// -- sensing time --------------------------------------------------------------

struct SensingTimeRow {
  double sensing_time = 0.0;
  int num_samples = 0;
  double eps_before = 0.0;
  double pd_before = 0.0;
  double pf_before = 0.0;
  double eps_during = 0.0;
  double pd_during = 0.0;
  double pf_during = 0.0;
};

std::vector<SensingTimeRow> sensing_time_sweep(const DetectorConfig& cfg,
                                               const TargetProbabilities& targets,
                                               double sample_rate,
                                               std::span<const double> sensing_times);
CsvTable sensing_time_table(std::span<const SensingTimeRow> rows);

// -- SIC fluctuation -------------------------------------------------------------

struct FluctuationRow {
  double snr_other_db = 0.0;
  double eps_during = 0.0;      // designed for the nominal eta0
  double pf_nominal = 0.0;
  double pf_avg_numeric = 0.0;
  double pf_avg_approx = 0.0;
  double pd_nominal = 0.0;
  double pd_avg_numeric = 0.0;
};

/// Uniform fluctuation eta in [eta0 - m, eta0 + m] with m = fraction * eta0.
std::vector<FluctuationRow> fluctuation_sweep(const DetectorConfig& cfg, double target_pd_during,
                                              double eta0, double fraction,
                                              std::span<const double> snr_other_db);
CsvTable fluctuation_table(std::span<const FluctuationRow> rows);

// -- VANET -----------------------------------------------------------------------

CsvTable vanet_table(const DensitySweep& sweep);
CsvTable vanet_summary_table(const DensitySweep& sweep);

}  // namespace fdsense
