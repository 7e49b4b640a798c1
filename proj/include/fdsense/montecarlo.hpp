#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fdsense/detector_math.hpp"
#include "fdsense/waveform.hpp"

namespace fdsense {

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;

struct EmpiricalRate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 95% Wilson bounds
  double ci_high = 0.0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

/// Rate with its 95% Wilson interval. Throws DomainError if successes > trials
/// or trials == 0.
EmpiricalRate make_rate(std::uint64_t successes, std::uint64_t trials);

struct MonteCarloOptions {
  Modulation modulation = Modulation::Qpsk;
  unsigned workers = 0;  // 0 = hardware concurrency
};

/// Fraction of `trials` independently generated blocks whose energy exceeds
/// `threshold`. Trial i draws from the stream derived from (seed, i), so the
/// result does not depend on the worker count.
EmpiricalRate estimate_rate(Hypothesis hypothesis, const DetectorConfig& cfg, double threshold,
                            std::uint64_t trials, std::uint64_t seed,
                            const MonteCarloOptions& options = {});

enum class Metric { PfBefore, PdBefore, PfDuring, PdDuring };

std::string_view to_string(Metric m);
Hypothesis hypothesis_of(Metric m);

/// Allowance for the gap between the exact energy distribution and its
/// Gaussian approximation: the leading Edgeworth term of the idle-channel
/// statistic, skewness / (6 sqrt(2 pi)) with skewness 2/sqrt(N).
double clt_allowance(int num_samples);

/// Fixed part of the validation tolerance.
inline constexpr double kValidationSlack = 0.005;

struct GridPoint {
  DetectorConfig config;
  TargetProbabilities targets;
};

struct ValidationRecord {
  DetectorConfig config;
  double threshold = 0.0;
  Metric metric = Metric::PfBefore;
  double analytic = 0.0;
  EmpiricalRate empirical;
  Interval ci99;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationRecord> records;

  bool all_pass() const;
};

/// For every grid point: both thresholds from the targets, all four empirical
/// rates, and a comparison against the closed forms. A record passes iff the
/// analytic value lies in the 99% Wilson interval widened by
/// kValidationSlack + clt_allowance(N).
ValidationReport validate_grid(std::span<const GridPoint> grid, std::uint64_t trials,
                               std::uint64_t seed, const MonteCarloOptions& options = {});

struct SensitivityRow {
  double threshold = 0.0;
  EmpiricalRate pd_during;
  EmpiricalRate pf_during;
  double pd_analytic = 0.0;
  double pf_analytic = 0.0;
};

/// Empirical collision-detection and false-alarm rates at each threshold.
std::vector<SensitivityRow> threshold_sensitivity(const DetectorConfig& cfg,
                                                  std::span<const double> thresholds,
                                                  std::uint64_t trials, std::uint64_t seed,
                                                  const MonteCarloOptions& options = {});

}  // namespace fdsense
