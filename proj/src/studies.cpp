#include "fdsense/studies.hpp"

#include <cmath>

#include "fdsense/waveform.hpp"

namespace fdsense {

std::vector<double> arange(double lo, double hi, double step) {
  if (!(step > 0)) throw DomainError("sweep step must be positive");
  if (!(hi >= lo)) throw DomainError("sweep upper bound is below the lower bound");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-6));
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw DomainError("linspace needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

CsvTable thresholds_table(const DetectorConfig& cfg, const TargetProbabilities& targets,
                          std::span<const double> etas) {
  targets.validate();
  CsvTable t;
  t.header = {"eta", "eps_before", "eps_during", "eps_link", "gap", "eps_before_db", "eps_during_db"};
  for (double eta : etas) {
    const DetectorConfig c = cfg.with_sic_factor(eta);
    c.validate();
    const ThresholdPair eps = thresholds(c, targets);
    t.add_row({eta, eps.eps_before, eps.eps_during, threshold_link(c, eps.eps_before),
               eps.eps_during - eps.eps_before, linear_to_db(eps.eps_before),
               linear_to_db(eps.eps_during)});
  }
  return t;
}

CsvTable roc_table(const DetectorConfig& cfg, std::span<const double> eps) {
  cfg.validate();
  CsvTable t;
  t.header = {"threshold", "threshold_db", "pf_before", "pd_before", "pf_during", "pd_during"};
  for (double e : eps) {
    t.add_row({e, linear_to_db(e), pf_before(cfg, e), pd_before(cfg, e), pf_during(cfg, e),
               pd_during(cfg, e)});
  }
  return t;
}

CsvTable validation_table(const ValidationReport& report) {
  CsvTable t;
  t.header = {"n",         "snr_self_db", "snr_other_db", "eta",     "threshold", "metric",
              "analytic",  "empirical",   "ci_low",       "ci_high", "pass"};
  for (const ValidationRecord& r : report.records) {
    t.add_row({static_cast<std::int64_t>(r.config.num_samples), linear_to_db(r.config.snr_self),
               linear_to_db(r.config.snr_other), r.config.sic_factor, r.threshold,
               std::string(to_string(r.metric)), r.analytic, r.empirical.rate, r.ci99.low,
               r.ci99.high, std::string(r.pass ? "true" : "false")});
  }
  return t;
}

CsvTable sensitivity_table(std::span<const SensitivityRow> rows) {
  CsvTable t;
  t.header = {"threshold",  "threshold_db", "pd_during",   "pd_ci_low",  "pd_ci_high",
              "pf_during",  "pf_ci_low",    "pf_ci_high",  "pd_analytic", "pf_analytic"};
  for (const SensitivityRow& r : rows) {
    t.add_row({r.threshold, linear_to_db(r.threshold), r.pd_during.rate, r.pd_during.ci_low,
               r.pd_during.ci_high, r.pf_during.rate, r.pf_during.ci_low, r.pf_during.ci_high,
               r.pd_analytic, r.pf_analytic});
  }
  return t;
}

std::vector<SicSweepRow> sic_sweep(const DetectorConfig& cfg, double target_pd_during,
                                   std::span<const double> etas) {
  if (etas.empty()) throw DomainError("eta sweep is empty");
  const double eps_fixed = threshold_during(cfg.with_sic_factor(etas.front()), target_pd_during);
  std::vector<SicSweepRow> rows;
  rows.reserve(etas.size());
  for (double eta : etas) {
    const DetectorConfig c = cfg.with_sic_factor(eta);
    c.validate();
    const double eps = threshold_during(c, target_pd_during);
    rows.push_back({eta, eps, pd_during(c, eps), pf_during(c, eps), eps_fixed,
                    pd_during(c, eps_fixed), pf_during(c, eps_fixed)});
  }
  return rows;
}

CsvTable sic_sweep_table(std::span<const SicSweepRow> rows) {
  CsvTable t;
  t.header = {"eta", "eps_during", "pd_during", "pf_during", "eps_fixed", "pd_fixed", "pf_fixed"};
  for (const SicSweepRow& r : rows) {
    t.add_row({r.eta, r.eps_during, r.pd_during, r.pf_during, r.eps_fixed, r.pd_fixed, r.pf_fixed});
  }
  return t;
}

std::optional<double> pf_crossing(std::span<const SicSweepRow> rows, double level) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].pf_during < level) continue;
    if (i == 0) return rows[0].eta;
    const SicSweepRow& a = rows[i - 1];
    const SicSweepRow& b = rows[i];
    const double w = (level - a.pf_during) / (b.pf_during - a.pf_during);
    return a.eta + w * (b.eta - a.eta);
  }
  return std::nullopt;
}

namespace {

StrategyPoint evaluate(const DetectorConfig& c, double eps0, double eps1) {
  return {eps0, pd_before(c, eps0), pf_before(c, eps0), eps1, pd_during(c, eps1), pf_during(c, eps1)};
}

}  // namespace

std::vector<StrategyRow> compare_fixed_vs_dynamic(const DetectorConfig& cfg,
                                                  const TargetProbabilities& targets,
                                                  std::span<const double> snr_other_db) {
  if (snr_other_db.empty()) throw DomainError("SNR sweep is empty");
  targets.validate();
  const DetectorConfig calibration = cfg.with_snr_other(db_to_linear(snr_other_db.front()));
  calibration.validate();
  const ThresholdPair fixed = thresholds(calibration, targets);
  std::vector<StrategyRow> rows;
  rows.reserve(snr_other_db.size());
  for (double db : snr_other_db) {
    const DetectorConfig c = cfg.with_snr_other(db_to_linear(db));
    const ThresholdPair dynamic = thresholds(c, targets);
    rows.push_back({db, evaluate(c, dynamic.eps_before, dynamic.eps_during),
                    evaluate(c, fixed.eps_before, fixed.eps_during)});
  }
  return rows;
}

CsvTable strategy_table(std::span<const StrategyRow> rows) {
  CsvTable t;
  t.header = {"snr_other_db",     "dyn_eps_before",   "dyn_pd_before",   "dyn_pf_before",
              "dyn_eps_during",   "dyn_pd_during",    "dyn_pf_during",   "fixed_eps_before",
              "fixed_pd_before",  "fixed_pf_before",  "fixed_eps_during", "fixed_pd_during",
              "fixed_pf_during"};
  for (const StrategyRow& r : rows) {
    const StrategyPoint& d = r.dynamic;
    const StrategyPoint& f = r.fixed;
    t.add_row({r.snr_other_db, d.eps_before, d.pd_before, d.pf_before, d.eps_during, d.pd_during,
               d.pf_during, f.eps_before, f.pd_before, f.pf_before, f.eps_during, f.pd_during,
               f.pf_during});
  }
  return t;
}

std::vector<SensingTimeRow> sensing_time_sweep(const DetectorConfig& cfg,
                                               const TargetProbabilities& targets,
                                               double sample_rate,
                                               std::span<const double> sensing_times) {
  targets.validate();
  std::vector<SensingTimeRow> rows;
  rows.reserve(sensing_times.size());
  for (double tau : sensing_times) {
    const int n = num_samples(SensingWindow{tau, sample_rate});
    const DetectorConfig c = cfg.with_num_samples(n);
    c.validate();
    const ThresholdPair eps = thresholds(c, targets);
    rows.push_back({tau, n, eps.eps_before, pd_before(c, eps.eps_before),
                    pf_before(c, eps.eps_before), eps.eps_during, pd_during(c, eps.eps_during),
                    pf_during(c, eps.eps_during)});
  }
  return rows;
}

CsvTable sensing_time_table(std::span<const SensingTimeRow> rows) {
  CsvTable t;
  t.header = {"sensing_time", "n",          "eps_before", "pd_before",
              "pf_before",    "eps_during", "pd_during",  "pf_during"};
  for (const SensingTimeRow& r : rows) {
    t.add_row({r.sensing_time, static_cast<std::int64_t>(r.num_samples), r.eps_before, r.pd_before,
               r.pf_before, r.eps_during, r.pd_during, r.pf_during});
  }
  return t;
}

std::vector<FluctuationRow> fluctuation_sweep(const DetectorConfig& cfg, double target_pd_during,
                                              double eta0, double fraction,
                                              std::span<const double> snr_other_db) {
  if (!(fraction >= 0)) throw DomainError("fluctuation fraction must be >= 0");
  const double m = fraction * eta0;
  std::vector<FluctuationRow> rows;
  rows.reserve(snr_other_db.size());
  for (double db : snr_other_db) {
    const DetectorConfig c = cfg.with_snr_other(db_to_linear(db)).with_sic_factor(eta0);
    c.validate();
    const double eps = threshold_during(c, target_pd_during);
    rows.push_back({db, eps, pf_during(c, eps), avg_pf_fluct_numeric(c, eps, eta0, m),
                    avg_pf_fluct_approx(c, eps, eta0, m), pd_during(c, eps),
                    avg_pd_fluct_numeric(c, eps, eta0, m)});
  }
  return rows;
}

CsvTable fluctuation_table(std::span<const FluctuationRow> rows) {
  CsvTable t;
  t.header = {"snr_other_db",  "eps_during", "pf_nominal",     "pf_avg_numeric",
              "pf_avg_approx", "pd_nominal", "pd_avg_numeric"};
  for (const FluctuationRow& r : rows) {
    t.add_row({r.snr_other_db, r.eps_during, r.pf_nominal, r.pf_avg_numeric, r.pf_avg_approx,
               r.pd_nominal, r.pd_avg_numeric});
  }
  return t;
}

CsvTable vanet_table(const DensitySweep& sweep) {
  CsvTable t;
  t.header = {"density",    "mode",     "replicate", "collision_time_s", "throughput",
              "attempts",   "collisions", "detected", "false_alarms"};
  for (const ReplicateRow& r : sweep.replicates) {
    const VanetMetrics& m = r.metrics;
    t.add_row({r.density, std::string(to_string(r.mode)), static_cast<std::int64_t>(r.replicate),
               m.total_collision_time, m.normalized_throughput,
               static_cast<std::int64_t>(m.attempts), static_cast<std::int64_t>(m.collisions),
               static_cast<std::int64_t>(m.detected_collisions),
               static_cast<std::int64_t>(m.false_alarms)});
  }
  return t;
}

CsvTable vanet_summary_table(const DensitySweep& sweep) {
  CsvTable t;
  t.header = {"density",         "mode",          "replicates",      "collision_time_mean",
              "collision_time_std", "throughput_mean", "throughput_std", "attempts_mean",
              "collisions_mean", "detected_mean", "false_alarms_mean"};
  for (const SummaryRow& r : sweep.summary) {
    t.add_row({r.density, std::string(to_string(r.mode)), static_cast<std::int64_t>(r.replicates),
               r.collision_time_mean, r.collision_time_std, r.throughput_mean, r.throughput_std,
               r.attempts_mean, r.collisions_mean, r.detected_mean, r.false_alarms_mean});
  }
  return t;
}

}  // namespace fdsense
