#include "fdsense/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace fdsense {

namespace {

unsigned resolve_workers(unsigned requested, std::uint64_t trials) {
  unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(w, std::max<std::uint64_t>(1, trials / 64)));
}

// Runs body(begin, end, counts) over contiguous trial ranges and sums the
// per-range integer counts, so the total is independent of the split.
template <std::size_t K, typename Body>
std::array<std::uint64_t, K> count_trials(std::uint64_t trials, unsigned workers, Body body) {
  workers = resolve_workers(workers, trials);
  std::vector<std::array<std::uint64_t, K>> partial(workers);
  for (auto& p : partial) p.fill(0);
  const std::uint64_t chunk = (trials + workers - 1) / workers;
  auto run = [&](unsigned w) {
    const std::uint64_t begin = std::min<std::uint64_t>(trials, chunk * w);
    const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
    body(begin, end, partial[w]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  std::array<std::uint64_t, K> total{};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
  return total;
}

void require_trials(std::uint64_t trials) {
  if (trials < 100) throw DomainError("Monte Carlo estimates need at least 100 trials");
}

}  // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  // Clamp so that low <= p <= high survives rounding at p = 0 or 1.
  return {std::min(p, std::max(0.0, centre - half)), std::max(p, std::min(1.0, centre + half))};
}

EmpiricalRate make_rate(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw DomainError("rate over zero trials");
  if (successes > trials) throw DomainError("more successes than trials");
  const Interval ci = wilson_interval(successes, trials, kZ95);
  return {successes, trials, static_cast<double>(successes) / static_cast<double>(trials), ci.low,
          ci.high};
}

EmpiricalRate estimate_rate(Hypothesis hypothesis, const DetectorConfig& cfg, double threshold,
                            std::uint64_t trials, std::uint64_t seed,
                            const MonteCarloOptions& options) {
  require_trials(trials);
  cfg.validate();
  if (!(threshold > 0)) throw DomainError("threshold must be positive");
  const auto counts = count_trials<1>(
      trials, options.workers,
      [&](std::uint64_t begin, std::uint64_t end, std::array<std::uint64_t, 1>& out) {
        for (std::uint64_t i = begin; i < end; ++i) {
          RandomStream rng(seed, {static_cast<std::uint64_t>(hypothesis), i});
          const SampleBlock block = generate(hypothesis, cfg, rng, options.modulation);
          out[0] += decide(energy(block), threshold) ? 1 : 0;
        }
      });
  return make_rate(counts[0], trials);
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::PfBefore:
      return "pf_before";
    case Metric::PdBefore:
      return "pd_before";
    case Metric::PfDuring:
      return "pf_during";
    case Metric::PdDuring:
      return "pd_during";
  }
  return "?";
}

Hypothesis hypothesis_of(Metric m) {
  switch (m) {
    case Metric::PfBefore:
      return Hypothesis::H0;
    case Metric::PdBefore:
      return Hypothesis::H1;
    case Metric::PfDuring:
      return Hypothesis::H2;
    case Metric::PdDuring:
      return Hypothesis::H3;
  }
  return Hypothesis::H0;
}

double clt_allowance(int num_samples) {
  const double skewness = 2 / std::sqrt(static_cast<double>(num_samples));
  return skewness / (6 * std::sqrt(2 * std::numbers::pi));
}

bool ValidationReport::all_pass() const {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
}

ValidationReport validate_grid(std::span<const GridPoint> grid, std::uint64_t trials,
                               std::uint64_t seed, const MonteCarloOptions& options) {
  if (grid.empty()) throw DomainError("validation grid is empty");
  require_trials(trials);

  ValidationReport report;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const DetectorConfig& cfg = grid[p].config;
    cfg.validate();
    grid[p].targets.validate();
    const ThresholdPair eps = thresholds(cfg, grid[p].targets);

    // One shared realisation per trial feeds all four hypotheses.
    const auto counts = count_trials<4>(
        trials, options.workers,
        [&](std::uint64_t begin, std::uint64_t end, std::array<std::uint64_t, 4>& out) {
          for (std::uint64_t i = begin; i < end; ++i) {
            RandomStream rng(seed, {p, i});
            const auto blocks = generate_coupled(cfg, rng, options.modulation);
            out[0] += decide(energy(blocks[0]), eps.eps_before);
            out[1] += decide(energy(blocks[1]), eps.eps_before);
            out[2] += decide(energy(blocks[2]), eps.eps_during);
            out[3] += decide(energy(blocks[3]), eps.eps_during);
          }
        });

    const std::array<Metric, 4> metrics = {Metric::PfBefore, Metric::PdBefore, Metric::PfDuring,
                                           Metric::PdDuring};
    const std::array<double, 4> analytic = {pf_before(cfg, eps.eps_before),
                                            pd_before(cfg, eps.eps_before),
                                            pf_during(cfg, eps.eps_during),
                                            pd_during(cfg, eps.eps_during)};
    const double tolerance = kValidationSlack + clt_allowance(cfg.num_samples);
    for (std::size_t k = 0; k < 4; ++k) {
      ValidationRecord r;
      r.config = cfg;
      r.metric = metrics[k];
      r.threshold = k < 2 ? eps.eps_before : eps.eps_during;
      r.analytic = analytic[k];
      r.empirical = make_rate(counts[k], trials);
      r.ci99 = wilson_interval(counts[k], trials, kZ99);
      r.tolerance = tolerance;
      r.pass = r.analytic >= r.ci99.low - tolerance && r.analytic <= r.ci99.high + tolerance;
      report.records.push_back(r);
    }
  }
  return report;
}

std::vector<SensitivityRow> threshold_sensitivity(const DetectorConfig& cfg,
                                                  std::span<const double> thresholds,
                                                  std::uint64_t trials, std::uint64_t seed,
                                                  const MonteCarloOptions& options) {
  if (thresholds.empty()) throw DomainError("threshold grid is empty");
  require_trials(trials);
  cfg.validate();
  for (double t : thresholds)
    if (!(t > 0)) throw DomainError("thresholds must be positive");

  // Every threshold sees the same realisations, so the empirical curves are
  // exactly monotone in the threshold.
  const std::size_t k = thresholds.size();
  std::vector<std::uint64_t> detected(k, 0);
  std::vector<std::uint64_t> false_alarms(k, 0);
  std::vector<double> h2(trials);
  std::vector<double> h3(trials);
  count_trials<1>(trials, options.workers,
                  [&](std::uint64_t begin, std::uint64_t end, std::array<std::uint64_t, 1>&) {
                    for (std::uint64_t i = begin; i < end; ++i) {
                      RandomStream rng(seed, {i});
                      const auto blocks = generate_coupled(cfg, rng, options.modulation);
                      h2[i] = energy(blocks[2]);
                      h3[i] = energy(blocks[3]);
                    }
                  });
  for (std::uint64_t i = 0; i < trials; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      detected[j] += decide(h3[i], thresholds[j]);
      false_alarms[j] += decide(h2[i], thresholds[j]);
    }
  }

  std::vector<SensitivityRow> rows;
  rows.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    rows.push_back({thresholds[j], make_rate(detected[j], trials), make_rate(false_alarms[j], trials),
                    pd_during(cfg, thresholds[j]), pf_during(cfg, thresholds[j])});
  }
  return rows;
}

}  // namespace fdsense
