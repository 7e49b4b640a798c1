#include "fdsense/detector_math.hpp"

#include <cmath>
#include <string>

#include "fdsense/quadrature.hpp"

namespace fdsense {

namespace {

void require_positive_threshold(double eps, const char* what) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    throw DomainError(std::string(what) + ": threshold must be positive and finite");
  }
}

void require_probability(double p, const char* what) {
  if (!(p > 0 && p < 1)) {
    throw DomainError(std::string(what) + ": probability must lie strictly inside (0, 1)");
  }
}

// Variance factor of the H3 statistic, N * var / sw2^2. Written so that
// eta = 0 reproduces the H1 factor 2*snr_other + 1 bit for bit.
double collision_variance_factor(double residual, double snr_other) {
  return 2 * residual + 2 * residual * snr_other + 2 * snr_other + 1;
}

void check_fluctuation_interval(double eta0, double m) {
  if (!(m >= 0) || !(eta0 - m >= 0) || !(eta0 + m <= 1)) {
    throw DomainError("SIC fluctuation interval must lie inside [0, 1]");
  }
}

}  // namespace

void DetectorConfig::validate() const {
  if (num_samples < 1) throw DomainError("num_samples must be at least 1");
  if (!(noise_power > 0) || !std::isfinite(noise_power))
    throw DomainError("noise_power must be positive");
  if (!(snr_self >= 0) || !std::isfinite(snr_self)) throw DomainError("snr_self must be >= 0");
  if (!(snr_other >= 0) || !std::isfinite(snr_other)) throw DomainError("snr_other must be >= 0");
  if (!(sic_factor >= 0 && sic_factor <= 1)) throw DomainError("sic_factor must lie in [0, 1]");
}

void TargetProbabilities::validate() const {
  require_probability(target_pd_before, "target_pd_before");
  require_probability(target_pd_during, "target_pd_during");
}

double pf_before(const DetectorConfig& cfg, double eps0) {
  require_positive_threshold(eps0, "pf_before");
  const double n = cfg.num_samples;
  return q((eps0 / cfg.noise_power - 1) * std::sqrt(n));
}

double pd_before(const DetectorConfig& cfg, double eps0) {
  require_positive_threshold(eps0, "pd_before");
  const double n = cfg.num_samples;
  const double y2 = cfg.snr_other;
  return q((eps0 / cfg.noise_power - y2 - 1) * std::sqrt(n / (2 * y2 + 1)));
}

double pf_during(const DetectorConfig& cfg, double eps1) {
  require_positive_threshold(eps1, "pf_during");
  const double n = cfg.num_samples;
  const double a = cfg.residual_si_snr();
  return q((eps1 / cfg.noise_power - a - 1) * std::sqrt(n / (2 * a + 1)));
}

double pd_during(const DetectorConfig& cfg, double eps1) {
  require_positive_threshold(eps1, "pd_during");
  const double n = cfg.num_samples;
  const double a = cfg.residual_si_snr();
  const double y2 = cfg.snr_other;
  return q((eps1 / cfg.noise_power - y2 - a - 1) *
           std::sqrt(n / collision_variance_factor(a, y2)));
}

double threshold_before(const DetectorConfig& cfg, double target_pd) {
  require_probability(target_pd, "threshold_before");
  const double n = cfg.num_samples;
  const double y2 = cfg.snr_other;
  const double eps = (q_inv(target_pd) / std::sqrt(n / (2 * y2 + 1)) + y2 + 1) * cfg.noise_power;
  if (!(eps > 0)) throw InfeasibleError("threshold_before: target gives a non-positive threshold");
  return eps;
}

double threshold_during(const DetectorConfig& cfg, double target_pd) {
  require_probability(target_pd, "threshold_during");
  const double n = cfg.num_samples;
  const double a = cfg.residual_si_snr();
  const double y2 = cfg.snr_other;
  const double eps =
      (q_inv(target_pd) / std::sqrt(n / collision_variance_factor(a, y2)) + y2 + a + 1) *
      cfg.noise_power;
  if (!(eps > 0)) throw InfeasibleError("threshold_during: target gives a non-positive threshold");
  return eps;
}

ThresholdPair thresholds(const DetectorConfig& cfg, const TargetProbabilities& targets) {
  return {threshold_before(cfg, targets.target_pd_before),
          threshold_during(cfg, targets.target_pd_during)};
}

double threshold_link(const DetectorConfig& cfg, double eps0) {
  const double a = cfg.residual_si_snr();
  const double y2 = cfg.snr_other;
  const double scale = std::sqrt((2 * y2 + 1) / collision_variance_factor(a, y2));
  return ((eps0 / cfg.noise_power - y2 - 1) / scale + a + y2 + 1) * cfg.noise_power;
}

double sic_discriminant(const DetectorConfig& cfg, double eps1, double target_pf) {
  const double n = cfg.num_samples;
  const double qi = q_inv(target_pf);
  const double y = eps1 / cfg.noise_power - 0.5;
  const double q2 = qi * qi;
  return (8 * y * n * q2 + 4 * q2 * q2) / (n * n);
}

SicSolution sic_factor_for_pf(const DetectorConfig& cfg, double eps1, double target_pf) {
  require_probability(target_pf, "sic_factor_for_pf");
  require_positive_threshold(eps1, "sic_factor_for_pf");
  if (!(cfg.snr_self > 0)) throw DomainError("sic_factor_for_pf: snr_self must be positive");

  const double n = cfg.num_samples;
  const double qi = q_inv(target_pf);
  const double y = eps1 / cfg.noise_power - 0.5;
  const double delta = sic_discriminant(cfg, eps1, target_pf);
  if (delta < 0) {
    throw InfeasibleError("sic_factor_for_pf: no SIC factor reaches the target at this threshold");
  }

  // Squaring (y - u) sqrt(N) = q sqrt(2u) admits two roots; keep the one where
  // y - u carries the sign of q.
  const double half_root = std::sqrt(delta) / 2;
  const double centre = y + qi * qi / n;
  double u = y;
  if (qi > 0) {
    u = centre - half_root;
    if (y - u < 0) throw RangeError("sic_factor_for_pf: target below what any SIC factor gives");
  } else if (qi < 0) {
    u = centre + half_root;
  }

  double residual = u - 0.5;
  if (residual < 0 && residual > -1e-12 * (1 + std::abs(u))) residual = 0;
  const double eta2 = residual / cfg.snr_self;
  if (!(eta2 >= 0 && eta2 <= 1)) {
    throw RangeError("sic_factor_for_pf: solution lies outside eta in [0, 1]");
  }
  return {eta2, std::sqrt(eta2)};
}

double avg_pf_fluct_numeric(const DetectorConfig& cfg, double eps1, double eta0, double m) {
  check_fluctuation_interval(eta0, m);
  if (m == 0) return pf_during(cfg.with_sic_factor(eta0), eps1);
  const auto integrand = [&](double eta) { return pf_during(cfg.with_sic_factor(eta), eps1); };
  const double width = 2 * m;
  return integrate_adaptive_simpson(integrand, eta0 - m, eta0 + m, 1e-6 * width) / width;
}

double avg_pf_fluct_approx(const DetectorConfig& cfg, double eps1, double eta0, double m) {
  check_fluctuation_interval(eta0, m);
  if (m == 0) return pf_during(cfg.with_sic_factor(eta0), eps1);
  return (pf_during(cfg.with_sic_factor(eta0 + m), eps1) +
          pf_during(cfg.with_sic_factor(eta0 - m), eps1)) /
         2;
}

double avg_pd_fluct_numeric(const DetectorConfig& cfg, double eps1, double eta0, double m) {
  check_fluctuation_interval(eta0, m);
  if (m == 0) return pd_during(cfg.with_sic_factor(eta0), eps1);
  const auto integrand = [&](double eta) { return pd_during(cfg.with_sic_factor(eta), eps1); };
  const double width = 2 * m;
  return integrate_adaptive_simpson(integrand, eta0 - m, eta0 + m, 1e-6 * width) / width;
}

}  // namespace fdsense
