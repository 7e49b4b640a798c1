#pragma once

// Closed-form energy-detection probabilities for a full-duplex transmitter.
//
// All quantities follow the Gaussian (large-N) approximation of the averaged
// energy statistic. Four channel states are distinguished:
//   H0  idle channel                      mean sw2
//   H1  another vehicle transmitting      mean (snr_other + 1) sw2
//   H2  only our own residual SI          mean (eta^2 snr_self + 1) sw2
//   H3  residual SI plus another vehicle  mean (snr_other + eta^2 snr_self + 1) sw2
// eta is an amplitude fraction, so residual SI power is eta^2 times the SI power.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

#include "fdsense/errors.hpp"

namespace fdsense {

struct DetectorConfig {
  int num_samples = 1000;
  double noise_power = 1.0;  // sigma_w^2
  double snr_self = 10.0;    // SI power over noise before cancellation (linear)
  double snr_other = 0.1;    // colliding vehicle power over noise (linear)
  double sic_factor = 0.0;   // residual SI amplitude fraction, 0 = perfect SIC

  /// Throws DomainError when any invariant is violated.
  void validate() const;

  double residual_si_snr() const { return sic_factor * sic_factor * snr_self; }

  DetectorConfig with_sic_factor(double eta) const {
    DetectorConfig c = *this;
    c.sic_factor = eta;
    return c;
  }
  DetectorConfig with_snr_other(double snr) const {
    DetectorConfig c = *this;
    c.snr_other = snr;
    return c;
  }
  DetectorConfig with_num_samples(int n) const {
    DetectorConfig c = *this;
    c.num_samples = n;
    return c;
  }
};

struct ThresholdPair {
  double eps_before = 0.0;  // idle-channel test, before transmitting
  double eps_during = 0.0;  // collision test, while transmitting
};

struct TargetProbabilities {
  double target_pd_before = 0.9;
  double target_pd_during = 0.5;

  void validate() const;
};

template <std::floating_point Scalar>
Scalar db_to_linear(Scalar db) {
  return std::pow(Scalar(10), db / 10);
}

template <std::floating_point Scalar>
Scalar linear_to_db(Scalar linear) {
  return 10 * std::log10(linear);
}

// ---------------------------------------------------------------------------
// Standard normal tail

/// Upper tail of the standard normal distribution.
template <std::floating_point Scalar>
Scalar q(Scalar x) {
  return std::erfc(x / std::numbers::sqrt2_v<Scalar>) / 2;
}

/// Q(x) ~ exp(-x^2/2)/2, the loose upper-tail bound used to motivate the
/// endpoint-mean approximation of the fluctuation-averaged false alarm.
template <std::floating_point Scalar>
Scalar q_approx(Scalar x) {
  if (!(x >= 0)) throw DomainError("q_approx: argument must be nonnegative");
  return std::exp(-x * x / 2) / 2;
}

namespace detail {

// Quantile of the upper tail for tail in (0, 0.5]; the result is >= 0.
template <std::floating_point Scalar>
Scalar upper_tail_quantile(Scalar tail) {
  if (tail == Scalar(0.5)) return Scalar(0);
  // Abramowitz & Stegun 26.2.23 starting point, |error| < 4.5e-4.
  const Scalar t = std::sqrt(-2 * std::log(tail));
  Scalar x = t - (Scalar(2.515517) + Scalar(0.802853) * t + Scalar(0.010328) * t * t) /
                     (1 + Scalar(1.432788) * t + Scalar(0.189269) * t * t +
                      Scalar(0.001308) * t * t * t);
  const Scalar inv_sqrt_2pi = std::numbers::inv_sqrtpi_v<Scalar> / std::numbers::sqrt2_v<Scalar>;
  // Halley iterations on q(x) - tail; q' = -pdf, q'' = x pdf.
  for (int iter = 0; iter < 16; ++iter) {
    const Scalar pdf = inv_sqrt_2pi * std::exp(-x * x / 2);
    if (pdf == 0) break;
    const Scalar u = (q(x) - tail) / pdf;
    const Scalar step = u / (1 - x * u / 2);
    x += step;
    if (std::abs(step) <= 4 * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(x)))
      break;
  }
  return x;
}

}  // namespace detail

/// Inverse of q. Throws DomainError unless 0 < p < 1.
template <std::floating_point Scalar>
Scalar q_inv(Scalar p) {
  if (!(p > 0 && p < 1)) throw DomainError("q_inv: probability must lie strictly inside (0, 1)");
  if (p <= Scalar(0.5)) return detail::upper_tail_quantile(p);
  return -detail::upper_tail_quantile(1 - p);
}

// ---------------------------------------------------------------------------
// Detection and false-alarm probabilities

double pf_before(const DetectorConfig& cfg, double eps0);
double pd_before(const DetectorConfig& cfg, double eps0);
double pf_during(const DetectorConfig& cfg, double eps1);
double pd_during(const DetectorConfig& cfg, double eps1);

/// Threshold that makes pd_before hit target_pd. Throws DomainError for a
/// target outside (0,1) and InfeasibleError if the threshold is not positive.
double threshold_before(const DetectorConfig& cfg, double target_pd);
double threshold_during(const DetectorConfig& cfg, double target_pd);
ThresholdPair thresholds(const DetectorConfig& cfg, const TargetProbabilities& targets);

/// Maps a before-transmission threshold to the during-transmission threshold
/// that yields the same detection probability.
double threshold_link(const DetectorConfig& cfg, double eps0);

struct SicSolution {
  double eta_squared = 0.0;
  double eta = 0.0;
};

/// SIC factor for which pf_during(eps1) equals target_pf.
///
/// Solves the quadratic in u = eta^2 snr_self + 1/2. Throws InfeasibleError
/// when the discriminant is negative and RangeError when the admissible root
/// gives eta outside [0, 1] (or no root of the right sign exists).
SicSolution sic_factor_for_pf(const DetectorConfig& cfg, double eps1, double target_pf);

/// Discriminant of the SIC-factor quadratic, (8 y N q^2 + 4 q^4) / N^2 with
/// y = eps1/sw2 - 1/2 and q = Q^-1(target_pf).
double sic_discriminant(const DetectorConfig& cfg, double eps1, double target_pf);

/// Average of pf_during over eta uniform on [eta0 - m, eta0 + m], by adaptive
/// Simpson quadrature to 1e-6 absolute.
double avg_pf_fluct_numeric(const DetectorConfig& cfg, double eps1, double eta0, double m);

/// Endpoint mean of pf_during at eta0 - m and eta0 + m.
double avg_pf_fluct_approx(const DetectorConfig& cfg, double eps1, double eta0, double m);

/// Same averaging as avg_pf_fluct_numeric, applied to pd_during.
double avg_pd_fluct_numeric(const DetectorConfig& cfg, double eps1, double eta0, double m);

}  // namespace fdsense
