#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "fdsense/detector_math.hpp"
#include "fdsense/random.hpp"

namespace fdsense {

enum class Hypothesis {
  H0,  // idle
  H1,  // another vehicle transmitting
  H2,  // own residual SI only
  H3,  // own residual SI and another vehicle
};

std::string_view to_string(Hypothesis h);

enum class Modulation { Bpsk, Qpsk };

std::string_view to_string(Modulation m);
Modulation parse_modulation(std::string_view name);

struct SensingWindow {
  double sensing_time = 50e-6;  // seconds
  double sample_rate = 20e6;    // Hz
};

/// floor(sensing_time * sample_rate). Throws DomainError for a window shorter
/// than one sample.
int num_samples(const SensingWindow& window);

using SampleVector = Eigen::VectorXcd;

struct SampleBlock {
  SampleVector samples;
  Hypothesis hypothesis = Hypothesis::H0;
  DetectorConfig config;
};

/// Received complex baseband block r[n] under the given hypothesis.
///
/// Noise is circular complex Gaussian with power noise_power. The colliding
/// signal and the SI are unit-envelope PSK streams with independent random
/// symbols and an independent random carrier phase per block, scaled to
/// powers snr_other*sw2 and snr_self*sw2. SI amplitude is scaled by eta.
SampleBlock generate(Hypothesis hypothesis, const DetectorConfig& cfg, RandomStream& rng,
                     Modulation modulation = Modulation::Qpsk);

/// One draw of each hypothesis sharing a single noise, SI and colliding-signal
/// realisation. Each block is exactly distributed as generate() would produce
/// for its hypothesis; the four are correlated with one another.
std::array<SampleBlock, 4> generate_coupled(const DetectorConfig& cfg, RandomStream& rng,
                                            Modulation modulation = Modulation::Qpsk);

/// Averaged energy (1/N) sum |r[n]|^2. Throws DomainError on an empty block.
double energy(const SampleBlock& block);
double energy(const Eigen::Ref<const SampleVector>& samples);

/// true iff e > threshold.
inline bool decide(double e, double threshold) { return e > threshold; }

}  // namespace fdsense
