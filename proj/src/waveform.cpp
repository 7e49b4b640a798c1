#include "fdsense/waveform.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace fdsense {

namespace {

// Raw realisation shared by every hypothesis: colliding signal, SI (already
// scaled by eta) and noise.
struct Components {
  SampleVector other;
  SampleVector self;
  SampleVector noise;
};

SampleVector psk_stream(int n, Modulation modulation, double amplitude, RandomStream& rng) {
  const double phase = 2 * std::numbers::pi * rng.uniform();
  const std::complex<double> base = std::polar(amplitude, phase);
  // QPSK uses all four rotations, BPSK only 0 and pi.
  const std::array<std::complex<double>, 4> points = {
      base, base * std::complex<double>(0, 1), -base, base * std::complex<double>(0, -1)};
  const int bits_per_symbol = modulation == Modulation::Bpsk ? 1 : 2;
  const std::uint64_t mask = (1u << bits_per_symbol) - 1;
  const int stride = modulation == Modulation::Bpsk ? 2 : 1;

  SampleVector out(n);
  std::uint64_t word = 0;
  int available = 0;
  for (int i = 0; i < n; ++i) {
    if (available < bits_per_symbol) {
      word = rng.bits();
      available = 64;
    }
    out[i] = points[(word & mask) * stride];
    word >>= bits_per_symbol;
    available -= bits_per_symbol;
  }
  return out;
}

Components draw_components(const DetectorConfig& cfg, RandomStream& rng, Modulation modulation) {
  cfg.validate();
  const int n = cfg.num_samples;
  Components c;
  c.other = psk_stream(n, modulation, std::sqrt(cfg.snr_other * cfg.noise_power), rng);
  c.self = psk_stream(n, modulation, cfg.sic_factor * std::sqrt(cfg.snr_self * cfg.noise_power), rng);
  const double sigma = std::sqrt(cfg.noise_power / 2);
  c.noise.resize(n);
  for (int i = 0; i < n; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    c.noise[i] = {sigma * re, sigma * im};
  }
  return c;
}

SampleVector assemble(Hypothesis h, const Components& c) {
  switch (h) {
    case Hypothesis::H0:
      return c.noise;
    case Hypothesis::H1:
      return c.other + c.noise;
    case Hypothesis::H2:
      return c.self + c.noise;
    case Hypothesis::H3:
      return c.self + c.other + c.noise;
  }
  return c.noise;
}

}  // namespace

std::string_view to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H0:
      return "H0";
    case Hypothesis::H1:
      return "H1";
    case Hypothesis::H2:
      return "H2";
    case Hypothesis::H3:
      return "H3";
  }
  return "?";
}

std::string_view to_string(Modulation m) { return m == Modulation::Bpsk ? "bpsk" : "qpsk"; }

Modulation parse_modulation(std::string_view name) {
  if (name == "bpsk" || name == "BPSK") return Modulation::Bpsk;
  if (name == "qpsk" || name == "QPSK") return Modulation::Qpsk;
  throw ConfigError("unknown modulation '" + std::string(name) + "' (expected bpsk or qpsk)");
}

int num_samples(const SensingWindow& window) {
  if (!(window.sensing_time > 0) || !(window.sample_rate > 0)) {
    throw DomainError("sensing window needs positive sensing_time and sample_rate");
  }
  // Guard the floor against products such as 1e-3 * 1e6 landing just below an integer.
  const double product = window.sensing_time * window.sample_rate;
  const double n = std::floor(product * (1 + 8 * std::numeric_limits<double>::epsilon()));
  if (n < 1) throw DomainError("sensing window is shorter than one sample");
  if (n > std::numeric_limits<int>::max()) throw DomainError("sensing window is too long");
  return static_cast<int>(n);
}

SampleBlock generate(Hypothesis hypothesis, const DetectorConfig& cfg, RandomStream& rng,
                     Modulation modulation) {
  const Components c = draw_components(cfg, rng, modulation);
  return {assemble(hypothesis, c), hypothesis, cfg};
}

std::array<SampleBlock, 4> generate_coupled(const DetectorConfig& cfg, RandomStream& rng,
                                            Modulation modulation) {
  const Components c = draw_components(cfg, rng, modulation);
  return {SampleBlock{assemble(Hypothesis::H0, c), Hypothesis::H0, cfg},
          SampleBlock{assemble(Hypothesis::H1, c), Hypothesis::H1, cfg},
          SampleBlock{assemble(Hypothesis::H2, c), Hypothesis::H2, cfg},
          SampleBlock{assemble(Hypothesis::H3, c), Hypothesis::H3, cfg}};
}

double energy(const Eigen::Ref<const SampleVector>& samples) {
  if (samples.size() == 0) throw DomainError("energy of an empty block");
  return samples.squaredNorm() / static_cast<double>(samples.size());
}

double energy(const SampleBlock& block) { return energy(block.samples); }

}  // namespace fdsense
