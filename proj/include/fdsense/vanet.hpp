#pragma once

// Broadcast contention on a straight road: vehicles placed as a Poisson
// process send periodic CAMs after sensing the channel. Half-duplex vehicles
// are deaf while transmitting; full-duplex vehicles keep sensing and abort as
// soon as they declare a collision.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fdsense/detector_math.hpp"
#include "fdsense/random.hpp"

namespace fdsense {

enum class DuplexMode { HalfDuplex, FullDuplexCd };
enum class FadingModel { Off, RayleighBlock };

std::string_view to_string(DuplexMode mode);
DuplexMode parse_duplex_mode(std::string_view name);
std::string_view to_string(FadingModel fading);
FadingModel parse_fading(std::string_view name);

struct VanetScenario {
  double density = 0.0;            // vehicles per km
  double road_length = 4.0;        // km
  double tx_range = 1.0;           // km; sensing range equals transmission range
  double packet_duration = 0.5e-3; // s
  double cam_interval = 0.1;       // s
  double sensing_time = 20e-6;     // s; also the simulation slot
  double sample_rate = 20e6;       // Hz; N = floor(sensing_time * sample_rate)
  double sim_duration = 10.0;      // s
  DuplexMode mode = DuplexMode::HalfDuplex;
  // num_samples is taken from the sensing window and snr_other is set per
  // decision; the remaining fields (noise, snr_self, sic_factor) apply as is.
  DetectorConfig detector;
  TargetProbabilities targets;
  std::optional<double> pf_override;  // pins the in-transmission false-alarm rate
  FadingModel fading = FadingModel::Off;
  double edge_snr_db = -10.0;       // received SNR at distance tx_range
  double path_loss_exponent = 3.0;
  double max_snr_gain_db = 40.0;    // SNR cap above the edge value
  bool sample_level = false;        // draw energies from synthesized blocks
  std::uint64_t seed = 1;

  /// Throws DomainError on any invalid field.
  void validate() const;

  /// Detector used for threshold design: window N and the edge SNR.
  DetectorConfig design_detector() const;
};

/// Per-vehicle airtime breakdown in slots. The four parts sum to total_slots.
struct VehicleAirtime {
  std::int64_t successful = 0;
  std::int64_t collided = 0;
  std::int64_t aborted = 0;
  std::int64_t idle = 0;
};

struct VanetMetrics {
  double total_collision_time = 0.0;  // s, summed over colliding transmissions
  double normalized_throughput = 0.0; // successful airtime / (vehicles * duration)
  std::uint64_t attempts = 0;
  std::uint64_t collisions = 0;
  std::uint64_t detected_collisions = 0;
  std::uint64_t false_alarms = 0;     // aborts declared while no other vehicle was on air
  std::int64_t total_slots = 0;
  double slot_duration = 0.0;
  ThresholdPair thresholds;
  std::vector<double> positions;      // km
  std::vector<VehicleAirtime> airtime;
};

/// Poisson(density * road_length) vehicles, positions i.i.d. uniform on
/// [0, road_length], sorted.
std::vector<double> place_vehicles(double density, double road_length, RandomStream& rng);

/// Linear received SNR at `distance` km from a transmitter. Log-distance path
/// loss anchored at the edge SNR at tx_range, capped at edge + max_snr_gain_db,
/// optionally multiplied by a unit-mean exponential (Rayleigh power) factor.
/// Zero beyond tx_range.
double snr_at(double distance, const VanetScenario& scenario, RandomStream& rng);

VanetMetrics simulate(const VanetScenario& scenario);

struct ReplicateRow {
  double density = 0.0;
  DuplexMode mode = DuplexMode::HalfDuplex;
  int replicate = 0;
  VanetMetrics metrics;
};

struct SummaryRow {
  double density = 0.0;
  DuplexMode mode = DuplexMode::HalfDuplex;
  int replicates = 0;
  double collision_time_mean = 0.0;
  double collision_time_std = 0.0;
  double throughput_mean = 0.0;
  double throughput_std = 0.0;
  double attempts_mean = 0.0;
  double collisions_mean = 0.0;
  double detected_mean = 0.0;
  double false_alarms_mean = 0.0;
};

struct DensitySweep {
  std::vector<ReplicateRow> replicates;  // sorted by (density, mode, replicate)
  std::vector<SummaryRow> summary;       // sorted by (density, mode)
};

/// Replicate r at density index i uses the seed derived from (base.seed, i, r)
/// in every mode, so modes are compared on identical placements.
DensitySweep sweep_density(const VanetScenario& base, std::span<const double> densities,
                           int repetitions,
                           std::span<const DuplexMode> modes = {});

}  // namespace fdsense
