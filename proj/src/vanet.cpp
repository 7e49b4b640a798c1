#include "fdsense/vanet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

#include <boost/random/poisson_distribution.hpp>

#include "fdsense/waveform.hpp"

namespace fdsense {

namespace {

enum class State { Idle, Pending, Transmitting };

struct Vehicle {
  double position = 0.0;
  State state = State::Idle;
  bool queued = false;  // a CAM arrived while this vehicle was on air
  std::int64_t tx_start = 0;
  std::int64_t tx_last = 0;
  std::int64_t first_overlap = -1;
  bool aborted = false;
  bool abort_on_overlap = false;
};

// Stream identifiers below the run seed.
enum StreamId : std::uint64_t {
  kPlacement = 0,
  kPhase = 1,
  kSenseBefore = 2,
  kSenseDuring = 3,
  kFadeBefore = 4,
  kFadeDuring = 5,
  kWaveBefore = 6,
  kWaveDuring = 7,
};

std::int64_t to_slots(double seconds, double slot) {
  return static_cast<std::int64_t>(std::llround(seconds / slot));
}

class Simulator {
 public:
  explicit Simulator(const VanetScenario& s)
      : s_(s),
        design_(s.design_detector()),
        eps_(thresholds(design_, s.targets)),
        slot_(s.sensing_time),
        total_slots_(to_slots(s.sim_duration, slot_)),
        packet_slots_(to_slots(s.packet_duration, slot_)),
        period_slots_(std::max<std::int64_t>(1, to_slots(s.cam_interval, slot_))),
        sense_before_(s.seed, {kSenseBefore}),
        sense_during_(s.seed, {kSenseDuring}),
        fade_before_(s.seed, {kFadeBefore}),
        fade_during_(s.seed, {kFadeDuring}),
        wave_before_(s.seed, {kWaveBefore}),
        wave_during_(s.seed, {kWaveDuring}) {
    RandomStream placement(s.seed, {kPlacement});
    const std::vector<double> positions = place_vehicles(s.density, s.road_length, placement);
    vehicles_.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) vehicles_[i].position = positions[i];

    RandomStream phase(s.seed, {kPhase});
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const auto first = static_cast<std::int64_t>(phase.uniform() * static_cast<double>(period_slots_));
      arrivals_.emplace(first, i);
    }

    metrics_.total_slots = total_slots_;
    metrics_.slot_duration = slot_;
    metrics_.thresholds = eps_;
    metrics_.positions = positions;
    metrics_.airtime.resize(vehicles_.size());
  }

  VanetMetrics run() {
    std::int64_t k = 0;
    while (k < total_slots_) {
      k = skip_quiet_slots(k);
      if (k >= total_slots_) break;
      process_arrivals(k);
      sense_during(k);
      const std::vector<std::size_t> starting = sense_before(k);
      finish_transmissions(k);
      for (std::size_t v : starting) transmitting_.push_back(v);
      ++k;
    }
    finalize();
    return std::move(metrics_);
  }

 private:
  bool full_duplex() const { return s_.mode == DuplexMode::FullDuplexCd; }

  bool in_range(std::size_t a, std::size_t b) const {
    return std::abs(vehicles_[a].position - vehicles_[b].position) <= s_.tx_range;
  }

  // Sum of received SNRs at vehicle `self` from in-range transmitters, and
  // whether any exists.
  std::pair<bool, double> aggregate(std::size_t self, RandomStream& fading) const {
    bool any = false;
    double total = 0.0;
    for (std::size_t other : transmitting_) {
      if (other == self || !in_range(self, other)) continue;
      any = true;
      total += snr_at(std::abs(vehicles_[self].position - vehicles_[other].position), s_, fading);
    }
    return {any, total};
  }

  // Between events nothing random happens when no vehicle is sensing, so jump
  // to the next arrival or transmission end.
  std::int64_t skip_quiet_slots(std::int64_t k) const {
    if (!pending_.empty()) return k;
    if (full_duplex() && !transmitting_.empty()) return k;
    std::int64_t next = arrivals_.empty() ? total_slots_ : arrivals_.top().first;
    for (std::size_t v : transmitting_) {
      if (vehicles_[v].tx_start >= k) return k;  // overlap not yet recorded
      next = std::min(next, vehicles_[v].tx_last);
    }
    return std::max(k, next);
  }

  void process_arrivals(std::int64_t k) {
    while (!arrivals_.empty() && arrivals_.top().first <= k) {
      const auto [slot, i] = arrivals_.top();
      arrivals_.pop();
      arrivals_.emplace(slot + period_slots_, i);
      Vehicle& v = vehicles_[i];
      switch (v.state) {
        case State::Idle:
          v.state = State::Pending;
          pending_.push_back(i);
          break;
        case State::Pending:
          break;  // the stale CAM is replaced by the fresh one
        case State::Transmitting:
          v.queued = true;
          break;
      }
    }
  }

  bool detect_before(double snr) {
    const DetectorConfig cfg = design_.with_snr_other(snr);
    if (s_.sample_level) {
      const Hypothesis h = snr > 0 ? Hypothesis::H1 : Hypothesis::H0;
      return decide(energy(generate(h, cfg, wave_before_)), eps_.eps_before);
    }
    const double p = snr > 0 ? pd_before(cfg, eps_.eps_before) : pf_before(cfg, eps_.eps_before);
    return sense_before_.bernoulli(p);
  }

  bool detect_during(bool overlapped, double snr) {
    if (!overlapped && s_.pf_override) return sense_during_.bernoulli(*s_.pf_override);
    const DetectorConfig cfg = design_.with_snr_other(overlapped ? snr : 0.0);
    if (s_.sample_level) {
      const Hypothesis h = overlapped ? Hypothesis::H3 : Hypothesis::H2;
      return decide(energy(generate(h, cfg, wave_during_)), eps_.eps_during);
    }
    const double p = overlapped ? pd_during(cfg, eps_.eps_during) : pf_during(cfg, eps_.eps_during);
    return sense_during_.bernoulli(p);
  }

  void sense_during(std::int64_t k) {
    for (std::size_t i : transmitting_) {
      const auto [overlapped, snr] =
          full_duplex() ? aggregate(i, fade_during_) : std::pair{any_in_range(i), 0.0};
      Vehicle& v = vehicles_[i];
      if (overlapped && v.first_overlap < 0) v.first_overlap = k;
      if (full_duplex() && detect_during(overlapped, snr)) {
        // Aborts take effect at the end of this slot.
        v.tx_last = k;
        v.aborted = true;
        v.abort_on_overlap = overlapped;
      }
    }
  }

  bool any_in_range(std::size_t self) const {
    return std::any_of(transmitting_.begin(), transmitting_.end(),
                       [&](std::size_t o) { return o != self && in_range(self, o); });
  }

  std::vector<std::size_t> sense_before(std::int64_t k) {
    std::vector<std::size_t> starting;
    std::erase_if(pending_, [&](std::size_t i) {
      const auto [occupied, snr] = aggregate(i, fade_before_);
      if (detect_before(occupied ? std::max(snr, 0.0) : 0.0)) return false;
      // A CAM that cannot finish inside the run is never started.
      if (k + packet_slots_ >= total_slots_) return false;
      Vehicle& v = vehicles_[i];
      v.state = State::Transmitting;
      v.tx_start = k + 1;
      v.tx_last = k + packet_slots_;
      v.first_overlap = -1;
      v.aborted = false;
      v.abort_on_overlap = false;
      ++metrics_.attempts;
      starting.push_back(i);
      return true;
    });
    return starting;
  }

  void finish_transmissions(std::int64_t k) {
    std::erase_if(transmitting_, [&](std::size_t i) {
      Vehicle& v = vehicles_[i];
      if (v.tx_last != k) return false;
      const std::int64_t slots = v.tx_last - v.tx_start + 1;
      VehicleAirtime& air = metrics_.airtime[i];
      if (v.first_overlap >= 0) {
        ++metrics_.collisions;
        collision_slots_ += v.tx_last - v.first_overlap + 1;
        air.collided += slots;
        if (v.aborted && v.abort_on_overlap) ++metrics_.detected_collisions;
        if (v.aborted && !v.abort_on_overlap) ++metrics_.false_alarms;
      } else if (v.aborted) {
        ++metrics_.false_alarms;
        air.aborted += slots;
      } else {
        air.successful += slots;
      }
      if (v.queued) {
        v.queued = false;
        v.state = State::Pending;
        pending_.push_back(i);
      } else {
        v.state = State::Idle;
      }
      return true;
    });
  }

  void finalize() {
    std::int64_t successful = 0;
    for (VehicleAirtime& air : metrics_.airtime) {
      air.idle = total_slots_ - air.successful - air.collided - air.aborted;
      successful += air.successful;
    }
    metrics_.total_collision_time = static_cast<double>(collision_slots_) * slot_;
    if (!vehicles_.empty() && total_slots_ > 0) {
      metrics_.normalized_throughput =
          static_cast<double>(successful) /
          (static_cast<double>(vehicles_.size()) * static_cast<double>(total_slots_));
    }
  }

  const VanetScenario& s_;
  DetectorConfig design_;
  ThresholdPair eps_;
  double slot_;
  std::int64_t total_slots_;
  std::int64_t packet_slots_;
  std::int64_t period_slots_;

  std::vector<Vehicle> vehicles_;
  std::priority_queue<std::pair<std::int64_t, std::size_t>,
                      std::vector<std::pair<std::int64_t, std::size_t>>, std::greater<>>
      arrivals_;
  std::vector<std::size_t> pending_;
  std::vector<std::size_t> transmitting_;
  std::int64_t collision_slots_ = 0;

  RandomStream sense_before_;
  RandomStream sense_during_;
  RandomStream fade_before_;
  RandomStream fade_during_;
  RandomStream wave_before_;
  RandomStream wave_during_;

  VanetMetrics metrics_;
};

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::string_view to_string(DuplexMode mode) {
  return mode == DuplexMode::HalfDuplex ? "HD" : "FD-CD";
}

DuplexMode parse_duplex_mode(std::string_view name) {
  if (name == "HD" || name == "hd") return DuplexMode::HalfDuplex;
  if (name == "FD-CD" || name == "fd-cd" || name == "FD" || name == "fd")
    return DuplexMode::FullDuplexCd;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected HD or FD-CD)");
}

std::string_view to_string(FadingModel fading) {
  return fading == FadingModel::Off ? "off" : "rayleigh-block";
}

FadingModel parse_fading(std::string_view name) {
  if (name == "off" || name == "none") return FadingModel::Off;
  if (name == "rayleigh-block" || name == "rayleigh") return FadingModel::RayleighBlock;
  throw ConfigError("unknown fading model '" + std::string(name) + "'");
}

void VanetScenario::validate() const {
  auto positive = [](double x, const char* what) {
    if (!(x > 0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be positive");
  };
  if (!(density >= 0) || !std::isfinite(density)) throw DomainError("density must be >= 0");
  positive(road_length, "road_length");
  positive(tx_range, "tx_range");
  positive(packet_duration, "packet_duration");
  positive(cam_interval, "cam_interval");
  positive(sensing_time, "sensing_time");
  positive(sample_rate, "sample_rate");
  positive(sim_duration, "sim_duration");
  positive(path_loss_exponent, "path_loss_exponent");
  if (!(max_snr_gain_db >= 0)) throw DomainError("max_snr_gain_db must be >= 0");
  if (!(sensing_time < packet_duration))
    throw DomainError("sensing_time must be shorter than packet_duration");
  if (pf_override && !(*pf_override >= 0 && *pf_override <= 1))
    throw DomainError("pf_override must lie in [0, 1]");
  if (!std::isfinite(edge_snr_db)) throw DomainError("edge_snr_db must be finite");
  detector.validate();
  targets.validate();
}

DetectorConfig VanetScenario::design_detector() const {
  validate();
  DetectorConfig cfg = detector;
  cfg.num_samples = num_samples(SensingWindow{sensing_time, sample_rate});
  cfg.snr_other = db_to_linear(edge_snr_db);
  return cfg;
}

std::vector<double> place_vehicles(double density, double road_length, RandomStream& rng) {
  if (!(density >= 0)) throw DomainError("density must be >= 0");
  if (!(road_length > 0)) throw DomainError("road_length must be positive");
  const double mean = density * road_length;
  std::vector<double> positions;
  if (mean <= 0) return positions;
  boost::random::poisson_distribution<std::int64_t, double> count(mean);
  const std::int64_t n = count(rng.engine());
  positions.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) positions.push_back(rng.uniform() * road_length);
  std::sort(positions.begin(), positions.end());
  return positions;
}

double snr_at(double distance, const VanetScenario& scenario, RandomStream& rng) {
  if (!(distance >= 0)) throw DomainError("distance must be >= 0");
  if (distance > scenario.tx_range) return 0.0;
  const double cap_db = scenario.edge_snr_db + scenario.max_snr_gain_db;
  double snr_db = cap_db;
  if (distance > 0) {
    snr_db = std::min(cap_db, scenario.edge_snr_db + 10 * scenario.path_loss_exponent *
                                                         std::log10(scenario.tx_range / distance));
  }
  double snr = db_to_linear(snr_db);
  if (scenario.fading == FadingModel::RayleighBlock) snr *= rng.exponential();
  return snr;
}

VanetMetrics simulate(const VanetScenario& scenario) {
  scenario.validate();
  return Simulator(scenario).run();
}

DensitySweep sweep_density(const VanetScenario& base, std::span<const double> densities,
                           int repetitions, std::span<const DuplexMode> modes) {
  if (densities.empty()) throw DomainError("density list is empty");
  if (repetitions < 1) throw DomainError("repetitions must be >= 1");
  static constexpr DuplexMode kBoth[] = {DuplexMode::HalfDuplex, DuplexMode::FullDuplexCd};
  if (modes.empty()) modes = kBoth;

  std::vector<std::size_t> order(densities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return densities[a] < densities[b]; });
  std::vector<DuplexMode> sorted_modes(modes.begin(), modes.end());
  std::sort(sorted_modes.begin(), sorted_modes.end());

  DensitySweep out;
  for (std::size_t i : order) {
    for (DuplexMode mode : sorted_modes) {
      std::vector<double> collision_time, throughput, attempts, collisions, detected, false_alarms;
      for (int r = 0; r < repetitions; ++r) {
        VanetScenario s = base;
        s.density = densities[i];
        s.mode = mode;
        s.seed = derive_seed(base.seed, {i, static_cast<std::uint64_t>(r)});
        VanetMetrics m = simulate(s);
        collision_time.push_back(m.total_collision_time);
        throughput.push_back(m.normalized_throughput);
        attempts.push_back(static_cast<double>(m.attempts));
        collisions.push_back(static_cast<double>(m.collisions));
        detected.push_back(static_cast<double>(m.detected_collisions));
        false_alarms.push_back(static_cast<double>(m.false_alarms));
        out.replicates.push_back({densities[i], mode, r, std::move(m)});
      }
      out.summary.push_back({densities[i], mode, repetitions, mean_of(collision_time),
                             std_of(collision_time), mean_of(throughput), std_of(throughput),
                             mean_of(attempts), mean_of(collisions), mean_of(detected),
                             mean_of(false_alarms)});
    }
  }
  return out;
}

}  // namespace fdsense
