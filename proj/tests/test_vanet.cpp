#include <doctest.h>

#include <cmath>
#include <vector>

#include "fdsense/vanet.hpp"
#include "test_support.hpp"

using namespace fdsense;

namespace {

VanetScenario short_run(double density, DuplexMode mode, std::uint64_t seed) {
  VanetScenario s;
  s.density = density;
  s.mode = mode;
  s.seed = seed;
  s.sim_duration = 1.0;
  return s;
}

void check_invariants(const VanetScenario& s, const VanetMetrics& m) {
  CHECK(m.normalized_throughput >= 0.0);
  CHECK(m.normalized_throughput <= 1.0);
  CHECK(m.detected_collisions <= m.collisions);
  CHECK(m.total_collision_time <= static_cast<double>(m.attempts) * s.packet_duration + 1e-12);
  REQUIRE(m.airtime.size() == m.positions.size());
  std::int64_t successful = 0;
  for (const VehicleAirtime& a : m.airtime) {
    CHECK(a.idle >= 0);
    CHECK(a.successful + a.collided + a.aborted + a.idle == m.total_slots);
    successful += a.successful;
  }
  if (!m.positions.empty()) {
    CHECK(m.normalized_throughput ==
          doctest::Approx(static_cast<double>(successful) /
                          (static_cast<double>(m.positions.size()) * static_cast<double>(m.total_slots))));
  }
}

}  // namespace

TEST_SUITE("vanet") {

TEST_CASE("place_vehicles") {
  RandomStream rng(1);
  CHECK(place_vehicles(0.0, 10.0, rng).empty());

  double total = 0.0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    RandomStream s(2, {r});
    const auto p = place_vehicles(100.0, 10.0, s);
    total += static_cast<double>(p.size());
    if (r == 0) {
      CHECK(std::is_sorted(p.begin(), p.end()));
      CHECK(p.front() >= 0.0);
      CHECK(p.back() <= 10.0);
    }
  }
  CHECK(std::abs(total / 1000 - 1000) <= 3 * std::sqrt(1000.0));

  // Counts in disjoint halves are uncorrelated.
  std::vector<double> left, right;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    RandomStream s(3, {r});
    double l = 0, h = 0;
    for (double x : place_vehicles(20.0, 1.0, s)) (x < 0.5 ? l : h) += 1;
    left.push_back(l);
    right.push_back(h);
  }
  const auto [ml, vl] = test::mean_variance(left);
  const auto [mr, vr] = test::mean_variance(right);
  double cov = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) cov += (left[i] - ml) * (right[i] - mr);
  cov /= static_cast<double>(left.size() - 1);
  CHECK(std::abs(cov / std::sqrt(vl * vr)) < 0.04);
  CHECK(ml == doctest::Approx(10.0).epsilon(0.02));

  RandomStream a(4), b(4);
  CHECK(place_vehicles(30.0, 2.0, a) == place_vehicles(30.0, 2.0, b));
  CHECK_THROWS_AS(place_vehicles(-1.0, 2.0, a), DomainError);
}

TEST_CASE("snr_at") {
  VanetScenario s;
  RandomStream rng(5);
  CHECK(snr_at(s.tx_range, s, rng) == db_to_linear(s.edge_snr_db));
  CHECK(snr_at(0.0, s, rng) == db_to_linear(s.edge_snr_db + 40.0));
  CHECK(snr_at(s.tx_range * 1.001, s, rng) == 0.0);
  CHECK(snr_at(s.tx_range / 2, s, rng) > snr_at(s.tx_range / 1.5, s, rng));
  CHECK(snr_at(s.tx_range / 10, s, rng) ==
        doctest::Approx(db_to_linear(s.edge_snr_db + 30.0)).epsilon(1e-12));
  CHECK_THROWS_AS(snr_at(-0.1, s, rng), DomainError);

  s.fading = FadingModel::RayleighBlock;
  const double distance = 0.4 * s.tx_range;
  VanetScenario plain = s;
  plain.fading = FadingModel::Off;
  const double deterministic = snr_at(distance, plain, rng);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += snr_at(distance, s, rng);
  CHECK(std::abs(sum / 100000 / deterministic - 1.0) < 0.01);
}

TEST_CASE("scenario validation") {
  VanetScenario s;
  CHECK_NOTHROW(s.validate());
  s.sensing_time = s.packet_duration;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = VanetScenario{};
  s.density = -1;
  CHECK_THROWS_AS(simulate(s), DomainError);
  s = VanetScenario{};
  s.pf_override = 1.5;
  CHECK_THROWS_AS(s.validate(), DomainError);
  CHECK(VanetScenario{}.design_detector().num_samples == 400);
  CHECK(parse_duplex_mode("FD-CD") == DuplexMode::FullDuplexCd);
  CHECK(parse_fading("rayleigh-block") == FadingModel::RayleighBlock);
  CHECK_THROWS_AS(parse_duplex_mode("simplex"), ConfigError);
}

TEST_CASE("empty network") {
  for (DuplexMode mode : {DuplexMode::HalfDuplex, DuplexMode::FullDuplexCd}) {
    const VanetMetrics m = simulate(short_run(0.0, mode, 1));
    CHECK(m.total_collision_time == 0.0);
    CHECK(m.normalized_throughput == 0.0);
    CHECK(m.attempts == 0);
  }
}

TEST_CASE("single vehicle without contention") {
  std::uint64_t seed = 0;
  VanetMetrics m;
  VanetScenario s;
  do {
    s = short_run(0.2, DuplexMode::FullDuplexCd, ++seed);
    s.sim_duration = 10.0;
    s.pf_override = 0.0;
    m = simulate(s);
  } while (m.positions.size() != 1);
  CHECK(m.total_collision_time == 0.0);
  CHECK(m.collisions == 0);
  CHECK(m.false_alarms == 0);
  // One CAM per period, each fully delivered, except a final one that would
  // overrun the end of the run.
  CHECK(m.attempts >= 99);
  CHECK(m.attempts <= 100);
  const double per_cam = s.packet_duration / s.sim_duration;
  CHECK(m.normalized_throughput == doctest::Approx(per_cam * static_cast<double>(m.attempts)));
  CHECK(m.normalized_throughput <= s.packet_duration / s.cam_interval + 1e-12);
  check_invariants(s, m);
}

TEST_CASE("full duplex equals half duplex when nothing overlaps") {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 40 && compared < 3; ++seed) {
    VanetScenario hd = short_run(1.0, DuplexMode::HalfDuplex, seed);
    const VanetMetrics h = simulate(hd);
    if (h.collisions != 0 || h.positions.size() < 2) continue;
    VanetScenario fd = hd;
    fd.mode = DuplexMode::FullDuplexCd;
    fd.pf_override = 0.0;
    const VanetMetrics f = simulate(fd);
    CHECK(f.normalized_throughput == h.normalized_throughput);
    CHECK(f.attempts == h.attempts);
    CHECK(f.total_collision_time == 0.0);
    ++compared;
  }
  CHECK(compared == 3);
}

TEST_CASE("invariants hold across modes, densities and options") {
  for (double density : {10.0, 60.0, 150.0}) {
    for (DuplexMode mode : {DuplexMode::HalfDuplex, DuplexMode::FullDuplexCd}) {
      VanetScenario s = short_run(density, mode, 7);
      check_invariants(s, simulate(s));
      s.fading = FadingModel::RayleighBlock;
      check_invariants(s, simulate(s));
      s.pf_override = 0.05;
      check_invariants(s, simulate(s));
    }
  }
}

TEST_CASE("sample-level sensing runs and agrees in kind") {
  VanetScenario s = short_run(20.0, DuplexMode::FullDuplexCd, 8);
  s.sim_duration = 0.3;
  s.sample_level = true;
  const VanetMetrics m = simulate(s);
  check_invariants(s, m);
  CHECK(m.attempts > 0);
}

TEST_CASE("collision detection shortens collisions on every seed") {
  for (double density : {50.0, 120.0}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const VanetMetrics h = simulate(short_run(density, DuplexMode::HalfDuplex, seed));
      const VanetMetrics f = simulate(short_run(density, DuplexMode::FullDuplexCd, seed));
      CHECK_MESSAGE(f.total_collision_time <= h.total_collision_time,
                    "density " << density << " seed " << seed);
    }
  }
}

TEST_CASE("throughput does not increase with the pinned false-alarm rate") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    double previous = 2.0;
    for (double pf : {0.0, 0.01, 0.1, 0.3}) {
      VanetScenario s = short_run(50.0, DuplexMode::FullDuplexCd, seed);
      s.pf_override = pf;
      const double t = simulate(s).normalized_throughput;
      CHECK_MESSAGE(t <= previous, "seed " << seed << " pf " << pf);
      previous = t;
    }
  }
}

TEST_CASE("sweep_density ordering, pairing and summaries") {
  VanetScenario base = short_run(0.0, DuplexMode::HalfDuplex, 11);
  base.sim_duration = 0.5;
  const std::vector<double> densities = {40.0, 0.0, 20.0};
  const DensitySweep sweep = sweep_density(base, densities, 3);
  REQUIRE(sweep.replicates.size() == 3 * 2 * 3);
  REQUIRE(sweep.summary.size() == 3 * 2);
  for (std::size_t i = 1; i < sweep.replicates.size(); ++i) {
    const auto& a = sweep.replicates[i - 1];
    const auto& b = sweep.replicates[i];
    const bool ordered = a.density < b.density ||
                         (a.density == b.density && (a.mode < b.mode ||
                                                     (a.mode == b.mode && a.replicate < b.replicate)));
    CHECK(ordered);
  }
  for (const SummaryRow& row : sweep.summary) {
    if (row.density == 0.0) {
      CHECK(row.collision_time_mean == 0.0);
      CHECK(row.throughput_mean == 0.0);
      CHECK(row.attempts_mean == 0.0);
    }
  }
  // Both modes see the same placement for a given replicate.
  const auto& hd = sweep.replicates[6];
  const auto& fd = sweep.replicates[9];
  CHECK(hd.mode == DuplexMode::HalfDuplex);
  CHECK(fd.mode == DuplexMode::FullDuplexCd);
  CHECK(hd.replicate == fd.replicate);
  CHECK(hd.metrics.positions == fd.metrics.positions);

  const DensitySweep again = sweep_density(base, densities, 3);
  for (std::size_t i = 0; i < sweep.replicates.size(); ++i) {
    CHECK(again.replicates[i].metrics.total_collision_time ==
          sweep.replicates[i].metrics.total_collision_time);
  }

  CHECK_THROWS_AS(sweep_density(base, {}, 3), DomainError);
  CHECK_THROWS_AS(sweep_density(base, densities, 0), DomainError);
}

}  // TEST_SUITE
