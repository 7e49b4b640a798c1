#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace fdsense {

/// SplitMix64 finaliser; a bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a path of keys. Distinct paths
/// give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Seeded random stream. Boost distributions are used because their output is
/// specified by the algorithm, which keeps results identical across standard
/// library implementations.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : RandomStream(derive_seed(seed, path)) {}

  /// Independent child stream; does not advance this stream.
  RandomStream split(std::uint64_t key) const { return RandomStream(seed_, {key}); }

  std::uint64_t seed() const { return seed_; }
  Engine& engine() { return engine_; }

  std::uint64_t bits() { return engine_(); }
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  double exponential() { return exponential_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  Engine engine_;
  boost::random::uniform_01<double> uniform_;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
};

}  // namespace fdsense
