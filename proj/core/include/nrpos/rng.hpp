#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nrpos {

// Purpose tags keep the streams for different consumers of one
// (scenario, gNB, trial) triple apart.
enum class StreamPurpose : std::uint64_t {
  SessionOffsets = 1,
  UeOffset = 2,
  TimingJitter = 3,
  GridNoise = 4,
  StudyDelay = 5,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// child = mix(mix(mix(mix(seed) ^ gnb_id) ^ trial_id) ^ purpose), each step
// adding the SplitMix64 increment before finalizing. Pure integer arithmetic,
// so the same seeds come out on every platform.
std::uint64_t derive_seed(std::uint64_t scenario_seed, std::uint64_t gnb_id,
                          std::uint64_t trial_id, StreamPurpose purpose) noexcept;

// mt19937_64 with distributions of fixed algorithm. std::normal_distribution is
// implementation-defined, which would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal, Boost.Random ziggurat.
  double normal() noexcept;
  // Same draws as calling normal() out.size() times.
  void fill_normal(std::span<double> out) noexcept;

 private:
  std::mt19937_64 engine_;
};

}  // namespace nrpos
