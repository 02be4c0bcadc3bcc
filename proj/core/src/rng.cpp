#include "nrpos/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace nrpos {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t scenario_seed, std::uint64_t gnb_id,
                          std::uint64_t trial_id, StreamPurpose purpose) noexcept {
  std::uint64_t h = mix64(scenario_seed);
  h = mix64(h ^ gnb_id);
  h = mix64(h ^ trial_id);
  return mix64(h ^ static_cast<std::uint64_t>(purpose));
}

double Rng::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  return boost::random::normal_distribution<double>{}(engine_);
}

void Rng::fill_normal(std::span<double> out) noexcept {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v = dist(engine_);
}

}  // namespace nrpos
