#include "nrpos/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nrpos/error.hpp"
#include "nrpos/rng.hpp"

namespace nrpos::channel {

ChannelProfile::ChannelProfile(std::vector<ChannelTap> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "channel profile needs at least one tap");
  }
  for (const auto& t : taps_) {
    if (!std::isfinite(t.delay_s) || t.delay_s < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "tap delays must be finite and non-negative");
    }
    if (!std::isfinite(t.gain.real()) || !std::isfinite(t.gain.imag())) {
      throw Error(ErrorCode::InvalidArgument, "tap gains must be finite");
    }
  }
  std::stable_sort(taps_.begin(), taps_.end(),
                   [](const ChannelTap& a, const ChannelTap& b) { return a.delay_s < b.delay_s; });
  for (std::size_t m = 1; m < taps_.size(); ++m) {
    if (taps_[m].delay_s == taps_[m - 1].delay_s) {
      throw Error(ErrorCode::DuplicateDelay,
                  "two taps share the delay " + std::to_string(taps_[m].delay_s) + " s");
    }
  }
}

bool NoiseSpec::enabled() const noexcept { return std::isfinite(snr_db); }

double NoiseSpec::variance() const noexcept {
  return enabled() ? std::pow(10.0, -snr_db / 10.0) : 0.0;
}

ChannelProfile los_profile(const Position2D& gnb, const Position2D& ue) {
  return ChannelProfile(std::vector<ChannelTap>{{time_of_flight(gnb, ue), {1.0, 0.0}}});
}

ChannelProfile multipath_profile(const Position2D& gnb, const Position2D& ue,
                                 std::span<const Echo> echoes) {
  const double tof = time_of_flight(gnb, ue);
  std::vector<ChannelTap> taps;
  taps.reserve(echoes.size() + 1);
  taps.push_back({tof, {1.0, 0.0}});
  for (const auto& e : echoes) {
    if (!(e.excess_delay_s > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "echo excess delays must be positive");
    }
    taps.push_back({tof + e.excess_delay_s, e.gain});
  }
  return ChannelProfile(std::move(taps));
}

std::vector<std::complex<double>> frequency_response(const ChannelProfile& profile,
                                                     std::span<const double> freqs_hz) {
  std::vector<std::complex<double>> h(freqs_hz.size(), {0.0, 0.0});
  for (const auto& tap : profile.taps()) {
    const double w = -2.0 * std::numbers::pi * tap.delay_s;
    for (std::size_t k = 0; k < freqs_hz.size(); ++k) {
      h[k] += tap.gain * std::polar(1.0, w * freqs_hz[k]);
    }
  }
  return h;
}

prs::ResourceGrid apply_channel(const prs::ResourceGrid& grid, const ChannelProfile& profile,
                                const NoiseSpec& noise, double timing_offset_s) {
  const int n_sc = grid.num_subcarriers();
  std::vector<double> freqs(static_cast<std::size_t>(n_sc));
  for (int k = 0; k < n_sc; ++k) freqs[static_cast<std::size_t>(k)] = grid.subcarrier_frequency(k);

  auto h = frequency_response(profile, freqs);
  if (timing_offset_s != 0.0) {
    const double w = -2.0 * std::numbers::pi * timing_offset_s;
    for (std::size_t k = 0; k < h.size(); ++k) h[k] *= std::polar(1.0, w * freqs[k]);
  }

  prs::ResourceGrid out = grid;
  for (int l = 0; l < out.num_symbols(); ++l) {
    auto row = out.symbol(l);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] != std::complex<double>{}) row[k] *= h[k];
    }
  }

  if (noise.enabled()) {
    Rng rng(noise.rng_seed);
    const double sigma = std::sqrt(noise.variance() / 2.0);
    // Real and imaginary parts in RE order.
    auto values = out.data();
    std::vector<double> draws(2 * values.size());
    rng.fill_normal(draws);
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] += std::complex<double>(sigma * draws[2 * i], sigma * draws[2 * i + 1]);
    }
  }
  return out;
}

double rms_delay_spread(const ChannelProfile& profile) {
  double total = 0.0;
  double mean = 0.0;
  for (const auto& t : profile.taps()) {
    const double p = std::norm(t.gain);
    total += p;
    mean += p * t.delay_s;
  }
  if (total == 0.0) return 0.0;
  mean /= total;
  double var = 0.0;
  for (const auto& t : profile.taps()) {
    const double dt = t.delay_s - mean;
    var += std::norm(t.gain) * dt * dt;
  }
  return std::sqrt(var / total);
}

}  // namespace nrpos::channel
