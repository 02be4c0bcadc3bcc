#pragma once

#include <complex>
#include <initializer_list>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nrpos/model.hpp"
#include "nrpos/prs.hpp"

namespace nrpos::channel {

struct ChannelTap {
  double delay_s = 0.0;              // absolute propagation delay
  std::complex<double> gain{1.0, 0.0};
};

// Tap set sorted by strictly increasing delay; the first tap is the first
// arriving path.
class ChannelProfile {
 public:
  // Sorts the taps. Throws DuplicateDelay when two delays coincide and
  // InvalidArgument for an empty list, a negative or non-finite delay, or a
  // non-finite gain.
  explicit ChannelProfile(std::vector<ChannelTap> taps);
  ChannelProfile(std::initializer_list<ChannelTap> taps)
      : ChannelProfile(std::vector<ChannelTap>(taps)) {}

  std::span<const ChannelTap> taps() const noexcept { return taps_; }
  std::size_t size() const noexcept { return taps_.size(); }
  double first_arrival_s() const noexcept { return taps_.front().delay_s; }

 private:
  std::vector<ChannelTap> taps_;
};

struct Echo {
  double excess_delay_s = 0.0;  // relative to the line-of-sight tap, > 0
  std::complex<double> gain{0.0, 0.0};
};

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();  // per occupied RE, unit PRS power
  std::uint64_t rng_seed = 0;

  bool enabled() const noexcept;
  double variance() const noexcept;  // complex noise power per RE
};

ChannelProfile los_profile(const Position2D& gnb, const Position2D& ue);

ChannelProfile multipath_profile(const Position2D& gnb, const Position2D& ue,
                                 std::span<const Echo> echoes);

// H(f) = sum_m g_m exp(-i 2 pi f tau_m).
std::vector<std::complex<double>> frequency_response(const ChannelProfile& profile,
                                                     std::span<const double> freqs_hz);

// Multiplies every RE by H at its subcarrier frequency and adds i.i.d.
// circular Gaussian noise to every RE. timing_offset_s shifts the whole
// received signal in time (receiver clock offset); it may be negative.
prs::ResourceGrid apply_channel(const prs::ResourceGrid& grid, const ChannelProfile& profile,
                                const NoiseSpec& noise, double timing_offset_s = 0.0);

// Power-weighted standard deviation of the tap delays.
double rms_delay_spread(const ChannelProfile& profile);

}  // namespace nrpos::channel
