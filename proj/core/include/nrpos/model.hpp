#pragma once

#include <cstddef>
#include <vector>

namespace nrpos {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

struct Position2D {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const Position2D&, const Position2D&) = default;
};

bool is_finite(const Position2D& p) noexcept;

// gNB ids are 1-based; id 1 is the reference transmitter.
struct GnbDeployment {
  std::vector<Position2D> positions;
  double carrier_hz = 3.6e9;
  double scs_hz = 30e3;
  int n_prb = 106;

  std::size_t size() const noexcept { return positions.size(); }
  const Position2D& gnb(int gnb_id) const;  // throws InvalidArgument on a bad id

  // Throws InvalidArgument when fewer than three gNBs are given, two share a
  // location, a coordinate is non-finite, or scs/n_prb are not positive.
  void validate() const;
};

double euclidean_distance(const Position2D& a, const Position2D& b) noexcept;

// Line-of-sight propagation time in seconds.
double time_of_flight(const Position2D& gnb, const Position2D& ue) noexcept;

}  // namespace nrpos
