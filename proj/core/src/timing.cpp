#include "nrpos/timing.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "nrpos/error.hpp"

namespace nrpos::timing {

double TimingOffsets::delta(int gnb_id) const {
  if (gnb_id < 1 || static_cast<std::size_t>(gnb_id) > delta_s.size()) {
    throw Error(ErrorCode::InvalidArgument, "no offset for gNB " + std::to_string(gnb_id));
  }
  return delta_s[static_cast<std::size_t>(gnb_id - 1)];
}

void TimingOffsets::validate() const {
  if (delta_s.empty() || delta_s.front() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "the reference gNB offset must be exactly zero");
  }
  for (double d : delta_s) {
    if (!std::isfinite(d)) throw Error(ErrorCode::InvalidArgument, "non-finite inter-gNB offset");
  }
  if (!std::isfinite(phi_s)) throw Error(ErrorCode::InvalidArgument, "non-finite UE offset");
  if (!std::isfinite(noise_sigma_s) || noise_sigma_s < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "TOA noise sigma must be non-negative");
  }
}

double CalibrationResult::delta_hat(int gnb_id) const {
  if (gnb_id < 1 || static_cast<std::size_t>(gnb_id) > delta_hat_s.size()) {
    throw Error(ErrorCode::InvalidArgument, "no calibration for gNB " + std::to_string(gnb_id));
  }
  return delta_hat_s[static_cast<std::size_t>(gnb_id - 1)];
}

double simulate_toa(double true_tof_s, const TimingOffsets& offsets, int gnb_id, Rng& rng) {
  const double noise = offsets.noise_sigma_s > 0.0 ? offsets.noise_sigma_s * rng.normal() : 0.0;
  return true_tof_s + offsets.phi_s + offsets.delta(gnb_id) + noise;
}

double true_rstd(const Position2D& gnb_j, const Position2D& gnb_ref, const Position2D& ue) noexcept {
  return (euclidean_distance(gnb_j, ue) - euclidean_distance(gnb_ref, ue)) / kSpeedOfLight;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;
  double mean() const { return sum / static_cast<double>(count); }
};

}  // namespace

CalibrationResult calibrate(std::span<const ToaRecord> records, const GnbDeployment& deployment,
                            std::span<const Position2D> known_positions) {
  const std::size_t n_gnbs = deployment.size();
  if (n_gnbs < 2) throw Error(ErrorCode::InvalidArgument, "calibration needs at least two gNBs");

  // (position, trial) -> per-gNB TOA sums
  std::map<std::pair<int, int>, std::vector<Accumulator>> groups;
  for (const auto& r : records) {
    if (r.gnb_id < 1 || static_cast<std::size_t>(r.gnb_id) > n_gnbs) {
      throw Error(ErrorCode::InvalidArgument,
                  "record references unknown gNB " + std::to_string(r.gnb_id));
    }
    if (r.ue_position_id < 0 || static_cast<std::size_t>(r.ue_position_id) >= known_positions.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "record references unknown position " + std::to_string(r.ue_position_id));
    }
    auto& acc = groups[{r.ue_position_id, r.trial_id}];
    acc.resize(n_gnbs);
    acc[static_cast<std::size_t>(r.gnb_id - 1)].sum += r.toa_s;
    acc[static_cast<std::size_t>(r.gnb_id - 1)].count += 1;
  }

  // position -> per-gNB average of (measured - true) RSTD over its trials
  std::map<int, std::vector<Accumulator>> per_position;
  std::map<int, bool> has_reference;
  for (const auto& [key, acc] : groups) {
    const auto [position_id, trial_id] = key;
    const auto& ref = acc[0];
    if (ref.count == 0) {
      throw Error(ErrorCode::MissingReference,
                  "position " + std::to_string(position_id) + " trial " + std::to_string(trial_id) +
                      " has no reference-gNB TOA");
    }
    has_reference[position_id] = true;
    const auto& ue = known_positions[static_cast<std::size_t>(position_id)];
    auto& pos = per_position[position_id];
    pos.resize(n_gnbs);
    for (std::size_t j = 1; j < n_gnbs; ++j) {
      if (acc[j].count == 0) continue;
      const double rstd = measured_rstd(acc[j].mean(), ref.mean());
      const double truth = true_rstd(deployment.positions[j], deployment.positions[0], ue);
      pos[j].sum += rstd - truth;
      pos[j].count += 1;
    }
  }

  CalibrationResult result;
  result.delta_hat_s.assign(n_gnbs, 0.0);
  result.sample_count.assign(n_gnbs, 0);
  result.residual_std_s.assign(n_gnbs, 0.0);
  result.sample_count[0] = has_reference.size();

  for (std::size_t j = 1; j < n_gnbs; ++j) {
    std::vector<double> estimates;
    for (const auto& [position_id, acc] : per_position) {
      if (acc[j].count > 0) estimates.push_back(acc[j].mean());
    }
    if (estimates.empty()) {
      throw Error(ErrorCode::InsufficientData,
                  "no calibration data for gNB " + std::to_string(j + 1));
    }
    double sum = 0.0;
    for (double e : estimates) sum += e;
    const double mean = sum / static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    result.delta_hat_s[j] = mean;
    result.sample_count[j] = estimates.size();
    result.residual_std_s[j] =
        estimates.size() > 1 ? std::sqrt(var / static_cast<double>(estimates.size() - 1)) : 0.0;
  }
  return result;
}

}  // namespace nrpos::timing
