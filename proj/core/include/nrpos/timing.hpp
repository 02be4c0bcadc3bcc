#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nrpos/model.hpp"
#include "nrpos/rng.hpp"

namespace nrpos::timing {

// Offsets entering the TOA model
//   tau_ij = p_j(alpha_i)/c + phi + Delta_j + n_ij.
// delta_s is indexed by gNB id - 1 and its first entry is the reference.
struct TimingOffsets {
  double phi_s = 0.0;
  std::vector<double> delta_s;
  double noise_sigma_s = 0.0;

  double delta(int gnb_id) const;
  // InvalidArgument unless delta_s[0] == 0, all values are finite and the
  // noise standard deviation is non-negative.
  void validate() const;
};

struct ToaRecord {
  int trial_id = 0;
  int ue_position_id = 0;  // index into the list of UE positions
  int gnb_id = 1;
  double toa_s = 0.0;
  std::optional<double> true_tof_s;  // simulation ground truth
};

struct CalibrationResult {
  std::vector<double> delta_hat_s;          // per gNB, first entry 0
  std::vector<std::size_t> sample_count;    // K: positions contributing per gNB
  std::vector<double> residual_std_s;       // spread of per-position estimates

  std::size_t gnb_count() const noexcept { return delta_hat_s.size(); }
  double delta_hat(int gnb_id) const;
};

double simulate_toa(double true_tof_s, const TimingOffsets& offsets, int gnb_id, Rng& rng);

inline double measured_rstd(double toa_j, double toa_ref) noexcept { return toa_j - toa_ref; }

// (d(gnb_j, ue) - d(gnb_ref, ue)) / c
double true_rstd(const Position2D& gnb_j, const Position2D& gnb_ref, const Position2D& ue) noexcept;

// Inter-gNB offset estimate
//   Delta_hat_j = 1/K sum_i ( (tau_ij - tau_i1) - (P_j(alpha_i) - P_1(alpha_i))/c ).
// Records are grouped by (position, trial): one trial shares one phi. Each
// group contributes mean(tau_j) - mean(tau_1); groups are averaged per
// position first, then positions are weighted equally.
//
// Throws MissingReference when a group lacks reference-gNB TOAs,
// InsufficientData when a non-reference gNB has no usable position, and
// InvalidArgument for ids outside the deployment or position list.
CalibrationResult calibrate(std::span<const ToaRecord> records, const GnbDeployment& deployment,
                            std::span<const Position2D> known_positions);

}  // namespace nrpos::timing
