#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nrpos/model.hpp"

namespace nrpos::tdoa {

// Sign convention: rstd = tau_j - tau_ref, so a UE closer to gNB j than to
// the reference sees a negative RSTD.
struct RstdRecord {
  int gnb_id = 2;  // non-reference
  double rstd_s = 0.0;
  double corrected_rstd_s = 0.0;
};

inline double correct_rstd(double measured_s, double delta_hat_s) noexcept {
  return measured_s - delta_hat_s;
}

RstdRecord make_rstd_record(int gnb_id, double measured_s, double delta_hat_s);

// Branch of the hyperbola with foci at the two gNBs on which
// d(p, focus_j) - d(p, focus_ref) = c * rstd.
struct HyperbolaParams {
  double a = 0.0;      // signed semi-major axis, (c/2) * rstd
  double b = 0.0;      // semi-minor axis, sqrt(d^2 - a^2)
  double theta = 0.0;  // direction from the reference gNB to gNB j
  Position2D center;
  double d = 0.0;      // half the focal separation
  Position2D focus_ref;
  Position2D focus_j;
};

// Throws CoincidentFoci for co-located gNBs and InvalidHyperbola when
// a^2 >= d^2, which flags unusable offset estimates.
HyperbolaParams hyperbola_from_rstd(const Position2D& gnb_ref, const Position2D& gnb_j,
                                    double corrected_rstd_s);

bool is_feasible_rstd(const Position2D& gnb_ref, const Position2D& gnb_j,
                      double corrected_rstd_s) noexcept;

// n >= 2 points at evenly spaced t in [t_min, t_max] of
//   R(theta) [-a cosh t; b sinh t] + center.
// Using the signed a keeps the branch on the side of the earlier-arriving gNB.
std::vector<Position2D> hyperbola_points(const HyperbolaParams& params, double t_min,
                                         double t_max, int n);

struct SolverOptions {
  int max_iterations = 100;
  double step_tolerance_m = 1e-6;
  int grid_divisions = 20;       // grid pitch = bounding-box diagonal / grid_divisions
  double box_inflation = 0.5;    // bounding box grows by this fraction of its size
  double degenerate_rcond = 1e-10;
  int max_starts = 8;            // grid local minima refined by Gauss-Newton
  double tie_tolerance_m = 1e-6; // residuals this close count as equally good
};

struct PositionEstimate {
  Position2D position;
  double residual_norm = 0.0;  // meters
  int iterations = 0;
  bool converged = false;
};

// Damped Gauss-Newton on the range-difference residuals
//   r_j(p) = c rstd'_j - (d(gnb_j, p) - d(gnb_ref, p)).
// Without an initial guess, runs from each local minimum of a coarse grid over
// the inflated gNB bounding box and keeps the smallest residual; among equal
// residuals the solution nearest the gNB centroid wins. Hitting the iteration limit yields the best
// iterate with converged = false. Throws DegenerateGeometry when the gNBs are
// collinear and the normal matrix is rank-deficient at the solution, and
// InvalidArgument for fewer than two RSTDs or unknown gNB ids.
PositionEstimate estimate_position(const GnbDeployment& deployment,
                                   std::span<const RstdRecord> rstds,
                                   std::optional<Position2D> initial_guess = std::nullopt,
                                   const SolverOptions& options = {});

// Root of the mean squared Euclidean error; throws LengthMismatch.
double rmse(std::span<const Position2D> estimates, std::span<const Position2D> truths);

}  // namespace nrpos::tdoa
