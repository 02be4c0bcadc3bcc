#include "nrpos/tdoa.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos::tdoa {

RstdRecord make_rstd_record(int gnb_id, double measured_s, double delta_hat_s) {
  if (gnb_id == 1) {
    throw Error(ErrorCode::InvalidArgument, "the reference gNB has no RSTD");
  }
  return {gnb_id, measured_s, correct_rstd(measured_s, delta_hat_s)};
}

bool is_feasible_rstd(const Position2D& gnb_ref, const Position2D& gnb_j,
                      double corrected_rstd_s) noexcept {
  const double d = 0.5 * euclidean_distance(gnb_ref, gnb_j);
  const double a = 0.5 * kSpeedOfLight * corrected_rstd_s;
  return d > 0.0 && a * a < d * d;
}

HyperbolaParams hyperbola_from_rstd(const Position2D& gnb_ref, const Position2D& gnb_j,
                                    double corrected_rstd_s) {
  HyperbolaParams h;
  h.focus_ref = gnb_ref;
  h.focus_j = gnb_j;
  h.d = 0.5 * euclidean_distance(gnb_ref, gnb_j);
  if (h.d == 0.0) throw Error(ErrorCode::CoincidentFoci, "hyperbola foci coincide");
  h.a = 0.5 * kSpeedOfLight * corrected_rstd_s;
  if (h.a * h.a >= h.d * h.d) {
    throw Error(ErrorCode::InvalidHyperbola,
                "|a| = " + std::to_string(std::abs(h.a)) + " m is not below d = " +
                    std::to_string(h.d) + " m");
  }
  h.b = std::sqrt(h.d * h.d - h.a * h.a);
  h.theta = std::atan2(gnb_j.y - gnb_ref.y, gnb_j.x - gnb_ref.x);
  h.center = {0.5 * (gnb_ref.x + gnb_j.x), 0.5 * (gnb_ref.y + gnb_j.y)};
  return h;
}

std::vector<Position2D> hyperbola_points(const HyperbolaParams& params, double t_min,
                                         double t_max, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two hyperbola samples");
  if (params.d <= 0.0 || params.a * params.a >= params.d * params.d) {
    throw Error(ErrorCode::InvalidHyperbola, "hyperbola parameters are not valid");
  }
  const double c = std::cos(params.theta);
  const double s = std::sin(params.theta);
  std::vector<Position2D> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double u = -params.a * std::cosh(t);
    const double v = params.b * std::sinh(t);
    pts.push_back({c * u - s * v + params.center.x, s * u + c * v + params.center.y});
  }
  return pts;
}

namespace {

struct Problem {
  Position2D ref;
  std::vector<Position2D> gnbs;
  std::vector<double> range_diff;  // c * rstd'

  double cost(const Position2D& p) const {
    double sum = 0.0;
    const double d_ref = euclidean_distance(p, ref);
    for (std::size_t j = 0; j < gnbs.size(); ++j) {
      const double r = range_diff[j] - (euclidean_distance(p, gnbs[j]) - d_ref);
      sum += r * r;
    }
    return sum;
  }

  void linearize(const Position2D& p, Eigen::MatrixX2d& jac, Eigen::VectorXd& res) const {
    const auto unit = [&p](const Position2D& g) {
      const double dx = p.x - g.x;
      const double dy = p.y - g.y;
      const double n = std::max(std::hypot(dx, dy), 1e-12);
      return Eigen::Vector2d(dx / n, dy / n);
    };
    const Eigen::Vector2d u_ref = unit(ref);
    const double d_ref = euclidean_distance(p, ref);
    const auto m = static_cast<Eigen::Index>(gnbs.size());
    jac.resize(m, 2);
    res.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& g = gnbs[static_cast<std::size_t>(j)];
      res(j) = range_diff[static_cast<std::size_t>(j)] - (euclidean_distance(p, g) - d_ref);
      jac.row(j) = -(unit(g) - u_ref).transpose();
    }
  }
};

bool collinear(const GnbDeployment& deployment) {
  const auto& p0 = deployment.positions[0];
  double scale = 0.0;
  for (const auto& p : deployment.positions) scale = std::max(scale, euclidean_distance(p, p0));
  for (std::size_t i = 1; i < deployment.size(); ++i) {
    for (std::size_t k = i + 1; k < deployment.size(); ++k) {
      const auto& a = deployment.positions[i];
      const auto& b = deployment.positions[k];
      const double cross = (a.x - p0.x) * (b.y - p0.y) - (a.y - p0.y) * (b.x - p0.x);
      if (std::abs(cross) > 1e-9 * scale * scale) return false;
    }
  }
  return true;
}

// Grid points whose cost is below all eight neighbours, cheapest first.
// Several exist when the range differences admit more than one solution.
std::vector<Position2D> grid_starts(const GnbDeployment& deployment, const Problem& problem,
                                    const SolverOptions& options) {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  for (const auto& p : deployment.positions) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double grow_x = 0.5 * options.box_inflation * (x1 - x0);
  const double grow_y = 0.5 * options.box_inflation * (y1 - y0);
  x0 -= grow_x;
  x1 += grow_x;
  y0 -= grow_y;
  y1 += grow_y;
  const double pitch = std::hypot(x1 - x0, y1 - y0) / options.grid_divisions;
  const int nx = static_cast<int>(std::floor((x1 - x0) / pitch)) + 1;
  const int ny = static_cast<int>(std::floor((y1 - y0) / pitch)) + 1;

  std::vector<double> cost(static_cast<std::size_t>(nx * ny));
  const auto at = [&](int ix, int iy) -> double& { return cost[static_cast<std::size_t>(iy * nx + ix)]; };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) at(ix, iy) = problem.cost({x0 + ix * pitch, y0 + iy * pitch});
  }

  std::vector<std::pair<double, Position2D>> minima;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      bool lowest = true;
      for (int dy = -1; dy <= 1 && lowest; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int jx = ix + dx;
          const int jy = iy + dy;
          if ((dx == 0 && dy == 0) || jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
          if (at(jx, jy) < at(ix, iy)) {
            lowest = false;
            break;
          }
        }
      }
      if (lowest) minima.push_back({at(ix, iy), {x0 + ix * pitch, y0 + iy * pitch}});
    }
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (minima.size() > static_cast<std::size_t>(options.max_starts)) {
    minima.resize(static_cast<std::size_t>(options.max_starts));
  }
  std::vector<Position2D> starts;
  for (const auto& m : minima) starts.push_back(m.second);
  if (starts.empty()) starts.push_back({0.5 * (x0 + x1), 0.5 * (y0 + y1)});
  return starts;
}

PositionEstimate gauss_newton(const Problem& problem, Position2D p, const SolverOptions& options) {
  double cost = problem.cost(p);
  PositionEstimate est;
  Eigen::MatrixX2d jac;
  Eigen::VectorXd res;
  for (int it = 1; it <= options.max_iterations; ++it) {
    est.iterations = it;
    problem.linearize(p, jac, res);
    const Eigen::Matrix2d normal = jac.transpose() * jac;
    const Eigen::Vector2d step = normal.completeOrthogonalDecomposition().solve(jac.transpose() * res);

    // Step halving until the cost does not increase.
    double scale = 1.0;
    Position2D next = p;
    double next_cost = cost;
    for (int h = 0; h < 40; ++h) {
      const Position2D trial{p.x - scale * step.x(), p.y - scale * step.y()};
      const double c = problem.cost(trial);
      if (c <= cost) {
        next = trial;
        next_cost = c;
        break;
      }
      scale *= 0.5;
    }
    const double moved = euclidean_distance(next, p);
    p = next;
    cost = next_cost;
    if (moved < options.step_tolerance_m) {
      est.converged = true;
      break;
    }
  }
  est.position = p;
  est.residual_norm = std::sqrt(cost);
  return est;
}

Position2D centroid(const GnbDeployment& deployment) {
  Position2D c;
  for (const auto& p : deployment.positions) {
    c.x += p.x;
    c.y += p.y;
  }
  const auto n = static_cast<double>(deployment.size());
  return {c.x / n, c.y / n};
}

}  // namespace

PositionEstimate estimate_position(const GnbDeployment& deployment,
                                   std::span<const RstdRecord> rstds,
                                   std::optional<Position2D> initial_guess,
                                   const SolverOptions& options) {
  if (deployment.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "positioning needs at least three gNBs");
  }
  if (rstds.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "positioning needs at least two RSTDs");
  }

  Problem problem;
  problem.ref = deployment.positions[0];
  for (const auto& r : rstds) {
    if (r.gnb_id == 1) throw Error(ErrorCode::InvalidArgument, "RSTD against the reference gNB");
    problem.gnbs.push_back(deployment.gnb(r.gnb_id));
    problem.range_diff.push_back(kSpeedOfLight * r.corrected_rstd_s);
  }

  PositionEstimate est;
  if (initial_guess) {
    est = gauss_newton(problem, *initial_guess, options);
  } else {
    // Equally good fits are ambiguous; prefer the one nearest the gNB centroid.
    const Position2D middle = centroid(deployment);
    // The cost has a kink at every gNB that the coarse grid can straddle,
    // so each gNB's neighbourhood and the centroid are tried as well.
    auto starts = grid_starts(deployment, problem, options);
    starts.push_back(middle);
    for (const auto& g : deployment.positions) {
      starts.push_back({g.x + 0.05 * (middle.x - g.x), g.y + 0.05 * (middle.y - g.y)});
    }
    bool have = false;
    for (const auto& start : starts) {
      const auto cand = gauss_newton(problem, start, options);
      if (!have) {
        est = cand;
        have = true;
        continue;
      }
      const double tie = options.tie_tolerance_m;
      if (cand.residual_norm < est.residual_norm - tie ||
          (cand.residual_norm <= est.residual_norm + tie &&
           euclidean_distance(cand.position, middle) < euclidean_distance(est.position, middle))) {
        est = cand;
      }
    }
  }
  const Position2D p = est.position;
  Eigen::MatrixX2d jac;
  Eigen::VectorXd res;

  if (collinear(deployment)) {
    problem.linearize(p, jac, res);
    const Eigen::Matrix2d normal = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(normal);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    if (hi <= 0.0 || lo <= options.degenerate_rcond * hi) {
      throw Error(ErrorCode::DegenerateGeometry,
                  "collinear gNBs leave the position unobservable at the solution");
    }
  }
  return est;
}

double rmse(std::span<const Position2D> estimates, std::span<const Position2D> truths) {
  if (estimates.size() != truths.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(estimates.size()) + " estimates vs " +
                                               std::to_string(truths.size()) + " truths");
  }
  if (estimates.empty()) throw Error(ErrorCode::InvalidArgument, "rmse of an empty list");
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double e = euclidean_distance(estimates[i], truths[i]);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

}  // namespace nrpos::tdoa
