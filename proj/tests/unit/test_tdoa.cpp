#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nrpos/error.hpp"
#include "nrpos/tdoa.hpp"
#include "nrpos/timing.hpp"

using namespace nrpos;

namespace {

GnbDeployment triangle() {
  GnbDeployment d;
  d.positions = {{0, 0}, {50, 0}, {25, 43.30127018922193}};
  return d;
}

std::vector<tdoa::RstdRecord> exact_rstds(const GnbDeployment& dep, const Position2D& ue) {
  std::vector<tdoa::RstdRecord> out;
  for (int j = 2; j <= static_cast<int>(dep.size()); ++j) {
    const double r = timing::true_rstd(dep.gnb(j), dep.gnb(1), ue);
    out.push_back(tdoa::make_rstd_record(j, r, 0.0));
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(Rstd, Correction) {
  EXPECT_NEAR(tdoa::correct_rstd(50e-9, 41.2e-9), 8.8e-9, 1e-20);
  EXPECT_EQ(tdoa::correct_rstd(0.0, 0.0), 0.0);
  EXPECT_NEAR(tdoa::correct_rstd(10e-9, -5e-9), 15e-9, 1e-20);
  const auto rec = tdoa::make_rstd_record(3, 50e-9, 41.2e-9);
  EXPECT_EQ(rec.gnb_id, 3);
  EXPECT_EQ(rec.rstd_s, 50e-9);
  EXPECT_NEAR(rec.corrected_rstd_s, 8.8e-9, 1e-20);
  EXPECT_EQ(code_of([] { tdoa::make_rstd_record(1, 0.0, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Hyperbola, Examples) {
  const auto h = tdoa::hyperbola_from_rstd({0, 0}, {50, 0}, 41.2e-9);
  EXPECT_NEAR(h.a, 6.1757, 1e-4);
  EXPECT_DOUBLE_EQ(h.d, 25.0);
  EXPECT_NEAR(h.b, std::sqrt(625.0 - h.a * h.a), 1e-12);
  EXPECT_DOUBLE_EQ(h.theta, 0.0);
  EXPECT_EQ(h.center, (Position2D{25, 0}));

  const auto z = tdoa::hyperbola_from_rstd({0, 0}, {50, 0}, 0.0);
  EXPECT_EQ(z.a, 0.0);
  EXPECT_DOUBLE_EQ(z.b, 25.0);

  EXPECT_EQ(code_of([] { tdoa::hyperbola_from_rstd({0, 0}, {50, 0}, 400e-9); }),
            ErrorCode::InvalidHyperbola);
  EXPECT_FALSE(tdoa::is_feasible_rstd({0, 0}, {50, 0}, 400e-9));
  EXPECT_TRUE(tdoa::is_feasible_rstd({0, 0}, {50, 0}, 41.2e-9));
  EXPECT_EQ(code_of([] { tdoa::hyperbola_from_rstd({1, 1}, {1, 1}, 0.0); }),
            ErrorCode::CoincidentFoci);
  // Exactly on the focal distance is already unusable.
  EXPECT_EQ(code_of([] { tdoa::hyperbola_from_rstd({0, 0}, {50, 0}, 50.0 / kSpeedOfLight); }),
            ErrorCode::InvalidHyperbola);
}

TEST(Hyperbola, VertexAndTheta) {
  const auto h = tdoa::hyperbola_from_rstd({0, 0}, {0, 50}, 20e-9);
  EXPECT_NEAR(h.theta, std::numbers::pi / 2, 1e-15);
  const auto pts = tdoa::hyperbola_points(h, 0.0, 0.0 + 1e-300, 2);
  // t = 0 is the vertex on the focal axis, closer to the reference gNB for
  // a positive RSTD.
  EXPECT_NEAR(pts[0].x, 0.0, 1e-12);
  EXPECT_NEAR(pts[0].y, 25.0 - h.a, 1e-12);
  EXPECT_EQ(code_of([&] { tdoa::hyperbola_points(h, 0, 1, 1); }), ErrorCode::InvalidArgument);
}

TEST(HyperbolaProperties, PointsSatisfyRangeDifference) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-100, 100);
  std::uniform_real_distribution<double> frac(-0.95, 0.95);
  for (int rep = 0; rep < 300; ++rep) {
    const Position2D ref{u(gen), u(gen)}, gj{u(gen), u(gen)};
    const double sep = euclidean_distance(ref, gj);
    if (sep < 1.0) continue;
    const double rstd = frac(gen) * sep / kSpeedOfLight;
    const auto h = tdoa::hyperbola_from_rstd(ref, gj, rstd);
    for (const auto& p : tdoa::hyperbola_points(h, -2.0, 2.0, 41)) {
      const double diff = euclidean_distance(p, gj) - euclidean_distance(p, ref);
      EXPECT_NEAR(diff, kSpeedOfLight * rstd, 1e-9 * sep);
      // Canonical form in the rotated frame.
      const double dx = p.x - h.center.x, dy = p.y - h.center.y;
      const double uu = std::cos(h.theta) * dx + std::sin(h.theta) * dy;
      const double vv = -std::sin(h.theta) * dx + std::cos(h.theta) * dy;
      if (std::abs(h.a) > 1e-6 * sep) {
        EXPECT_NEAR(uu * uu / (h.a * h.a) - vv * vv / (h.b * h.b), 1.0, 1e-8);
        // Branch sits on the side of the earlier-arriving gNB.
        EXPECT_LT(uu * h.a, 0.0);
      }
    }
  }
}

TEST(Solver, CentroidFromZeroRstds) {
  const auto dep = triangle();
  const Position2D centroid{25, 43.30127018922193 / 3};
  const auto est = tdoa::estimate_position(dep, exact_rstds(dep, centroid));
  EXPECT_TRUE(est.converged);
  EXPECT_LT(euclidean_distance(est.position, centroid), 1e-6);
  EXPECT_NEAR(exact_rstds(dep, centroid)[0].corrected_rstd_s, 0.0, 1e-18);
}

TEST(Solver, RandomPointsInHull) {
  // Three anchors can admit a second exact solution close to a gNB, so every
  // estimate must explain the RSTDs, and interior points must be recovered.
  const auto dep = triangle();
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 200; ++rep) {
    double a = u(gen), b = u(gen);
    if (a + b > 1) {
      a = 1 - a;
      b = 1 - b;
    }
    const Position2D ue{50 * a + 25 * b, 43.30127018922193 * b};
    const auto est = tdoa::estimate_position(dep, exact_rstds(dep, ue));
    EXPECT_TRUE(est.converged);
    EXPECT_LT(est.residual_norm, 1e-6);
    if (a > 0.1 && b > 0.1 && a + b < 0.9) {
      EXPECT_LT(euclidean_distance(est.position, ue), 1e-5) << ue.x << "," << ue.y;
    }
  }
}

TEST(Solver, IterationLimitReportsNotConverged) {
  const auto dep = triangle();
  tdoa::SolverOptions opt;
  opt.max_iterations = 1;
  opt.step_tolerance_m = 0.0;
  const auto est = tdoa::estimate_position(dep, exact_rstds(dep, {20, 10}), Position2D{-80, 90}, opt);
  EXPECT_FALSE(est.converged);
  EXPECT_EQ(est.iterations, 1);
  EXPECT_TRUE(is_finite(est.position));
}

TEST(Solver, Errors) {
  GnbDeployment line;
  line.positions = {{0, 0}, {50, 0}, {100, 0}};
  const auto rstds = exact_rstds(line, {30, 20});
  EXPECT_EQ(code_of([&] { tdoa::estimate_position(line, rstds); }), ErrorCode::DegenerateGeometry);
  const auto dep = triangle();
  const auto one = std::vector<tdoa::RstdRecord>{exact_rstds(dep, {20, 10})[0]};
  EXPECT_EQ(code_of([&] { tdoa::estimate_position(dep, one); }), ErrorCode::InvalidArgument);
  std::vector<tdoa::RstdRecord> bad = {{2, 0, 0}, {4, 0, 0}};
  EXPECT_EQ(code_of([&] { tdoa::estimate_position(dep, bad); }), ErrorCode::InvalidArgument);
}

TEST(Rmse, Examples) {
  const std::vector<Position2D> e = {{0, 0}, {3, 4}};
  const std::vector<Position2D> t = {{0, 0}, {0, 0}};
  EXPECT_DOUBLE_EQ(tdoa::rmse(e, t), std::sqrt(12.5));
  EXPECT_EQ(tdoa::rmse(t, t), 0.0);
  const std::vector<Position2D> one = {{0, 0}};
  EXPECT_EQ(code_of([&] { tdoa::rmse(e, one); }), ErrorCode::LengthMismatch);
}

TEST(SolverProperties, UncorrectedOffsetsCostMeters) {
  // Leaving ~tens of ns of inter-gNB offset in the RSTDs moves the solution
  // by meters; removing it restores sub-centimeter accuracy.
  const auto dep = triangle();
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> du(-50e-9, 50e-9);
  std::uniform_real_distribution<double> px(15, 35), py(8, 25);
  int worse = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Position2D ue{px(gen), py(gen)};
    const double d2 = du(gen), d3 = du(gen);
    auto raw = exact_rstds(dep, ue);
    raw[0].rstd_s += d2;
    raw[1].rstd_s += d3;
    std::vector<tdoa::RstdRecord> uncorrected, corrected;
    for (const auto& r : raw) {
      uncorrected.push_back(tdoa::make_rstd_record(r.gnb_id, r.rstd_s, 0.0));
      corrected.push_back(tdoa::make_rstd_record(r.gnb_id, r.rstd_s, r.gnb_id == 2 ? d2 : d3));
    }
    const auto good = tdoa::estimate_position(dep, corrected);
    EXPECT_LT(euclidean_distance(good.position, ue), 1e-5);
    bool feasible = true;
    for (const auto& r : uncorrected) {
      feasible = feasible && tdoa::is_feasible_rstd(dep.gnb(1), dep.gnb(r.gnb_id), r.corrected_rstd_s);
    }
    if (!feasible) {
      ++worse;
      continue;
    }
    const auto bad = tdoa::estimate_position(dep, uncorrected);
    if (euclidean_distance(bad.position, ue) > euclidean_distance(good.position, ue) + 1.0) ++worse;
  }
  EXPECT_GE(worse, 90);
}
