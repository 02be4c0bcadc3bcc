#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nrpos/channel.hpp"
#include "nrpos/error.hpp"
#include "nrpos/rng.hpp"

using namespace nrpos;
using channel::ChannelProfile;
using channel::ChannelTap;
using cd = std::complex<double>;

namespace {

prs::ResourceGrid prs_grid() {
  GnbDeployment d;
  d.positions = {{0, 0}, {50, 0}, {25, 43.3}};
  return prs::map_prs_to_grid(prs::PrsConfig{}, d, 1, 3);
}

std::vector<double> band(int n, double lo, double hi) {
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return f;
}

}  // namespace

TEST(Profiles, LineOfSight) {
  const auto p = channel::los_profile({0, 0}, {299.792458, 0});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p.taps()[0].delay_s, 1e-6);
  EXPECT_EQ(p.taps()[0].gain, cd(1, 0));
  EXPECT_EQ(channel::los_profile({3, 3}, {3, 3}).first_arrival_s(), 0.0);
  EXPECT_NEAR(channel::los_profile({0, 0}, {30, 40}).first_arrival_s(), 166.78e-9, 0.01e-9);
}

TEST(Profiles, Multipath) {
  const Position2D g{0, 0}, u{30, 40};
  const auto none = channel::multipath_profile(g, u, {});
  const auto los = channel::los_profile(g, u);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none.taps()[0].delay_s, los.taps()[0].delay_s);

  const channel::Echo echo[] = {{50e-9, {0.8, 0}}};
  const auto two = channel::multipath_profile(g, u, echo);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_DOUBLE_EQ(two.taps()[1].delay_s, los.first_arrival_s() + 50e-9);
  EXPECT_EQ(two.taps()[1].gain, cd(0.8, 0));

  // Excess delays at one and two times the bandwidth resolution 1/B.
  const double resolution = 1.0 / 38.16e6;
  EXPECT_NEAR(resolution, 26.2e-9, 0.01e-9);
  const channel::Echo echoes[] = {{52e-9, {0.3, 0}}, {26e-9, {0.5, 0}}};
  const auto three = channel::multipath_profile(g, u, echoes);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_NEAR(three.taps()[1].delay_s - three.taps()[0].delay_s, resolution, 0.25e-9);
  EXPECT_NEAR(three.taps()[2].delay_s - three.taps()[0].delay_s, 2 * resolution, 0.5e-9);
}

TEST(Profiles, Errors) {
  const channel::Echo dup[] = {{20e-9, {0.5, 0}}, {20e-9, {0.1, 0}}};
  try {
    channel::multipath_profile({0, 0}, {10, 0}, dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateDelay);
  }
  const channel::Echo zero[] = {{0.0, {0.5, 0}}};
  EXPECT_THROW(channel::multipath_profile({0, 0}, {10, 0}, zero), Error);
  EXPECT_THROW(ChannelProfile(std::vector<ChannelTap>{}), Error);
  EXPECT_THROW(ChannelProfile(std::vector<ChannelTap>{{-1e-9, {1, 0}}}), Error);
}

TEST(Profiles, SortedOnConstruction) {
  const ChannelProfile p(std::vector<ChannelTap>{{30e-9, {0.2, 0}}, {10e-9, {1, 0}}, {20e-9, {0.5, 0}}});
  EXPECT_EQ(p.taps()[0].delay_s, 10e-9);
  EXPECT_EQ(p.taps()[2].delay_s, 30e-9);
}

TEST(FrequencyResponse, FlatAndPurePhase) {
  const auto f = band(101, -19e6, 19e6);
  for (const auto& h : channel::frequency_response(ChannelProfile({{0.0, {1, 0}}}), f)) {
    EXPECT_NEAR(h.real(), 1.0, 1e-15);
    EXPECT_NEAR(h.imag(), 0.0, 1e-15);
  }
  const auto h = channel::frequency_response(ChannelProfile({{123e-9, {1, 0}}}), f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    EXPECT_NEAR(std::abs(h[k]), 1.0, 1e-12);
    EXPECT_NEAR(std::arg(h[k] * std::polar(1.0, 2 * std::numbers::pi * f[k] * 123e-9)), 0.0, 1e-9);
  }
}

TEST(FrequencyResponse, TwoRayFadeSpacing) {
  // |1 + exp(-i 2 pi f dt)| = 2 |cos(pi f dt)|: nulls 1/dt apart.
  const double dt = 26.2e-9;
  const ChannelProfile p({{0.0, {1, 0}}, {dt, {1, 0}}});
  const auto null_positions = [&](double lo, double hi) {
    const auto f = band(80001, lo, hi);
    const auto h = channel::frequency_response(p, f);
    std::vector<double> nulls;
    for (std::size_t k = 1; k + 1 < h.size(); ++k) {
      EXPECT_NEAR(std::abs(h[k]), 2.0 * std::abs(std::cos(std::numbers::pi * f[k] * dt)), 1e-12);
      if (std::abs(h[k]) < std::abs(h[k - 1]) && std::abs(h[k]) <= std::abs(h[k + 1]) && std::abs(h[k]) < 0.01) {
        nulls.push_back(f[k]);
      }
    }
    return nulls;
  };
  const auto wide = null_positions(-40e6, 40e6);
  ASSERT_EQ(wide.size(), 2u);
  EXPECT_NEAR(wide[1] - wide[0], 1.0 / dt, 2e3);
  EXPECT_NEAR(1.0 / dt, 38.16e6, 0.05e6);
  // Any 38.16 MHz window holds exactly one fade.
  EXPECT_EQ(null_positions(-10e6, 28.16e6).size(), 1u);
  EXPECT_EQ(null_positions(-30e6, 8.16e6).size(), 1u);
}

TEST(FrequencyResponse, LinearInGains) {
  const ChannelProfile a({{10e-9, {0.3, 0.1}}, {40e-9, {-0.2, 0.5}}});
  const ChannelProfile b({{15e-9, {1, 0}}, {70e-9, {0.1, -0.1}}});
  const ChannelProfile ab({{10e-9, {0.3, 0.1}}, {40e-9, {-0.2, 0.5}}, {15e-9, {1, 0}}, {70e-9, {0.1, -0.1}}});
  const auto f = band(64, -19e6, 19e6);
  const auto ha = channel::frequency_response(a, f);
  const auto hb = channel::frequency_response(b, f);
  const auto hab = channel::frequency_response(ab, f);
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(std::abs(hab[k] - ha[k] - hb[k]), 0.0, 1e-12);
}

TEST(FrequencyResponse, ZeroGainTapChangesNothing) {
  const ChannelProfile p({{10e-9, {1, 0}}, {50e-9, {0.5, 0.2}}});
  const ChannelProfile q({{10e-9, {1, 0}}, {50e-9, {0.5, 0.2}}, {90e-9, {0, 0}}});
  const auto f = band(64, -19e6, 19e6);
  EXPECT_EQ(channel::frequency_response(p, f), channel::frequency_response(q, f));
  EXPECT_NEAR(channel::rms_delay_spread(p), channel::rms_delay_spread(q), 1e-24);
}

TEST(DelaySpread, Examples) {
  EXPECT_EQ(channel::rms_delay_spread(ChannelProfile({{77e-9, {1, 0}}})), 0.0);
  EXPECT_NEAR(channel::rms_delay_spread(ChannelProfile({{0.0, {1, 0}}, {100e-9, {1, 0}}})), 50e-9, 1e-18);
  // mean = 0.25 * 100 / 1.25 = 20 ns; var = (1 * 400 + 0.25 * 6400) / 1.25 = 1600 ns^2
  EXPECT_NEAR(channel::rms_delay_spread(ChannelProfile({{0.0, {1, 0}}, {100e-9, {0.5, 0}}})), 40e-9, 1e-18);
}

TEST(ApplyChannel, IdentityWithoutNoise) {
  const auto g = prs_grid();
  const auto out = channel::apply_channel(g, ChannelProfile({{0.0, {1, 0}}}), {});
  ASSERT_EQ(out.data().size(), g.data().size());
  for (std::size_t i = 0; i < g.data().size(); ++i) EXPECT_EQ(out.data()[i], g.data()[i]);
}

TEST(ApplyChannel, MultipliesByResponse) {
  const auto g = prs_grid();
  const ChannelProfile p({{100e-9, {1, 0}}, {140e-9, {0.4, -0.2}}});
  const auto out = channel::apply_channel(g, p, {});
  std::vector<double> f;
  for (int k = 0; k < g.num_subcarriers(); ++k) f.push_back(g.subcarrier_frequency(k));
  const auto h = channel::frequency_response(p, f);
  for (int l = 0; l < 4; ++l) {
    for (int k = 0; k < g.num_subcarriers(); ++k) {
      EXPECT_NEAR(std::abs(out.at(l, k) - g.at(l, k) * h[static_cast<std::size_t>(k)]), 0.0, 1e-12);
    }
  }
}

TEST(ApplyChannel, TimingOffsetIsADelayShift) {
  const auto g = prs_grid();
  const auto shifted = channel::apply_channel(g, ChannelProfile({{100e-9, {1, 0}}}), {}, 37e-9);
  const auto direct = channel::apply_channel(g, ChannelProfile({{137e-9, {1, 0}}}), {});
  for (std::size_t i = 0; i < g.data().size(); ++i) {
    EXPECT_NEAR(std::abs(shifted.data()[i] - direct.data()[i]), 0.0, 1e-9);
  }
}

TEST(ApplyChannel, FixedSeedIsBitIdentical) {
  const auto g = prs_grid();
  const ChannelProfile p({{50e-9, {1, 0}}});
  const auto a = channel::apply_channel(g, p, {20.0, 42});
  const auto b = channel::apply_channel(g, p, {20.0, 42});
  const auto c = channel::apply_channel(g, p, {20.0, 43});
  EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  EXPECT_FALSE(std::equal(a.data().begin(), a.data().end(), c.data().begin()));
}

TEST(ApplyChannel, NoiseVarianceMatchesSnr) {
  const auto g = prs_grid();
  const ChannelProfile p({{0.0, {1, 0}}});
  double power = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {  // 6 * 17808 > 1e5 REs
    const auto out = channel::apply_channel(g, p, {20.0, seed});
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      power += std::norm(out.data()[i] - g.data()[i]);
      ++n;
    }
  }
  ASSERT_GE(n, 100000u);
  EXPECT_NEAR(power / static_cast<double>(n), 0.01, 0.02 * 0.01);
}

TEST(ApplyChannel, NoiseIndependentAcrossGnbs) {
  const auto g = prs_grid();
  const ChannelProfile p({{0.0, {1, 0}}});
  const auto a = channel::apply_channel(g, p, {0.0, derive_seed(1, 1, 0, StreamPurpose::GridNoise)});
  const auto b = channel::apply_channel(g, p, {0.0, derive_seed(1, 2, 0, StreamPurpose::GridNoise)});
  std::complex<double> cross{0, 0};
  double pa = 0, pb = 0;
  for (std::size_t i = 0; i < g.data().size(); ++i) {
    const auto na = a.data()[i] - g.data()[i];
    const auto nb = b.data()[i] - g.data()[i];
    cross += na * std::conj(nb);
    pa += std::norm(na);
    pb += std::norm(nb);
  }
  const double rho = std::abs(cross) / std::sqrt(pa * pb);
  EXPECT_LT(rho, 5.0 / std::sqrt(static_cast<double>(g.data().size())));
}
