#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "nrpos/error.hpp"
#include "nrpos/prs.hpp"
#include "oracles.hpp"

using namespace nrpos;
using prs::PrsConfig;

namespace {

GnbDeployment deployment() {
  GnbDeployment d;
  d.positions = {{0, 0}, {50, 0}, {25, 43.3}};
  return d;
}

std::vector<int> slots_of(const prs::PrsSchedule& s, int gnb_id) {
  std::vector<int> out;
  for (const auto& e : s.slots(gnb_id)) out.push_back(e.period_slot);
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

TEST(Schedule, ResourceOffsetsOneTwoThree) {
  PrsConfig c;
  const auto s = prs::build_schedule(c, 3);
  EXPECT_EQ(slots_of(s, 1), std::vector<int>{3});
  EXPECT_EQ(slots_of(s, 2), std::vector<int>{4});
  EXPECT_EQ(slots_of(s, 3), std::vector<int>{5});
  // 20 slots per frame at 30 kHz: the whole period lies in frame 0.
  EXPECT_EQ(s.slots(2).front(), (prs::ScheduledSlot{0, 4, 4}));
}

TEST(Schedule, CollisionNamesBothGnbs) {
  PrsConfig c;
  c.resource_offset_per_gnb = {1, 1, 3};
  try {
    prs::build_schedule(c, 3);
    FAIL() << "expected ConfigConflict";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigConflict);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("gNB 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("gNB 2"), std::string::npos) << msg;
  }
}

TEST(Schedule, RepetitionWithTimeGap) {
  PrsConfig c;
  c.resource_offset_per_gnb = {0, 5, 10};
  c.resource_repetition = 2;
  c.resource_time_gap = 1;
  const auto s = prs::build_schedule(c, 3);
  EXPECT_EQ(slots_of(s, 1), (std::vector<int>{2, 3}));
  EXPECT_EQ(slots_of(s, 2), (std::vector<int>{7, 8}));
  EXPECT_EQ(slots_of(s, 3), (std::vector<int>{12, 13}));
}

TEST(Schedule, WrapsModuloPeriodAndSplitsFrames) {
  PrsConfig c;
  c.resource_set_period = 40;
  c.resource_set_offset = 38;
  c.resource_offset_per_gnb = {1, 2, 3};
  const auto s = prs::build_schedule(c, 3);
  EXPECT_EQ(s.slots(1).front(), (prs::ScheduledSlot{1, 19, 39}));
  EXPECT_EQ(s.slots(2).front(), (prs::ScheduledSlot{0, 0, 0}));
  EXPECT_EQ(s.slots(3).front(), (prs::ScheduledSlot{0, 1, 1}));
}

TEST(Schedule, GnbCountMustMatch) {
  PrsConfig c;
  EXPECT_EQ(code_of([&] { prs::build_schedule(c, 4); }), ErrorCode::InvalidArgument);
}

TEST(Schedule, DisjointAndInsidePeriodForRandomConfigs) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    PrsConfig c;
    c.resource_set_period = std::uniform_int_distribution<int>(4, 80)(gen);
    c.resource_set_offset = std::uniform_int_distribution<int>(0, 100)(gen);
    c.resource_repetition = std::uniform_int_distribution<int>(1, 3)(gen);
    c.resource_time_gap = std::uniform_int_distribution<int>(1, 4)(gen);
    std::vector<int> offs(static_cast<std::size_t>(c.resource_set_period));
    std::iota(offs.begin(), offs.end(), 0);
    std::shuffle(offs.begin(), offs.end(), gen);
    c.resource_offset_per_gnb = {offs[0], offs[1], offs[2]};
    prs::PrsSchedule s;
    try {
      s = prs::build_schedule(c, 3);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigConflict);
      continue;
    }
    std::set<int> used;
    std::size_t total = 0;
    for (int j = 1; j <= 3; ++j) {
      for (const auto& e : s.slots(j)) {
        EXPECT_LT(e.period_slot, c.resource_set_period);
        used.insert(e.period_slot);
        ++total;
      }
    }
    EXPECT_EQ(used.size(), total);
  }
}

TEST(Sequence, CInitPacking) {
  EXPECT_EQ(prs::prs_c_init(0, 0, 0), 1024u);
  EXPECT_EQ(prs::prs_c_init(1, 3, 2), 1024u * 45u * 3u + 1u);
  // id 1025: floor(id/1024) = 1, id mod 1024 = 1
  EXPECT_EQ(prs::prs_c_init(1025, 0, 0), (1u << 22) + 1024u * 1u * 3u + 1u);
  // wraps modulo 2^31
  const std::uint64_t big = (std::uint64_t{1} << 22) * 3 + 1024ULL * (14 * 19 + 13 + 1) * (2 * 1023 + 1) + 1023;
  EXPECT_EQ(prs::prs_c_init(4095, 19, 13), static_cast<std::uint32_t>(big % (std::uint64_t{1} << 31)));
}

TEST(Sequence, GoldMatchesBitSerialRegister) {
  for (std::uint32_t c_init : {0u, 1u, 1024u, 0x12345678u & 0x7FFFFFFFu, 0x7FFFFFFFu}) {
    const auto lib = prs::gold_sequence(c_init, 500);
    const auto ref = oracle::gold(c_init, 500);
    ASSERT_EQ(lib.size(), ref.size());
    for (std::size_t n = 0; n < lib.size(); ++n) EXPECT_EQ(lib[n], ref[n]) << "n=" << n;
  }
}

TEST(Sequence, QpskUnitMagnitudeAndMapping) {
  const auto r = prs::generate_prs_sequence(7, 3, 2, 600);
  const auto c = oracle::gold(prs::prs_c_init(7, 3, 2), 1200);
  ASSERT_EQ(r.size(), 600u);
  for (std::size_t m = 0; m < r.size(); ++m) {
    EXPECT_NEAR(std::abs(r[m]), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(r[m].real(), (1 - 2 * c[2 * m]) / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(r[m].imag(), (1 - 2 * c[2 * m + 1]) / std::sqrt(2.0));
  }
}

TEST(Sequence, Deterministic) {
  EXPECT_EQ(prs::generate_prs_sequence(3, 4, 5, 100), prs::generate_prs_sequence(3, 4, 5, 100));
  EXPECT_NE(prs::generate_prs_sequence(3, 4, 5, 100), prs::generate_prs_sequence(3, 4, 6, 100));
  EXPECT_THROW(prs::generate_prs_sequence(0, 0, 0, 0), Error);
}

namespace {

double periodic_correlation_peak(const std::vector<std::complex<double>>& a,
                                 const std::vector<std::complex<double>>& b, bool skip_zero_lag) {
  const std::size_t n = a.size();
  double peak = 0.0;
  for (std::size_t lag = skip_zero_lag ? 1 : 0; lag < n; ++lag) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * std::conj(b[(i + lag) % n]);
    peak = std::max(peak, std::abs(acc));
  }
  return peak;
}

}  // namespace

TEST(Sequence, LowCrossCorrelationBetweenIds) {
  const auto a = prs::generate_prs_sequence(0, 3, 0, 4096);
  const auto b = prs::generate_prs_sequence(1, 3, 0, 4096);
  const double auto_peak = 4096.0;  // sum of |a|^2
  EXPECT_LT(periodic_correlation_peak(a, b, false), 0.1 * auto_peak);
}

TEST(Sequence, LowAutocorrelationSidelobes) {
  for (std::uint32_t id : {0u, 5u}) {
    const auto a = prs::generate_prs_sequence(id, 2, 1, 1024);
    EXPECT_LT(periodic_correlation_peak(a, a, true), 0.2 * 1024.0);
  }
}

TEST(Grid, CombTwoOccupancy) {
  PrsConfig c;
  const auto g = prs::map_prs_to_grid(c, deployment(), 1, 3);
  EXPECT_EQ(g.num_symbols(), 14);
  EXPECT_EQ(g.num_subcarriers(), 1272);
  for (int l = 0; l < 14; ++l) EXPECT_EQ(g.occupied_count(l), l < 4 ? 636u : 0u);
}

TEST(Grid, CombTwelveOnOnePrb) {
  PrsConfig c;
  c.comb_size = 12;
  c.num_symbols = 12;
  c.num_rbs = 1;
  c.rb_offset = 5;
  const auto g = prs::map_prs_to_grid(c, deployment(), 2, 4);
  for (int l = 0; l < 12; ++l) EXPECT_EQ(g.occupied_count(l), 1u);
  // The twelve symbols cover the twelve subcarriers of PRB 5 once each.
  std::set<int> ks;
  for (int l = 0; l < 12; ++l) {
    for (int k = 0; k < g.num_subcarriers(); ++k) {
      if (g.at(l, k) != std::complex<double>{}) ks.insert(k);
    }
  }
  EXPECT_EQ(ks.size(), 12u);
  EXPECT_EQ(*ks.begin(), 60);
  EXPECT_EQ(*ks.rbegin(), 71);
}

TEST(Grid, Bandwidth) { EXPECT_NEAR(prs::grid_bandwidth_hz(106, 30e3), 38.16e6, 1e-6); }

TEST(Grid, StaggerPattern) {
  // TS 38.211 comb-4 offsets over four symbols: 0, 2, 1, 3.
  PrsConfig c;
  c.comb_size = 4;
  c.comb_offset_per_gnb = {1, 0, 0};
  const auto g = prs::map_prs_to_grid(c, deployment(), 1, 3);
  const int expected[] = {1, 3, 2, 0};
  for (int l = 0; l < 4; ++l) {
    for (int k = 0; k < g.num_subcarriers(); ++k) {
      const bool occupied = g.at(l, k) != std::complex<double>{};
      EXPECT_EQ(occupied, k % 4 == expected[l]) << "l=" << l << " k=" << k;
    }
  }
}

TEST(Grid, SymbolStartShiftsPrsSymbols) {
  PrsConfig c;
  c.symbol_start = 10;
  const auto g = prs::map_prs_to_grid(c, deployment(), 3, 5);
  for (int l = 0; l < 14; ++l) EXPECT_EQ(g.occupied_count(l), (l >= 10) ? 636u : 0u);
  // Sequences use the absolute symbol index.
  const auto seq = prs::generate_prs_sequence(2, 5, 10, 636);
  EXPECT_EQ(g.at(10, 0), seq[0]);
  EXPECT_EQ(g.at(10, 2), seq[1]);
}

TEST(Grid, UnscheduledSlot) {
  PrsConfig c;
  EXPECT_EQ(code_of([&] { prs::map_prs_to_grid(c, deployment(), 1, 4); }), ErrorCode::SlotNotScheduled);
}

TEST(Grid, DisjointOccupancyAcrossGnbs) {
  std::mt19937 gen(9);
  const std::pair<int, int> combos[] = {{2, 2}, {2, 4}, {2, 6}, {2, 12}, {4, 4}, {4, 12}, {6, 6}, {6, 12}, {12, 12}};
  for (int trial = 0; trial < 20; ++trial) {
    const auto [comb, symbols] = combos[static_cast<std::size_t>(trial) % std::size(combos)];
    PrsConfig c;
    c.comb_size = comb;
    c.num_symbols = symbols;
    c.symbol_start = std::uniform_int_distribution<int>(0, 14 - symbols)(gen);
    c.num_rbs = std::uniform_int_distribution<int>(1, 106)(gen);
    c.rb_offset = std::uniform_int_distribution<int>(0, 106 - c.num_rbs)(gen);
    c.comb_offset_per_gnb = {std::uniform_int_distribution<int>(0, comb - 1)(gen),
                             std::uniform_int_distribution<int>(0, comb - 1)(gen),
                             std::uniform_int_distribution<int>(0, comb - 1)(gen)};
    c.resource_offset_per_gnb = {trial % 5, 5 + trial % 3, 9};
    const auto dep = deployment();
    const auto schedule = prs::build_schedule(c, 3);
    std::set<std::tuple<int, int, int>> seen;
    std::size_t total = 0;
    for (int j = 1; j <= 3; ++j) {
      for (const auto& s : schedule.slots(j)) {
        const auto g = prs::map_prs_to_grid(c, dep, j, s.period_slot);
        for (int l = 0; l < g.num_symbols(); ++l) {
          const std::size_t n = g.occupied_count(l);
          if (l >= c.symbol_start && l < c.symbol_start + c.num_symbols) {
            EXPECT_EQ(n, static_cast<std::size_t>(12 * c.num_rbs / comb));
          } else {
            EXPECT_EQ(n, 0u);
          }
          for (int k = 0; k < g.num_subcarriers(); ++k) {
            if (g.at(l, k) != std::complex<double>{}) {
              seen.insert({s.period_slot, l, k});
              ++total;
            }
          }
        }
      }
    }
    EXPECT_EQ(seen.size(), total);
  }
}

TEST(Config, Validation) {
  const auto rejects = [](auto mutate) {
    PrsConfig c;
    mutate(c);
    return code_of([&] { prs::validate(c, 106); }) == ErrorCode::InvalidArgument;
  };
  EXPECT_NO_THROW(prs::validate(PrsConfig{}, 106));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.comb_size = 3; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.comb_size = 4; c.num_symbols = 2; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.comb_size = 12; c.num_symbols = 6; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.symbol_start = 11; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.rb_offset = 1; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.comb_offset_per_gnb = {0, 2, 0}; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.sequence_id_per_gnb = {0, 1}; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.resource_set_period = 0; }));
  EXPECT_TRUE(rejects([](PrsConfig& c) { c.sequence_id_per_gnb = {0, 1, 4096}; }));
}

TEST(Config, SlotsPerFrame) {
  EXPECT_EQ(prs::slots_per_frame(15e3), 10);
  EXPECT_EQ(prs::slots_per_frame(30e3), 20);
  EXPECT_EQ(prs::slots_per_frame(120e3), 80);
  EXPECT_THROW(prs::slots_per_frame(20e3), Error);
}
