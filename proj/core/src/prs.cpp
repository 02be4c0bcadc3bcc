#include "nrpos/prs.hpp"

#include <array>
#include <cmath>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos::prs {

namespace {

constexpr std::array<int, 12> kStaggerComb2 = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
constexpr std::array<int, 12> kStaggerComb4 = {0, 2, 1, 3, 0, 2, 1, 3, 0, 2, 1, 3};
constexpr std::array<int, 12> kStaggerComb6 = {0, 3, 1, 4, 2, 5, 0, 3, 1, 4, 2, 5};
constexpr std::array<int, 12> kStaggerComb12 = {0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11};

constexpr int kGoldNc = 1600;
constexpr std::uint32_t kMaxSequenceId = 4095;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

int positive_mod(int value, int modulus) {
  const int r = value % modulus;
  return r < 0 ? r + modulus : r;
}

}  // namespace

std::span<const int> comb_stagger(int comb_size) noexcept {
  switch (comb_size) {
    case 2: return kStaggerComb2;
    case 4: return kStaggerComb4;
    case 6: return kStaggerComb6;
    case 12: return kStaggerComb12;
    default: return {};
  }
}

bool is_supported_comb(int comb_size, int num_symbols) noexcept {
  switch (comb_size) {
    case 2: return num_symbols == 2 || num_symbols == 4 || num_symbols == 6 || num_symbols == 12;
    case 4: return num_symbols == 4 || num_symbols == 12;
    case 6: return num_symbols == 6 || num_symbols == 12;
    case 12: return num_symbols == 12;
    default: return false;
  }
}

int slots_per_frame(double scs_hz) {
  for (int mu = 0; mu <= 6; ++mu) {
    if (scs_hz == 15e3 * static_cast<double>(1 << mu)) {
      return 10 << mu;
    }
  }
  invalid("subcarrier spacing " + std::to_string(scs_hz) + " Hz is not 15 kHz * 2^mu");
}

void validate(const PrsConfig& c, int n_prb) {
  if (c.resource_set_period <= 0) invalid("resource_set_period must be positive");
  if (c.resource_set_offset < 0) invalid("resource_set_offset must be non-negative");
  if (c.resource_repetition < 1) invalid("resource_repetition must be at least 1");
  if (c.resource_repetition > 1 && c.resource_time_gap < 1) {
    invalid("resource_time_gap must be at least 1 when repeating");
  }
  if (c.symbol_start < 0 || c.num_symbols < 1 ||
      c.symbol_start + c.num_symbols > kSymbolsPerSlot) {
    invalid("symbol_start + num_symbols must lie within the 14-symbol slot");
  }
  if (c.rb_offset < 0 || c.num_rbs < 1 || c.rb_offset + c.num_rbs > n_prb) {
    invalid("rb_offset + num_rbs exceeds the " + std::to_string(n_prb) + "-PRB carrier");
  }
  if (comb_stagger(c.comb_size).empty()) {
    invalid("comb_size " + std::to_string(c.comb_size) + " has no staggering pattern");
  }
  if (!is_supported_comb(c.comb_size, c.num_symbols)) {
    invalid("comb-" + std::to_string(c.comb_size) + " is not defined for " +
            std::to_string(c.num_symbols) + " PRS symbols");
  }
  const std::size_t n = c.gnb_count();
  if (n == 0) invalid("resource_offset_per_gnb is empty");
  if (c.comb_offset_per_gnb.size() != n || c.sequence_id_per_gnb.size() != n) {
    invalid("per-gNB PRS lists have different lengths");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (c.resource_offset_per_gnb[j] < 0) invalid("resource offsets must be non-negative");
    if (c.comb_offset_per_gnb[j] < 0 || c.comb_offset_per_gnb[j] >= c.comb_size) {
      invalid("comb offset of gNB " + std::to_string(j + 1) + " is not below comb_size");
    }
    if (c.sequence_id_per_gnb[j] > kMaxSequenceId) {
      invalid("sequence id of gNB " + std::to_string(j + 1) + " exceeds 4095");
    }
  }
}

const std::vector<ScheduledSlot>& PrsSchedule::slots(int gnb_id) const {
  if (gnb_id < 1 || static_cast<std::size_t>(gnb_id) > per_gnb.size()) {
    invalid("gNB id " + std::to_string(gnb_id) + " has no schedule");
  }
  return per_gnb[static_cast<std::size_t>(gnb_id - 1)];
}

bool PrsSchedule::contains(int gnb_id, int period_slot) const {
  for (const auto& s : slots(gnb_id)) {
    if (s.period_slot == period_slot) return true;
  }
  return false;
}

PrsSchedule build_schedule(const PrsConfig& config, std::size_t n_gnbs, double scs_hz) {
  if (n_gnbs != config.gnb_count()) {
    invalid("PRS config lists " + std::to_string(config.gnb_count()) + " gNBs, deployment has " +
            std::to_string(n_gnbs));
  }
  const int per_frame = slots_per_frame(scs_hz);
  const int period = config.resource_set_period;

  PrsSchedule schedule;
  schedule.per_gnb.resize(n_gnbs);
  std::vector<int> owner(static_cast<std::size_t>(period), 0);  // gNB id occupying each slot

  for (std::size_t j = 0; j < n_gnbs; ++j) {
    const int gnb_id = static_cast<int>(j) + 1;
    for (int r = 0; r < config.resource_repetition; ++r) {
      const int slot = positive_mod(config.resource_set_offset + config.resource_offset_per_gnb[j] +
                                        r * config.resource_time_gap,
                                    period);
      int& taken = owner[static_cast<std::size_t>(slot)];
      if (taken != 0) {
        throw Error(ErrorCode::ConfigConflict,
                    "PRS slot " + std::to_string(slot) + " collides between gNB " +
                        std::to_string(taken) + " and gNB " + std::to_string(gnb_id));
      }
      taken = gnb_id;
      schedule.per_gnb[j].push_back({slot / per_frame, slot % per_frame, slot});
    }
  }
  return schedule;
}

std::uint32_t prs_c_init(std::uint32_t sequence_id, int slot, int symbol) noexcept {
  const std::uint64_t id = sequence_id;
  const std::uint64_t lo = id % 1024;
  const std::uint64_t time = static_cast<std::uint64_t>(kSymbolsPerSlot * slot + symbol + 1);
  const std::uint64_t value = (std::uint64_t{1} << 22) * (id / 1024) +
                              (std::uint64_t{1} << 10) * time * (2 * lo + 1) + lo;
  return static_cast<std::uint32_t>(value % (std::uint64_t{1} << 31));
}

std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length) {
  const std::size_t total = length + kGoldNc + 31;
  std::vector<std::uint8_t> x1(total, 0);
  std::vector<std::uint8_t> x2(total, 0);
  x1[0] = 1;
  for (std::size_t n = 0; n < 31; ++n) {
    x2[n] = static_cast<std::uint8_t>((c_init >> n) & 1U);
  }
  for (std::size_t n = 0; n + 31 < total; ++n) {
    x1[n + 31] = static_cast<std::uint8_t>((x1[n + 3] + x1[n]) & 1U);
    x2[n + 31] = static_cast<std::uint8_t>((x2[n + 3] + x2[n + 2] + x2[n + 1] + x2[n]) & 1U);
  }
  std::vector<std::uint8_t> c(length);
  for (std::size_t n = 0; n < length; ++n) {
    c[n] = static_cast<std::uint8_t>((x1[n + kGoldNc] + x2[n + kGoldNc]) & 1U);
  }
  return c;
}

std::vector<std::complex<double>> generate_prs_sequence(std::uint32_t sequence_id, int slot,
                                                        int symbol, std::size_t length) {
  if (length == 0) invalid("PRS sequence length must be positive");
  const auto c = gold_sequence(prs_c_init(sequence_id, slot, symbol), 2 * length);
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<std::complex<double>> r(length);
  for (std::size_t m = 0; m < length; ++m) {
    r[m] = {s * (1.0 - 2.0 * c[2 * m]), s * (1.0 - 2.0 * c[2 * m + 1])};
  }
  return r;
}

ResourceGrid::ResourceGrid(int num_symbols, int num_subcarriers, double scs_hz, int period_slot)
    : num_symbols_(num_symbols),
      num_subcarriers_(num_subcarriers),
      scs_hz_(scs_hz),
      period_slot_(period_slot) {
  if (num_symbols <= 0 || num_subcarriers <= 0) {
    invalid("resource grid dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(num_symbols) * static_cast<std::size_t>(num_subcarriers),
                 {0.0, 0.0});
}

std::complex<double>& ResourceGrid::at(int symbol, int subcarrier) {
  return values_.at(static_cast<std::size_t>(symbol) * static_cast<std::size_t>(num_subcarriers_) +
                    static_cast<std::size_t>(subcarrier));
}

const std::complex<double>& ResourceGrid::at(int symbol, int subcarrier) const {
  return values_.at(static_cast<std::size_t>(symbol) * static_cast<std::size_t>(num_subcarriers_) +
                    static_cast<std::size_t>(subcarrier));
}

std::span<std::complex<double>> ResourceGrid::symbol(int l) {
  if (l < 0 || l >= num_symbols_) invalid("symbol index out of range");
  return std::span(values_).subspan(static_cast<std::size_t>(l) * static_cast<std::size_t>(num_subcarriers_),
                                    static_cast<std::size_t>(num_subcarriers_));
}

std::span<const std::complex<double>> ResourceGrid::symbol(int l) const {
  if (l < 0 || l >= num_symbols_) invalid("symbol index out of range");
  return std::span(values_).subspan(static_cast<std::size_t>(l) * static_cast<std::size_t>(num_subcarriers_),
                                    static_cast<std::size_t>(num_subcarriers_));
}

double ResourceGrid::subcarrier_frequency(int k) const noexcept {
  return static_cast<double>(k - num_subcarriers_ / 2) * scs_hz_;
}

std::size_t ResourceGrid::occupied_count(int l) const {
  std::size_t n = 0;
  for (const auto& v : symbol(l)) {
    if (v != std::complex<double>{}) ++n;
  }
  return n;
}

double grid_bandwidth_hz(int n_prb, double scs_hz) noexcept {
  return static_cast<double>(n_prb * kSubcarriersPerPrb) * scs_hz;
}

int prs_subcarrier(const PrsConfig& config, int gnb_id, int symbol_index, int k) {
  const auto stagger = comb_stagger(config.comb_size);
  const int offset = config.comb_offset_per_gnb.at(static_cast<std::size_t>(gnb_id - 1));
  const int k_prime = stagger[static_cast<std::size_t>(symbol_index) % stagger.size()];
  return kSubcarriersPerPrb * config.rb_offset + k * config.comb_size +
         (offset + k_prime) % config.comb_size;
}

ResourceGrid map_prs_to_grid(const PrsConfig& config, const GnbDeployment& deployment, int gnb_id,
                             int period_slot) {
  validate(config, deployment.n_prb);
  const auto schedule = build_schedule(config, deployment.size(), deployment.scs_hz);
  if (!schedule.contains(gnb_id, period_slot)) {
    throw Error(ErrorCode::SlotNotScheduled, "slot " + std::to_string(period_slot) +
                                                 " is not scheduled for gNB " +
                                                 std::to_string(gnb_id));
  }
  const int per_frame = slots_per_frame(deployment.scs_hz);
  const int slot_in_frame = period_slot % per_frame;
  const auto sequence_id = config.sequence_id_per_gnb.at(static_cast<std::size_t>(gnb_id - 1));
  const int per_symbol = kSubcarriersPerPrb * config.num_rbs / config.comb_size;

  ResourceGrid grid(kSymbolsPerSlot, kSubcarriersPerPrb * deployment.n_prb, deployment.scs_hz,
                    period_slot);
  for (int i = 0; i < config.num_symbols; ++i) {
    const int l = config.symbol_start + i;
    const auto seq =
        generate_prs_sequence(sequence_id, slot_in_frame, l, static_cast<std::size_t>(per_symbol));
    for (int k = 0; k < per_symbol; ++k) {
      grid.at(l, prs_subcarrier(config, gnb_id, i, k)) = seq[static_cast<std::size_t>(k)];
    }
  }
  return grid;
}

}  // namespace nrpos::prs
