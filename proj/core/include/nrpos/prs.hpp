#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nrpos/model.hpp"

namespace nrpos::prs {

inline constexpr int kSymbolsPerSlot = 14;
inline constexpr int kSubcarriersPerPrb = 12;

// DL-PRS resource configuration. Per-gNB lists are indexed by gNB id - 1.
struct PrsConfig {
  int resource_set_period = 20;             // slots
  int resource_set_offset = 2;              // slots
  std::vector<int> resource_offset_per_gnb = {1, 2, 3};
  int resource_repetition = 1;
  int resource_time_gap = 1;                // slots between repetitions
  int symbol_start = 0;
  int num_symbols = 4;
  int rb_offset = 0;
  int num_rbs = 106;
  int comb_size = 2;
  std::vector<int> comb_offset_per_gnb = {0, 0, 0};
  std::vector<std::uint32_t> sequence_id_per_gnb = {0, 1, 2};

  std::size_t gnb_count() const noexcept { return resource_offset_per_gnb.size(); }
};

// Rejects inconsistent configurations with InvalidArgument. Slot collisions
// between gNBs are reported by build_schedule as ConfigConflict.
void validate(const PrsConfig& config, int n_prb);

// Comb staggering offsets k' for symbols l - symbol_start = 0, 1, ...
// (TS 38.211 Table 7.4.1.7.3-1). Empty for comb sizes outside {2, 4, 6, 12}.
std::span<const int> comb_stagger(int comb_size) noexcept;

// True when num_symbols is one of the symbol counts defined for comb_size.
bool is_supported_comb(int comb_size, int num_symbols) noexcept;

// 10 * 2^mu slots per 10 ms frame; throws InvalidArgument for a spacing that
// is not 15 kHz * 2^mu.
int slots_per_frame(double scs_hz);

struct ScheduledSlot {
  int frame = 0;        // frame index within the resource-set period
  int slot = 0;         // slot index within the frame
  int period_slot = 0;  // slot index within the resource-set period

  friend bool operator==(const ScheduledSlot&, const ScheduledSlot&) = default;
};

struct PrsSchedule {
  std::vector<std::vector<ScheduledSlot>> per_gnb;  // indexed by gNB id - 1

  const std::vector<ScheduledSlot>& slots(int gnb_id) const;
  bool contains(int gnb_id, int period_slot) const;
};

PrsSchedule build_schedule(const PrsConfig& config, std::size_t n_gnbs, double scs_hz = 30e3);

// PRS scrambling seed, TS 38.211 7.4.1.7.2:
//   c_init = (2^22 floor(id/1024) + 2^10 (14 slot + symbol + 1)(2 (id mod 1024) + 1)
//             + (id mod 1024)) mod 2^31
std::uint32_t prs_c_init(std::uint32_t sequence_id, int slot, int symbol) noexcept;

// Length-31 Gold sequence c(n), n = 0 .. length-1, with Nc = 1600.
std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length);

// QPSK symbols r(m) = ((1 - 2c(2m)) + i (1 - 2c(2m+1))) / sqrt(2).
std::vector<std::complex<double>> generate_prs_sequence(std::uint32_t sequence_id, int slot,
                                                        int symbol, std::size_t length);

// One slot of the frequency-domain grid, symbol-major.
class ResourceGrid {
 public:
  ResourceGrid(int num_symbols, int num_subcarriers, double scs_hz, int period_slot);

  int num_symbols() const noexcept { return num_symbols_; }
  int num_subcarriers() const noexcept { return num_subcarriers_; }
  double scs_hz() const noexcept { return scs_hz_; }
  int period_slot() const noexcept { return period_slot_; }

  std::complex<double>& at(int symbol, int subcarrier);
  const std::complex<double>& at(int symbol, int subcarrier) const;

  std::span<std::complex<double>> symbol(int l);
  std::span<const std::complex<double>> symbol(int l) const;

  std::span<std::complex<double>> data() noexcept { return values_; }
  std::span<const std::complex<double>> data() const noexcept { return values_; }

  // Baseband frequency of subcarrier k, with the band centred on DC:
  // (k - num_subcarriers/2) * scs.
  double subcarrier_frequency(int k) const noexcept;

  std::size_t occupied_count(int symbol) const;

 private:
  int num_symbols_;
  int num_subcarriers_;
  double scs_hz_;
  int period_slot_;
  std::vector<std::complex<double>> values_;
};

// Total bandwidth spanned by n_prb resource blocks.
double grid_bandwidth_hz(int n_prb, double scs_hz) noexcept;

// Grid index of the k-th PRS subcarrier in the symbol at offset
// symbol_index from symbol_start for the given gNB.
int prs_subcarrier(const PrsConfig& config, int gnb_id, int symbol_index, int k);

// PRS occupancy of one gNB in one scheduled slot; every other RE is zero.
// Throws SlotNotScheduled when period_slot is not in that gNB's schedule.
ResourceGrid map_prs_to_grid(const PrsConfig& config, const GnbDeployment& deployment, int gnb_id,
                             int period_slot);

}  // namespace nrpos::prs
