#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrpos/channel.hpp"
#include "nrpos/error.hpp"
#include "nrpos/estimator.hpp"
#include "nrpos/model.hpp"
#include "nrpos/prs.hpp"
#include "nrpos/tdoa.hpp"
#include "nrpos/timing.hpp"

namespace nrpos::harness {

// Channel: every TOA comes from a PRS grid pushed through the channel, the
// LS estimator, digital interpolation and peak detection.
// Model: TOAs are drawn directly from the offset model without waveform
// simulation (no tap quantization).
enum class ToaSource { Channel, Model };

struct OffsetSpec {
  std::optional<double> phi_s;                 // fixed UE offset; drawn per trial when empty
  double phi_bound_s = 50e-9;                  // uniform in [-bound, bound]
  std::optional<std::vector<double>> delta_s;  // fixed inter-gNB offsets, first entry 0
  double delta_bound_s = 50e-9;                // drawn once per session when delta_s is empty
  double noise_sigma_s = 0.65e-9;
};

struct ChannelSpec {
  double snr_db = 20.0;                                     // +inf disables grid noise
  std::vector<std::vector<channel::Echo>> echoes_per_gnb;  // empty: line of sight only
};

struct EstimatorSpec {
  int oversample_factor = 16;
  estimator::DetectOptions detection;
  double native_sample_rate_hz = estimator::kDefaultNativeSampleRateHz;
  ToaSource toa_source = ToaSource::Channel;
};

struct CampaignSpec {
  std::vector<Position2D> calibration_positions;
  std::vector<Position2D> test_positions;
  int trials_per_position = 1;
  int estimates_per_gnb = 500;
};

// Settings of the multipath and sweep studies.
struct StudySpec {
  int trials = 100;
  std::complex<double> echo_gain{0.5, 0.0};
  std::vector<int> oversample_factors = {1, 16};
  std::optional<Position2D> ue_position;  // default: first test position
};

struct ScenarioConfig {
  GnbDeployment deployment;
  prs::PrsConfig prs;
  OffsetSpec offsets;
  ChannelSpec channel;
  EstimatorSpec estimator;
  CampaignSpec campaign;
  StudySpec study;
  std::uint64_t seed = 1;
};

// Synthetic 50 m triangle with nine calibration and six test positions, the
// fixed offsets (Delta_2 = 41.2 ns, Delta_3 = 30.9 ns) and the
// comb-2, 4-symbol, 106-PRB PRS layout.
ScenarioConfig default_scenario();

// Every violated invariant, in check order. Empty when the scenario is valid.
std::vector<Error> check_scenario(const ScenarioConfig& config);

// Throws the first issue reported by check_scenario.
void validate(const ScenarioConfig& config);

// Trial ids: calibration trials count up from 0, test trials from this base.
inline constexpr int kTestTrialBase = 1'000'000;

int calibration_trial_id(const ScenarioConfig& config, int position_index, int trial);
int test_trial_id(const ScenarioConfig& config, int position_index, int trial);

// Inter-gNB offsets of the session described by config (fixed or drawn from
// the session stream of the seed).
std::vector<double> session_deltas(const ScenarioConfig& config);

// UE-gNB offset for one trial (fixed or drawn from that trial's stream).
double trial_phi(const ScenarioConfig& config, int trial_id);

struct ToaStats {
  int trial_id = 0;
  int ue_position_id = 0;
  int gnb_id = 1;
  double mean_s = 0.0;
  double std_s = 0.0;
  std::size_t count = 0;
};

enum class PositionStatus { Converged, NotConverged, InvalidHyperbola, Failed };
std::string_view to_string(PositionStatus status) noexcept;

struct PositionResult {
  int position_id = 0;
  int trial_id = 0;
  Position2D truth;
  std::vector<tdoa::RstdRecord> rstds;
  std::optional<tdoa::PositionEstimate> estimate;
  double error_m = 0.0;
  PositionStatus status = PositionStatus::Failed;
  std::string message;
};

struct TrialReport {
  std::vector<double> true_delta_s;
  std::vector<timing::ToaRecord> calibration_records;
  std::vector<timing::ToaRecord> test_records;
  std::vector<ToaStats> toa_stats;
  std::optional<timing::CalibrationResult> calibration;
  std::vector<PositionResult> positions;
  std::optional<double> rmse_m;      // over converged positions
  std::size_t flagged_positions = 0; // positions excluded from the RMSE
};

// TOAs for one trial at one UE position: estimates_per_gnb values per gNB,
// gNBs transmitting one after another.
std::vector<timing::ToaRecord> simulate_trial(const ScenarioConfig& config,
                                              std::span<const double> deltas, int trial_id,
                                              int position_id, const Position2D& ue);

struct CalibrationRun {
  std::vector<timing::ToaRecord> records;
  timing::CalibrationResult result;
};

// One trial per calibration position (per configured trial), then
// timing::calibrate over all records. Throws InsufficientData for K = 0.
CalibrationRun run_calibration_trials(const ScenarioConfig& config);
timing::CalibrationResult run_calibration_campaign(const ScenarioConfig& config);

// Fresh TOAs at every test position, RSTDs corrected with calibration and
// solved for position. Failures are recorded per position.
TrialReport run_positioning_campaign(const ScenarioConfig& config,
                                     const timing::CalibrationResult& calibration);

// Calibration followed by positioning within one session.
TrialReport run_session(const ScenarioConfig& config);

// Per-trial TOA mean, standard deviation and count for each gNB.
std::vector<ToaStats> toa_statistics(std::span<const timing::ToaRecord> records);

struct HistogramBin {
  int trial_id = 0;
  int gnb_id = 1;
  double lo_s = 0.0;
  double hi_s = 0.0;
  std::size_t count = 0;
};

// Contiguous bins from the smallest to the largest TOA of each (trial, gNB).
std::vector<HistogramBin> toa_histogram(std::span<const timing::ToaRecord> records,
                                        double bin_width_s = 0.1e-9);

struct HyperbolaSample {
  int position_id = 0;
  int gnb_id = 2;
  double t = 0.0;
  Position2D point;
};

std::vector<HyperbolaSample> hyperbola_samples(const TrialReport& report,
                                               const GnbDeployment& deployment,
                                               double t_limit = 2.0, int n = 41);

struct StudyRow {
  double excess_delay_s = 0.0;
  double snr_db = 0.0;
  int oversample_factor = 1;
  double toa_bias_s = 0.0;  // mean of (TOA - line-of-sight delay)
  double toa_std_s = 0.0;
  int trials = 0;
};

// Two-tap channel (LOS plus one echo of the given gain) from gNB 1 to the
// study UE. Each trial places the LOS delay uniformly within one native tap
// so that factor-1 quantization averages out; rows for every excess delay and
// every oversample factor of config.study.
std::vector<StudyRow> run_multipath_study(const ScenarioConfig& config,
                                          std::span<const double> excess_delays_s,
                                          std::complex<double> echo_gain);

enum class SweepParameter { ExcessDelay, SnrDb, OversampleFactor };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::ExcessDelay;
  double start = 0.0;
  double stop = 0.0;
  int points = 1;

  std::vector<double> values() const;
};

std::string_view to_string(SweepParameter parameter) noexcept;

// excess_delay: multipath study with config.study.echo_gain.
// snr_db: line-of-sight channel at a fixed delay, one row per study factor.
// oversample_factor: line-of-sight channel at a fixed delay, one row per point.
std::vector<StudyRow> run_sweep(const ScenarioConfig& config, const SweepSpec& sweep);

}  // namespace nrpos::harness

namespace nrpos::harness {

// One channel estimate per gNB per resource-set period, gNBs in turn.
double airtime_per_gnb_s(const ScenarioConfig& config);
double airtime_per_trial_s(const ScenarioConfig& config);

}  // namespace nrpos::harness
