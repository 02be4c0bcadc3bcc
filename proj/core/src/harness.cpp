#include "nrpos/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "nrpos/rng.hpp"

namespace nrpos::harness {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::size_t gnb_index(int gnb_id) { return static_cast<std::size_t>(gnb_id - 1); }

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::span<const channel::Echo> echoes_for(const ScenarioConfig& config, int gnb_id) {
  const auto& all = config.channel.echoes_per_gnb;
  if (all.empty()) return {};
  return all.at(gnb_index(gnb_id));
}

Position2D study_ue(const ScenarioConfig& config) {
  if (config.study.ue_position) return *config.study.ue_position;
  if (!config.campaign.test_positions.empty()) return config.campaign.test_positions.front();
  Position2D c;
  for (const auto& p : config.deployment.positions) {
    c.x += p.x;
    c.y += p.y;
  }
  const auto n = static_cast<double>(config.deployment.size());
  return {c.x / n, c.y / n};
}

prs::ResourceGrid reference_grid(const ScenarioConfig& config, int gnb_id) {
  const auto schedule =
      prs::build_schedule(config.prs, config.deployment.size(), config.deployment.scs_hz);
  return prs::map_prs_to_grid(config.prs, config.deployment, gnb_id,
                              schedule.slots(gnb_id).front().period_slot);
}

// Largest |offset| the TOA chain has to represent on top of the geometry.
double offset_margin(const ScenarioConfig& config) {
  double phi = config.offsets.phi_s ? std::abs(*config.offsets.phi_s) : config.offsets.phi_bound_s;
  double delta = config.offsets.delta_bound_s;
  if (config.offsets.delta_s) {
    delta = 0.0;
    for (double d : *config.offsets.delta_s) delta = std::max(delta, std::abs(d));
  }
  return phi + delta + 6.0 * config.offsets.noise_sigma_s;
}

template <typename Fn>
void collect(std::vector<Error>& issues, Fn&& check) {
  try {
    check();
  } catch (const Error& e) {
    issues.push_back(e);
  }
}

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.deployment.positions = {{0.0, 0.0}, {50.0, 0.0}, {25.0, 43.30127018922193}};
  c.deployment.carrier_hz = 3.6e9;
  c.deployment.scs_hz = 30e3;
  c.deployment.n_prb = 106;

  c.offsets.delta_s = std::vector<double>{0.0, 41.2e-9, 30.9e-9};
  c.offsets.noise_sigma_s = 0.65e-9;

  // Synthetic positions inside the gNB triangle.
  c.campaign.calibration_positions = {{15.0, 8.0},  {25.0, 8.0},  {35.0, 8.0},
                                      {20.0, 17.0}, {30.0, 17.0}, {25.0, 25.0},
                                      {18.0, 12.0}, {32.0, 12.0}, {25.0, 33.0}};
  c.campaign.test_positions = {{12.0, 5.0},  {38.0, 5.0},  {25.0, 14.0},
                               {20.0, 24.0}, {30.0, 24.0}, {25.0, 38.0}};
  c.campaign.trials_per_position = 1;
  c.campaign.estimates_per_gnb = 500;
  c.seed = 20241118;
  return c;
}

std::vector<Error> check_scenario(const ScenarioConfig& config) {
  std::vector<Error> issues;
  const auto& dep = config.deployment;
  const auto n_gnbs = dep.size();

  collect(issues, [&] { dep.validate(); });
  collect(issues, [&] { prs::validate(config.prs, dep.n_prb); });
  collect(issues, [&] { prs::build_schedule(config.prs, n_gnbs, dep.scs_hz); });

  collect(issues, [&] {
    const auto& o = config.offsets;
    if (o.delta_s) {
      if (o.delta_s->size() != n_gnbs) {
        fail(ErrorCode::InvalidArgument, "offsets.delta_s must list one offset per gNB");
      }
      timing::TimingOffsets{0.0, *o.delta_s, o.noise_sigma_s}.validate();
    }
    if (!(o.phi_bound_s >= 0.0) || !(o.delta_bound_s >= 0.0)) {
      fail(ErrorCode::InvalidArgument, "offset draw bounds must be non-negative");
    }
    if (!(o.noise_sigma_s >= 0.0)) fail(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  });

  collect(issues, [&] {
    const auto& echoes = config.channel.echoes_per_gnb;
    if (!echoes.empty() && echoes.size() != n_gnbs) {
      fail(ErrorCode::InvalidArgument, "channel.echoes must list one echo set per gNB");
    }
    for (const auto& set : echoes) {
      for (const auto& e : set) {
        if (!(e.excess_delay_s > 0.0)) {
          fail(ErrorCode::InvalidArgument, "echo excess delays must be positive");
        }
      }
    }
    if (std::isnan(config.channel.snr_db)) fail(ErrorCode::InvalidArgument, "snr_db is NaN");
  });

  collect(issues, [&] {
    const auto& est = config.estimator;
    if (est.oversample_factor < 1) fail(ErrorCode::InvalidArgument, "oversample_factor must be >= 1");
    for (int f : config.study.oversample_factors) {
      if (f < 1) fail(ErrorCode::InvalidArgument, "study oversample factors must be >= 1");
    }
    estimator::native_tap_count(est.native_sample_rate_hz, dep.scs_hz,
                                prs::kSubcarriersPerPrb * dep.n_prb);
  });

  collect(issues, [&] {
    const auto& c = config.campaign;
    if (c.trials_per_position < 1) fail(ErrorCode::InvalidArgument, "trials_per_position must be >= 1");
    if (c.estimates_per_gnb < 1) fail(ErrorCode::InvalidArgument, "estimates_per_gnb must be >= 1");
    for (const auto& p : c.calibration_positions) {
      if (!is_finite(p)) fail(ErrorCode::InvalidArgument, "non-finite calibration position");
      for (const auto& q : c.test_positions) {
        if (p == q) {
          fail(ErrorCode::InvalidArgument, "position (" + std::to_string(p.x) + ", " +
                                               std::to_string(p.y) +
                                               ") is both a calibration and a test position");
        }
      }
    }
    for (const auto& q : c.test_positions) {
      if (!is_finite(q)) fail(ErrorCode::InvalidArgument, "non-finite test position");
    }
  });

  if (!issues.empty()) return issues;

  // Every UE position must lie strictly inside the a^2 < d^2 region of each
  // gNB pair, otherwise even exact RSTDs give no hyperbola.
  collect(issues, [&] {
    const auto check_positions = [&](const std::vector<Position2D>& positions, const char* kind) {
      for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = 1; j < n_gnbs; ++j) {
          const double rstd = timing::true_rstd(dep.positions[j], dep.positions[0], positions[i]);
          if (!tdoa::is_feasible_rstd(dep.positions[0], dep.positions[j], rstd)) {
            fail(ErrorCode::InvalidHyperbola,
                 std::string(kind) + " position " + std::to_string(i) +
                     " lies on the baseline extension of gNB 1 and gNB " + std::to_string(j + 1));
          }
        }
      }
    };
    check_positions(config.campaign.calibration_positions, "calibration");
    check_positions(config.campaign.test_positions, "test");
  });

  if (config.estimator.toa_source == ToaSource::Channel) {
    collect(issues, [&] {
      const double range = 1.0 / dep.scs_hz;
      double max_delay = 0.0;
      const auto consider = [&](const Position2D& ue) {
        for (std::size_t j = 0; j < n_gnbs; ++j) {
          double excess = 0.0;
          for (const auto& e : echoes_for(config, static_cast<int>(j) + 1)) {
            excess = std::max(excess, e.excess_delay_s);
          }
          max_delay = std::max(max_delay, time_of_flight(dep.positions[j], ue) + excess);
        }
      };
      for (const auto& p : config.campaign.calibration_positions) consider(p);
      for (const auto& p : config.campaign.test_positions) consider(p);
      consider(study_ue(config));
      const double worst = max_delay + offset_margin(config);
      if (worst >= 0.5 * range) {
        fail(ErrorCode::InvalidArgument,
             "delays plus offsets reach " + std::to_string(worst * 1e6) +
                 " us, beyond the unambiguous TOA range of +/-" + std::to_string(0.5e6 * range) +
                 " us");
      }
    });
  }
  return issues;
}

void validate(const ScenarioConfig& config) {
  const auto issues = check_scenario(config);
  if (!issues.empty()) throw issues.front();
}

int calibration_trial_id(const ScenarioConfig& config, int position_index, int trial) {
  return position_index * config.campaign.trials_per_position + trial;
}

int test_trial_id(const ScenarioConfig& config, int position_index, int trial) {
  return kTestTrialBase + position_index * config.campaign.trials_per_position + trial;
}

std::vector<double> session_deltas(const ScenarioConfig& config) {
  if (config.offsets.delta_s) return *config.offsets.delta_s;
  Rng rng(derive_seed(config.seed, 0, 0, StreamPurpose::SessionOffsets));
  std::vector<double> deltas(config.deployment.size(), 0.0);
  const double b = config.offsets.delta_bound_s;
  for (std::size_t j = 1; j < deltas.size(); ++j) deltas[j] = rng.uniform(-b, b);
  return deltas;
}

double trial_phi(const ScenarioConfig& config, int trial_id) {
  if (config.offsets.phi_s) return *config.offsets.phi_s;
  Rng rng(derive_seed(config.seed, 0, static_cast<std::uint64_t>(trial_id), StreamPurpose::UeOffset));
  const double b = config.offsets.phi_bound_s;
  return rng.uniform(-b, b);
}

std::vector<timing::ToaRecord> simulate_trial(const ScenarioConfig& config,
                                              std::span<const double> deltas, int trial_id,
                                              int position_id, const Position2D& ue) {
  const auto n_gnbs = static_cast<int>(config.deployment.size());
  const int estimates = config.campaign.estimates_per_gnb;
  const double sigma = config.offsets.noise_sigma_s;
  const double phi = trial_phi(config, trial_id);
  const auto trial_key = static_cast<std::uint64_t>(trial_id);

  timing::TimingOffsets offsets{phi, {deltas.begin(), deltas.end()}, sigma};

  std::vector<timing::ToaRecord> records;
  records.reserve(static_cast<std::size_t>(n_gnbs * estimates));

  for (int gnb_id = 1; gnb_id <= n_gnbs; ++gnb_id) {
    const auto gnb_key = static_cast<std::uint64_t>(gnb_id);
    const auto& gnb = config.deployment.gnb(gnb_id);
    const double tof = time_of_flight(gnb, ue);
    Rng jitter(derive_seed(config.seed, gnb_key, trial_key, StreamPurpose::TimingJitter));

    if (config.estimator.toa_source == ToaSource::Model) {
      for (int e = 0; e < estimates; ++e) {
        records.push_back({trial_id, position_id, gnb_id,
                           timing::simulate_toa(tof, offsets, gnb_id, jitter), tof});
      }
      continue;
    }

    const auto ref = reference_grid(config, gnb_id);
    const auto profile = channel::multipath_profile(gnb, ue, echoes_for(config, gnb_id));
    const std::uint64_t noise_base =
        derive_seed(config.seed, gnb_key, trial_key, StreamPurpose::GridNoise);
    const double clock = phi + offsets.delta(gnb_id);

    for (int e = 0; e < estimates; ++e) {
      const double jitter_s = sigma > 0.0 ? sigma * jitter.normal() : 0.0;
      const channel::NoiseSpec noise{config.channel.snr_db,
                                     mix64(noise_base + static_cast<std::uint64_t>(e))};
      const auto rx = channel::apply_channel(ref, profile, noise, clock + jitter_s);
      const auto cfr = estimator::estimate_cfr(rx, ref);
      const auto cir = estimator::interpolate_cir(cfr, config.estimator.oversample_factor,
                                                  config.estimator.native_sample_rate_hz);
      const auto est = estimator::detect_toa(cir, config.estimator.detection);
      records.push_back({trial_id, position_id, gnb_id,
                         estimator::signed_toa(est.toa_s, cir.unambiguous_range_s()), tof});
    }
  }
  return records;
}

namespace {

std::vector<timing::ToaRecord> calibration_records(const ScenarioConfig& config,
                                                   std::span<const double> deltas) {
  std::vector<timing::ToaRecord> records;
  const auto& positions = config.campaign.calibration_positions;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (int t = 0; t < config.campaign.trials_per_position; ++t) {
      const int pid = static_cast<int>(i);
      auto trial = simulate_trial(config, deltas, calibration_trial_id(config, pid, t), pid, positions[i]);
      records.insert(records.end(), trial.begin(), trial.end());
    }
  }
  return records;
}

PositionResult locate(const ScenarioConfig& config, const timing::CalibrationResult& calibration,
                      std::span<const timing::ToaRecord> records, int position_id, int trial_id,
                      const Position2D& truth) {
  const auto n_gnbs = config.deployment.size();
  std::vector<double> sum(n_gnbs, 0.0);
  std::vector<std::size_t> count(n_gnbs, 0);
  for (const auto& r : records) {
    sum[gnb_index(r.gnb_id)] += r.toa_s;
    count[gnb_index(r.gnb_id)] += 1;
  }

  PositionResult result;
  result.position_id = position_id;
  result.trial_id = trial_id;
  result.truth = truth;

  const double ref_toa = sum[0] / static_cast<double>(count[0]);
  bool feasible = true;
  for (std::size_t j = 1; j < n_gnbs; ++j) {
    const int gnb_id = static_cast<int>(j) + 1;
    const double toa = sum[j] / static_cast<double>(count[j]);
    result.rstds.push_back(tdoa::make_rstd_record(gnb_id, timing::measured_rstd(toa, ref_toa),
                                                  calibration.delta_hat(gnb_id)));
    feasible = feasible && tdoa::is_feasible_rstd(config.deployment.positions[0],
                                                  config.deployment.positions[j],
                                                  result.rstds.back().corrected_rstd_s);
  }
  if (!feasible) {
    result.status = PositionStatus::InvalidHyperbola;
    result.message = "corrected RSTD gives a^2 >= d^2";
    return result;
  }

  try {
    const auto est = tdoa::estimate_position(config.deployment, result.rstds);
    result.estimate = est;
    result.error_m = euclidean_distance(est.position, truth);
    result.status = est.converged ? PositionStatus::Converged : PositionStatus::NotConverged;
    if (!est.converged) result.message = "no convergence";
  } catch (const Error& e) {
    result.status = PositionStatus::Failed;
    result.message = e.what();
  }
  return result;
}

void positioning_into(TrialReport& report, const ScenarioConfig& config,
                      const timing::CalibrationResult& calibration, std::span<const double> deltas) {
  if (calibration.gnb_count() != config.deployment.size()) {
    fail(ErrorCode::InvalidArgument,
         "calibration covers " + std::to_string(calibration.gnb_count()) + " gNBs, deployment has " +
             std::to_string(config.deployment.size()));
  }
  const auto& positions = config.campaign.test_positions;
  std::vector<Position2D> estimates;
  std::vector<Position2D> truths;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (int t = 0; t < config.campaign.trials_per_position; ++t) {
      const int pid = static_cast<int>(i);
      const int trial_id = test_trial_id(config, pid, t);
      const auto records = simulate_trial(config, deltas, trial_id, pid, positions[i]);
      report.test_records.insert(report.test_records.end(), records.begin(), records.end());
      auto result = locate(config, calibration, records, pid, trial_id, positions[i]);
      if (result.status == PositionStatus::Converged) {
        estimates.push_back(result.estimate->position);
        truths.push_back(result.truth);
      } else {
        ++report.flagged_positions;
      }
      report.positions.push_back(std::move(result));
    }
  }
  if (!estimates.empty()) report.rmse_m = tdoa::rmse(estimates, truths);
}

}  // namespace

CalibrationRun run_calibration_trials(const ScenarioConfig& config) {
  validate(config);
  if (config.campaign.calibration_positions.empty()) {
    fail(ErrorCode::InsufficientData, "the campaign has no calibration positions (K = 0)");
  }
  CalibrationRun run;
  run.records = calibration_records(config, session_deltas(config));
  run.result = timing::calibrate(run.records, config.deployment, config.campaign.calibration_positions);
  return run;
}

timing::CalibrationResult run_calibration_campaign(const ScenarioConfig& config) {
  return run_calibration_trials(config).result;
}

TrialReport run_positioning_campaign(const ScenarioConfig& config,
                                     const timing::CalibrationResult& calibration) {
  validate(config);
  TrialReport report;
  report.true_delta_s = session_deltas(config);
  report.calibration = calibration;
  positioning_into(report, config, calibration, report.true_delta_s);
  report.toa_stats = toa_statistics(report.test_records);
  return report;
}

TrialReport run_session(const ScenarioConfig& config) {
  auto calibration = run_calibration_trials(config);
  TrialReport report;
  report.true_delta_s = session_deltas(config);
  report.calibration_records = std::move(calibration.records);
  report.calibration = std::move(calibration.result);
  positioning_into(report, config, *report.calibration, report.true_delta_s);

  std::vector<timing::ToaRecord> all = report.calibration_records;
  all.insert(all.end(), report.test_records.begin(), report.test_records.end());
  report.toa_stats = toa_statistics(all);
  return report;
}

std::string_view to_string(PositionStatus status) noexcept {
  switch (status) {
    case PositionStatus::Converged: return "true";
    case PositionStatus::NotConverged: return "false";
    case PositionStatus::InvalidHyperbola: return "invalid";
    case PositionStatus::Failed: return "failed";
  }
  return "failed";
}

std::vector<ToaStats> toa_statistics(std::span<const timing::ToaRecord> records) {
  std::map<std::tuple<int, int, int>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.trial_id, r.ue_position_id, r.gnb_id}].push_back(r.toa_s);

  std::vector<ToaStats> stats;
  stats.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    const double m = mean_of(values);
    stats.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), m,
                     sample_std(values, m), values.size()});
  }
  return stats;
}

std::vector<HistogramBin> toa_histogram(std::span<const timing::ToaRecord> records,
                                        double bin_width_s) {
  if (!(bin_width_s > 0.0)) fail(ErrorCode::InvalidArgument, "histogram bin width must be positive");
  std::map<std::pair<int, int>, std::map<long long, std::size_t>> groups;
  for (const auto& r : records) {
    const auto bin = static_cast<long long>(std::floor(r.toa_s / bin_width_s));
    groups[{r.trial_id, r.gnb_id}][bin] += 1;
  }
  std::vector<HistogramBin> bins;
  for (const auto& [key, counts] : groups) {
    const long long first = counts.begin()->first;
    const long long last = counts.rbegin()->first;
    for (long long b = first; b <= last; ++b) {
      const auto it = counts.find(b);
      bins.push_back({key.first, key.second, static_cast<double>(b) * bin_width_s,
                      static_cast<double>(b + 1) * bin_width_s,
                      it == counts.end() ? 0 : it->second});
    }
  }
  return bins;
}

std::vector<HyperbolaSample> hyperbola_samples(const TrialReport& report,
                                               const GnbDeployment& deployment, double t_limit,
                                               int n) {
  std::vector<HyperbolaSample> samples;
  for (const auto& pos : report.positions) {
    for (const auto& r : pos.rstds) {
      const auto& ref = deployment.positions[0];
      const auto& gnb = deployment.gnb(r.gnb_id);
      if (!tdoa::is_feasible_rstd(ref, gnb, r.corrected_rstd_s)) continue;
      const auto params = tdoa::hyperbola_from_rstd(ref, gnb, r.corrected_rstd_s);
      const auto pts = tdoa::hyperbola_points(params, -t_limit, t_limit, n);
      for (int i = 0; i < n; ++i) {
        const double t = -t_limit + 2.0 * t_limit * static_cast<double>(i) / static_cast<double>(n - 1);
        samples.push_back({pos.position_id, r.gnb_id, t, pts[static_cast<std::size_t>(i)]});
      }
    }
  }
  return samples;
}

namespace {

struct StudyPoint {
  double excess_delay_s = 0.0;
  std::complex<double> echo_gain{0.0, 0.0};
  double snr_db = 0.0;
  bool dither = true;
};

std::vector<StudyRow> study_rows(const ScenarioConfig& config, const StudyPoint& point,
                                 std::span<const int> factors) {
  if (config.study.trials < 1) fail(ErrorCode::InvalidArgument, "study trials must be >= 1");
  const auto ref = reference_grid(config, 1);
  const double los_base = time_of_flight(config.deployment.gnb(1), study_ue(config));
  const double native_spacing = 1.0 / config.estimator.native_sample_rate_hz;

  std::vector<std::vector<double>> errors(factors.size());
  for (int trial = 0; trial < config.study.trials; ++trial) {
    const auto trial_key = static_cast<std::uint64_t>(trial);
    Rng delay_rng(derive_seed(config.seed, 1, trial_key, StreamPurpose::StudyDelay));
    const double los = los_base + (point.dither ? delay_rng.uniform(0.0, native_spacing) : 0.0);

    std::vector<channel::ChannelTap> taps;
    if (point.echo_gain == std::complex<double>{}) {
      taps = {{los, {1.0, 0.0}}};
    } else if (point.excess_delay_s == 0.0) {
      taps = {{los, 1.0 + point.echo_gain}};
    } else {
      taps = {{los, {1.0, 0.0}}, {los + point.excess_delay_s, point.echo_gain}};
    }
    const channel::ChannelProfile profile(std::move(taps));
    const channel::NoiseSpec noise{point.snr_db,
                                   derive_seed(config.seed, 1, trial_key, StreamPurpose::GridNoise)};
    const auto rx = channel::apply_channel(ref, profile, noise);
    const auto cfr = estimator::estimate_cfr(rx, ref);
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto cir =
          estimator::interpolate_cir(cfr, factors[f], config.estimator.native_sample_rate_hz);
      const auto est = estimator::detect_toa(cir, config.estimator.detection);
      errors[f].push_back(estimator::signed_toa(est.toa_s, cir.unambiguous_range_s()) - los);
    }
  }

  std::vector<StudyRow> rows;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const double m = mean_of(errors[f]);
    rows.push_back({point.excess_delay_s, point.snr_db, factors[f], m, sample_std(errors[f], m),
                    config.study.trials});
  }
  return rows;
}

}  // namespace

std::vector<StudyRow> run_multipath_study(const ScenarioConfig& config,
                                          std::span<const double> excess_delays_s,
                                          std::complex<double> echo_gain) {
  validate(config);
  if (excess_delays_s.empty()) fail(ErrorCode::InvalidArgument, "empty excess-delay sweep");
  std::vector<StudyRow> rows;
  for (double excess : excess_delays_s) {
    if (!(excess >= 0.0)) fail(ErrorCode::InvalidArgument, "excess delays must be >= 0");
    auto point_rows = study_rows(config, {excess, echo_gain, config.channel.snr_db, true},
                                 config.study.oversample_factors);
    rows.insert(rows.end(), point_rows.begin(), point_rows.end());
  }
  return rows;
}

std::vector<double> SweepSpec::values() const {
  if (points < 1) fail(ErrorCode::InvalidArgument, "a sweep needs at least one point");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    v.push_back(points == 1 ? start
                            : start + (stop - start) * static_cast<double>(i) /
                                          static_cast<double>(points - 1));
  }
  return v;
}

std::string_view to_string(SweepParameter parameter) noexcept {
  switch (parameter) {
    case SweepParameter::ExcessDelay: return "excess_delay";
    case SweepParameter::SnrDb: return "snr_db";
    case SweepParameter::OversampleFactor: return "oversample_factor";
  }
  return "excess_delay";
}

std::vector<StudyRow> run_sweep(const ScenarioConfig& config, const SweepSpec& sweep) {
  const auto values = sweep.values();
  switch (sweep.parameter) {
    case SweepParameter::ExcessDelay:
      return run_multipath_study(config, values, config.study.echo_gain);
    case SweepParameter::SnrDb: {
      validate(config);
      std::vector<StudyRow> rows;
      for (double snr : values) {
        auto r = study_rows(config, {0.0, {0.0, 0.0}, snr, false}, config.study.oversample_factors);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      return rows;
    }
    case SweepParameter::OversampleFactor: {
      validate(config);
      std::vector<StudyRow> rows;
      for (double v : values) {
        const int factor = static_cast<int>(std::lround(v));
        if (factor < 1) fail(ErrorCode::InvalidArgument, "oversample factors must be >= 1");
        const int f[] = {factor};
        auto r = study_rows(config, {0.0, {0.0, 0.0}, config.channel.snr_db, false}, f);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      return rows;
    }
  }
  fail(ErrorCode::UnknownParameter, "unknown sweep parameter");
}

double airtime_per_gnb_s(const ScenarioConfig& config) {
  const double slot_s = 10e-3 / prs::slots_per_frame(config.deployment.scs_hz);
  return config.campaign.estimates_per_gnb * config.prs.resource_set_period * slot_s;
}

double airtime_per_trial_s(const ScenarioConfig& config) {
  return airtime_per_gnb_s(config) * static_cast<double>(config.deployment.size());
}

}  // namespace nrpos::harness
