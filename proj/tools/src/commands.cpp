#include "nrpos_tools/commands.hpp"

#include <charconv>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "nrpos_tools/config_io.hpp"
#include "nrpos_tools/outputs.hpp"

namespace nrpos::tools {

namespace {

harness::ScenarioConfig load(const CommandOptions& options) {
  if (options.config_path.empty()) throw Error(ErrorCode::InvalidArgument, "--config is required");
  auto config = load_scenario(options.config_path);
  if (options.seed) config.seed = *options.seed;
  spdlog::debug("loaded {} (seed {})", options.config_path, config.seed);
  return config;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw Error(ErrorCode::ParseError, "--sweep: bad " + what + " '" + s + "'");
  return v;
}

int cmd_validate(const CommandOptions& options, std::ostream& out) {
  const auto config = load(options);
  const auto issues = harness::check_scenario(config);
  if (!issues.empty()) {
    for (const auto& e : issues) out << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitDomain;
  }
  const auto schedule = prs::build_schedule(config.prs, config.deployment.size(), config.deployment.scs_hz);
  out << fmt::format("ok: {} gNBs, {} calibration and {} test positions\n", config.deployment.size(),
                     config.campaign.calibration_positions.size(), config.campaign.test_positions.size());
  for (std::size_t j = 0; j < schedule.per_gnb.size(); ++j) {
    out << fmt::format("gnb {}: slots", j + 1);
    for (const auto& s : schedule.per_gnb[j]) out << fmt::format(" {}", s.period_slot);
    out << "\n";
  }
  out << fmt::format("airtime per trial: {} s\n", format_double(harness::airtime_per_trial_s(config)));
  return kExitOk;
}

int cmd_calibrate(const CommandOptions& options, std::ostream& out) {
  const auto config = load(options);
  const auto run = harness::run_calibration_trials(config);
  OutputBundle bundle;
  bundle["calibration.csv"] = calibration_csv(run.result);
  bundle["toa_records.csv"] = toa_records_csv(run.records);
  bundle["histogram.csv"] = histogram_csv(harness::toa_histogram(run.records));
  write_bundle(options.out_dir, bundle);
  for (std::size_t j = 0; j < run.result.gnb_count(); ++j) {
    out << fmt::format("gnb {}: delta_hat_s {}\n", j + 1, format_double(run.result.delta_hat_s[j]));
  }
  return kExitOk;
}

int cmd_locate(const CommandOptions& options, std::ostream& out) {
  const auto config = load(options);
  if (options.calibration_path.empty()) throw Error(ErrorCode::InvalidArgument, "--calibration is required");
  const auto calibration =
      parse_calibration_csv(read_file(options.calibration_path), options.calibration_path);
  if (calibration.gnb_count() != config.deployment.size()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} lists {} gNBs but the scenario has {}", options.calibration_path,
                            calibration.gnb_count(), config.deployment.size()));
  }
  const auto report = harness::run_positioning_campaign(config, calibration);
  const auto samples = harness::hyperbola_samples(report, config.deployment);
  OutputBundle bundle;
  bundle["estimates.csv"] = estimates_csv(report);
  bundle["hyperbolas.csv"] = hyperbolas_csv(samples);
  bundle["rstd_records.csv"] = rstd_records_csv(report.positions);
  bundle["toa_records.csv"] = toa_records_csv(report.test_records);
  write_bundle(options.out_dir, bundle);
  out << fmt::format("rmse_m {} ({} flagged)\n", report.rmse_m ? format_double(*report.rmse_m) : "nan",
                     report.flagged_positions);
  return kExitOk;
}

int cmd_sweep(const CommandOptions& options, std::ostream& out) {
  const auto config = load(options);
  if (options.sweep.empty()) throw Error(ErrorCode::InvalidArgument, "--sweep is required");
  const auto spec = parse_sweep_spec(options.sweep);
  const auto rows = harness::run_sweep(config, spec);
  write_bundle(options.out_dir, {{"sweep.csv", sweep_csv(spec.parameter, rows)}});
  out << fmt::format("{} rows\n", rows.size());
  return kExitOk;
}

int cmd_simulate(const CommandOptions& options, std::ostream& out) {
  const auto config = load(options);
  const auto report = harness::run_session(config);
  const auto samples = harness::hyperbola_samples(report, config.deployment);

  std::vector<timing::ToaRecord> all = report.calibration_records;
  all.insert(all.end(), report.test_records.begin(), report.test_records.end());

  OutputBundle bundle;
  bundle["toa_records.csv"] = toa_records_csv(all);
  bundle["rstd_records.csv"] = rstd_records_csv(report.positions);
  bundle["calibration.csv"] = calibration_csv(*report.calibration);
  bundle["estimates.csv"] = estimates_csv(report);
  bundle["histogram.csv"] = histogram_csv(harness::toa_histogram(all));
  bundle["hyperbolas.csv"] = hyperbolas_csv(samples);
  bundle["positions.svg"] = positions_svg(report, config.deployment, samples);
  write_bundle(options.out_dir, bundle);
  out << fmt::format("rmse_m {} ({} flagged)\n", report.rmse_m ? format_double(*report.rmse_m) : "nan",
                     report.flagged_positions);
  return kExitOk;
}

}  // namespace

harness::SweepSpec parse_sweep_spec(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "--sweep expects PARAM=START:STOP:N");
  const auto name = text.substr(0, eq);
  harness::SweepSpec spec;
  if (name == "excess_delay") {
    spec.parameter = harness::SweepParameter::ExcessDelay;
  } else if (name == "snr_db") {
    spec.parameter = harness::SweepParameter::SnrDb;
  } else if (name == "oversample_factor") {
    spec.parameter = harness::SweepParameter::OversampleFactor;
  } else {
    throw Error(ErrorCode::UnknownParameter,
                "unknown sweep parameter '" + name + "' (expected excess_delay, snr_db or oversample_factor)");
  }
  const auto range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : range.find(':', c1 + 1);
  if (c2 == std::string::npos) throw Error(ErrorCode::ParseError, "--sweep expects PARAM=START:STOP:N");
  spec.start = parse_number(range.substr(0, c1), "start");
  spec.stop = parse_number(range.substr(c1 + 1, c2 - c1 - 1), "stop");
  const auto n_text = range.substr(c2 + 1);
  int n = 0;
  const auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
  if (ec != std::errc() || ptr != n_text.data() + n_text.size() || n < 1) {
    throw Error(ErrorCode::ParseError, "--sweep: N must be a positive integer");
  }
  spec.points = n;
  return spec;
}

int exit_code_for(ErrorCode code) noexcept { return code == ErrorCode::Io ? kExitIo : kExitDomain; }

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.command == "validate") return cmd_validate(options, out);
    if (options.command == "calibrate") return cmd_calibrate(options, out);
    if (options.command == "locate") return cmd_locate(options, out);
    if (options.command == "sweep") return cmd_sweep(options, out);
    if (options.command == "simulate") return cmd_simulate(options, out);
    err << "unknown command '" << options.command << "'\n";
    return kExitDomain;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace nrpos::tools
