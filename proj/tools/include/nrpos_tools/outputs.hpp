#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrpos/harness.hpp"

namespace nrpos::tools {

// CSV headers; stable across versions.
inline constexpr std::string_view kToaRecordsHeader = "trial_id,ue_position_id,gnb_id,toa_s,true_tof_s";
inline constexpr std::string_view kRstdRecordsHeader = "trial_id,position_id,gnb_id,rstd_s,corrected_rstd_s";
inline constexpr std::string_view kCalibrationHeader = "gnb_id,delta_hat_s,sample_count,residual_std_s";
inline constexpr std::string_view kEstimatesHeader =
    "position_id,true_x_m,true_y_m,est_x_m,est_y_m,error_m,converged";
inline constexpr std::string_view kHistogramHeader = "trial_id,gnb_id,bin_lo_s,bin_hi_s,count";
inline constexpr std::string_view kHyperbolasHeader = "position_id,gnb_id,t,x_m,y_m";
inline constexpr std::string_view kSweepHeader = "parameter,value,oversample_factor,toa_bias_s,toa_std_s,trials";

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string toa_records_csv(std::span<const timing::ToaRecord> records);
std::string rstd_records_csv(std::span<const harness::PositionResult> positions);
std::string calibration_csv(const timing::CalibrationResult& calibration);
// One row per position result plus a final "rmse" row.
std::string estimates_csv(const harness::TrialReport& report);
std::string histogram_csv(std::span<const harness::HistogramBin> bins);
std::string hyperbolas_csv(std::span<const harness::HyperbolaSample> samples);
std::string sweep_csv(harness::SweepParameter parameter, std::span<const harness::StudyRow> rows);

std::string positions_svg(const harness::TrialReport& report, const GnbDeployment& deployment,
                          std::span<const harness::HyperbolaSample> samples);

// Throws ParseError for a malformed file.
timing::CalibrationResult parse_calibration_csv(std::string_view text, std::string_view source = "calibration");

// File name -> contents. Written only once everything has been computed;
// each file goes to a temporary name first and is renamed into place, and
// nothing is left behind when a write fails. Throws Io.
using OutputBundle = std::map<std::string, std::string>;
void write_bundle(const std::filesystem::path& dir, const OutputBundle& bundle);

}  // namespace nrpos::tools
