#include "nrpos_tools/outputs.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace nrpos::tools {

namespace {

std::string row_end(std::string s) { return s + "\n"; }

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string toa_records_csv(std::span<const timing::ToaRecord> records) {
  std::string out = row_end(std::string(kToaRecordsHeader));
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{}\n", r.trial_id, r.ue_position_id, r.gnb_id, format_double(r.toa_s),
                       r.true_tof_s ? format_double(*r.true_tof_s) : "");
  }
  return out;
}

std::string rstd_records_csv(std::span<const harness::PositionResult> positions) {
  std::string out = row_end(std::string(kRstdRecordsHeader));
  for (const auto& p : positions) {
    for (const auto& r : p.rstds) {
      out += fmt::format("{},{},{},{},{}\n", p.trial_id, p.position_id, r.gnb_id, format_double(r.rstd_s),
                         format_double(r.corrected_rstd_s));
    }
  }
  return out;
}

std::string calibration_csv(const timing::CalibrationResult& c) {
  std::string out = row_end(std::string(kCalibrationHeader));
  for (std::size_t j = 0; j < c.gnb_count(); ++j) {
    out += fmt::format("{},{},{},{}\n", j + 1, format_double(c.delta_hat_s[j]), c.sample_count[j],
                       format_double(c.residual_std_s[j]));
  }
  return out;
}

std::string estimates_csv(const harness::TrialReport& report) {
  std::string out = row_end(std::string(kEstimatesHeader));
  for (const auto& p : report.positions) {
    std::string est_x, est_y, error;
    if (p.estimate) {
      est_x = format_double(p.estimate->position.x);
      est_y = format_double(p.estimate->position.y);
      error = format_double(p.error_m);
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", p.position_id, format_double(p.truth.x),
                       format_double(p.truth.y), est_x, est_y, error, harness::to_string(p.status));
  }
  out += fmt::format("rmse,,,,,{},\n", report.rmse_m ? format_double(*report.rmse_m) : "nan");
  return out;
}

std::string histogram_csv(std::span<const harness::HistogramBin> bins) {
  std::string out = row_end(std::string(kHistogramHeader));
  for (const auto& b : bins) {
    out += fmt::format("{},{},{},{},{}\n", b.trial_id, b.gnb_id, format_double(b.lo_s), format_double(b.hi_s),
                       b.count);
  }
  return out;
}

std::string hyperbolas_csv(std::span<const harness::HyperbolaSample> samples) {
  std::string out = row_end(std::string(kHyperbolasHeader));
  for (const auto& s : samples) {
    out += fmt::format("{},{},{},{},{}\n", s.position_id, s.gnb_id, format_double(s.t),
                       format_double(s.point.x), format_double(s.point.y));
  }
  return out;
}

std::string sweep_csv(harness::SweepParameter parameter, std::span<const harness::StudyRow> rows) {
  std::string out = row_end(std::string(kSweepHeader));
  for (const auto& r : rows) {
    double value = r.excess_delay_s;
    if (parameter == harness::SweepParameter::SnrDb) value = r.snr_db;
    if (parameter == harness::SweepParameter::OversampleFactor) value = r.oversample_factor;
    out += fmt::format("{},{},{},{},{},{}\n", harness::to_string(parameter), format_double(value),
                       r.oversample_factor, format_double(r.toa_bias_s), format_double(r.toa_std_s), r.trials);
  }
  return out;
}

std::string positions_svg(const harness::TrialReport& report, const GnbDeployment& deployment,
                          std::span<const harness::HyperbolaSample> samples) {
  double lo_x = deployment.positions.front().x, hi_x = lo_x;
  double lo_y = deployment.positions.front().y, hi_y = lo_y;
  const auto grow = [&](const Position2D& p) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  };
  for (const auto& p : deployment.positions) grow(p);
  for (const auto& p : report.positions) grow(p.truth);
  const double pad = 0.1 * std::max(hi_x - lo_x, hi_y - lo_y) + 1.0;
  lo_x -= pad;
  hi_x += pad;
  lo_y -= pad;
  hi_y += pad;

  const double size = 600.0;
  const double scale = size / std::max(hi_x - lo_x, hi_y - lo_y);
  const auto sx = [&](double x) { return (x - lo_x) * scale; };
  const auto sy = [&](double y) { return size - (y - lo_y) * scale; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      size);

  // Hyperbola branches, clipped to the view.
  const char* colors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b"};
  std::string path;
  int last_pos = -1, last_gnb = -1;
  const auto flush = [&] {
    if (!path.empty()) {
      svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" opacity=\"0.5\" points=\"{}\"/>\n",
                         colors[(last_gnb - 2) % 4], path);
    }
    path.clear();
  };
  for (const auto& s : samples) {
    if (s.position_id != last_pos || s.gnb_id != last_gnb) {
      flush();
      last_pos = s.position_id;
      last_gnb = s.gnb_id;
    }
    if (s.point.x < lo_x || s.point.x > hi_x || s.point.y < lo_y || s.point.y > hi_y) continue;
    path += fmt::format("{:.2f},{:.2f} ", sx(s.point.x), sy(s.point.y));
  }
  flush();

  for (const auto& g : deployment.positions) {
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"10\" height=\"10\" fill=\"black\"/>\n",
                       sx(g.x) - 5, sy(g.y) - 5);
  }
  for (const auto& p : report.positions) {
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"none\" stroke=\"green\"/>\n",
                       sx(p.truth.x), sy(p.truth.y));
    if (p.estimate) {
      const auto& e = p.estimate->position;
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"red\"/>\n", sx(e.x), sy(e.y));
    }
  }
  svg += "</svg>\n";
  return svg;
}

timing::CalibrationResult parse_calibration_csv(std::string_view text, std::string_view source) {
  const auto fail = [&](std::size_t line, const std::string& what) -> void {
    throw Error(ErrorCode::ParseError, fmt::format("{}:{}: {}", source, line, what));
  };
  const auto number = [&](std::string_view s, std::size_t line, const char* field) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != str.size() || str.empty()) fail(line, fmt::format("field '{}': expected a number", field));
    return v;
  };

  timing::CalibrationResult result;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool header_seen = false;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCalibrationHeader) fail(line_no, fmt::format("expected header '{}'", kCalibrationHeader));
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 4) fail(line_no, "expected 4 columns");
    const double id = number(cells[0], line_no, "gnb_id");
    if (id != static_cast<double>(result.gnb_count() + 1)) {
      fail(line_no, fmt::format("field 'gnb_id': expected {}", result.gnb_count() + 1));
    }
    const double count = number(cells[2], line_no, "sample_count");
    if (count < 0 || count != std::floor(count)) fail(line_no, "field 'sample_count': expected a count");
    result.delta_hat_s.push_back(number(cells[1], line_no, "delta_hat_s"));
    result.sample_count.push_back(static_cast<std::size_t>(count));
    result.residual_std_s.push_back(number(cells[3], line_no, "residual_std_s"));
  }
  if (!header_seen) fail(line_no, "empty calibration file");
  if (result.gnb_count() == 0) fail(line_no, "no calibration rows");
  if (result.delta_hat_s.front() != 0.0) fail(2, "field 'delta_hat_s': the reference gNB must have 0");
  return result;
}

void write_bundle(const std::filesystem::path& dir, const OutputBundle& bundle) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());

  std::vector<fs::path> temps;
  const auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [name, contents] : bundle) {
    const auto tmp = dir / (name + ".tmp");
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) {
      cleanup();
      throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    }
  }
  for (const auto& [name, contents] : bundle) {
    fs::rename(dir / (name + ".tmp"), dir / name, ec);
    if (ec) {
      cleanup();
      throw Error(ErrorCode::Io, "cannot move " + name + " into " + dir.string());
    }
  }
}

}  // namespace nrpos::tools
