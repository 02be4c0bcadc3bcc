#include "nrpos_tools/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nrpos::tools {

using nlohmann::json;

namespace {

// Tracks the dotted field path while walking the document so that errors
// can name the field and, best effort, the line it sits on.
class Reader {
 public:
  Reader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (const auto line = line_of(path)) msg << ':' << line;
    msg << ": field '" << path << "': " << what;
    throw Error(ErrorCode::ParseError, msg.str());
  }

  void expect_keys(const json& obj, const std::string& path,
                   std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      bool known = false;
      for (auto a : allowed) known = known || a == key;
      if (!known) fail(join(path, key), "unknown field");
    }
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  // Numbers plus the strings "inf" and "-inf".
  double extended_number(const json& v, const std::string& path) const {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      fail(path, "expected a number or \"inf\"");
    }
    return number(v, path);
  }

  long long integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long long>();
  }

  int int32(const json& v, const std::string& path) const {
    const auto x = integer(v, path);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      fail(path, "integer out of range");
    }
    return static_cast<int>(x);
  }

  std::uint64_t uint64(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  Position2D position(const json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y] in meters");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  std::complex<double> complex(const json& v, const std::string& path) const {
    if (v.is_number()) return {number(v, path), 0.0};
    if (!v.is_array() || v.size() != 2) fail(path, "expected a number or [re, im]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  std::vector<Position2D> positions(const json& v, const std::string& path) const {
    std::vector<Position2D> out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(position(v[i], index(path, i)));
    return out;
  }

  template <typename T, typename Fn>
  std::vector<T> list(const json& v, const std::string& path, Fn&& item) const {
    std::vector<T> out;
    for (std::size_t i = 0; i < array(v, path).size(); ++i) out.push_back(item(v[i], index(path, i)));
    return out;
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

 private:
  // Line of the last key of path, found by following its keys through the
  // text in order. Zero when the key cannot be located.
  std::size_t line_of(const std::string& path) const {
    std::size_t pos = 0;
    std::size_t start = 0;
    bool found = false;
    while (start <= path.size()) {
      auto end = path.find('.', start);
      if (end == std::string::npos) end = path.size();
      auto key = path.substr(start, end - start);
      key = key.substr(0, key.find('['));
      const auto hit = text_.find("\"" + key + "\"", pos);
      if (hit == std::string_view::npos) break;
      pos = hit;
      found = true;
      start = end + 1;
    }
    if (!found) return 0;
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

  std::string_view text_;
  std::string_view source_;
};

void read_deployment(const Reader& r, const json& j, GnbDeployment& d) {
  const std::string p = "deployment";
  r.expect_keys(j, p, {"gnbs", "carrier_hz", "scs_hz", "n_prb"});
  if (j.contains("gnbs")) d.positions = r.positions(j["gnbs"], p + ".gnbs");
  if (j.contains("carrier_hz")) d.carrier_hz = r.number(j["carrier_hz"], p + ".carrier_hz");
  if (j.contains("scs_hz")) d.scs_hz = r.number(j["scs_hz"], p + ".scs_hz");
  if (j.contains("n_prb")) d.n_prb = r.int32(j["n_prb"], p + ".n_prb");
}

void read_prs(const Reader& r, const json& j, prs::PrsConfig& c) {
  const std::string p = "prs";
  r.expect_keys(j, p,
                {"resource_set_period", "resource_set_offset", "resource_offset_per_gnb",
                 "resource_repetition", "resource_time_gap", "symbol_start", "num_symbols",
                 "rb_offset", "num_rbs", "comb_size", "comb_offset_per_gnb",
                 "sequence_id_per_gnb"});
  const auto int_field = [&](const char* key, int& out) {
    if (j.contains(key)) out = r.int32(j[key], Reader::join(p, key));
  };
  const auto int_list = [&](const char* key, std::vector<int>& out) {
    if (j.contains(key)) {
      out = r.list<int>(j[key], Reader::join(p, key),
                        [&](const json& v, const std::string& path) { return r.int32(v, path); });
    }
  };
  int_field("resource_set_period", c.resource_set_period);
  int_field("resource_set_offset", c.resource_set_offset);
  int_list("resource_offset_per_gnb", c.resource_offset_per_gnb);
  int_field("resource_repetition", c.resource_repetition);
  int_field("resource_time_gap", c.resource_time_gap);
  int_field("symbol_start", c.symbol_start);
  int_field("num_symbols", c.num_symbols);
  int_field("rb_offset", c.rb_offset);
  int_field("num_rbs", c.num_rbs);
  int_field("comb_size", c.comb_size);
  int_list("comb_offset_per_gnb", c.comb_offset_per_gnb);
  if (j.contains("sequence_id_per_gnb")) {
    c.sequence_id_per_gnb = r.list<std::uint32_t>(
        j["sequence_id_per_gnb"], p + ".sequence_id_per_gnb",
        [&](const json& v, const std::string& path) {
          const auto id = r.uint64(v, path);
          if (id > std::numeric_limits<std::uint32_t>::max()) r.fail(path, "sequence id out of range");
          return static_cast<std::uint32_t>(id);
        });
  }
}

void read_offsets(const Reader& r, const json& j, harness::OffsetSpec& o) {
  const std::string p = "offsets";
  r.expect_keys(j, p, {"phi_s", "phi_bound_s", "delta_s", "delta_bound_s", "noise_sigma_s"});
  if (j.contains("phi_s")) {
    if (j["phi_s"].is_null()) {
      o.phi_s.reset();
    } else {
      o.phi_s = r.number(j["phi_s"], p + ".phi_s");
    }
  }
  if (j.contains("phi_bound_s")) o.phi_bound_s = r.number(j["phi_bound_s"], p + ".phi_bound_s");
  if (j.contains("delta_s")) {
    if (j["delta_s"].is_null()) {
      o.delta_s.reset();
    } else {
      o.delta_s = r.list<double>(j["delta_s"], p + ".delta_s",
                                 [&](const json& v, const std::string& path) { return r.number(v, path); });
    }
  }
  if (j.contains("delta_bound_s")) o.delta_bound_s = r.number(j["delta_bound_s"], p + ".delta_bound_s");
  if (j.contains("noise_sigma_s")) o.noise_sigma_s = r.number(j["noise_sigma_s"], p + ".noise_sigma_s");
}

void read_channel(const Reader& r, const json& j, harness::ChannelSpec& c) {
  const std::string p = "channel";
  r.expect_keys(j, p, {"snr_db", "echoes"});
  if (j.contains("snr_db")) {
    if (j["snr_db"].is_null()) {
      c.snr_db = std::numeric_limits<double>::infinity();
    } else {
      c.snr_db = r.extended_number(j["snr_db"], p + ".snr_db");
    }
  }
  if (j.contains("echoes")) {
    c.echoes_per_gnb = r.list<std::vector<channel::Echo>>(
        j["echoes"], p + ".echoes", [&](const json& set, const std::string& set_path) {
          return r.list<channel::Echo>(set, set_path, [&](const json& e, const std::string& path) {
            r.expect_keys(e, path, {"excess_delay_s", "gain"});
            if (!e.contains("excess_delay_s") || !e.contains("gain")) {
              r.fail(path, "an echo needs excess_delay_s and gain");
            }
            return channel::Echo{r.number(e["excess_delay_s"], path + ".excess_delay_s"),
                                 r.complex(e["gain"], path + ".gain")};
          });
        });
  }
}

void read_estimator(const Reader& r, const json& j, harness::EstimatorSpec& e) {
  const std::string p = "estimator";
  r.expect_keys(j, p, {"oversample_factor", "detection", "threshold_db", "refine",
                       "native_sample_rate_hz", "toa_source"});
  if (j.contains("oversample_factor")) e.oversample_factor = r.int32(j["oversample_factor"], p + ".oversample_factor");
  if (j.contains("detection")) {
    const auto mode = r.string(j["detection"], p + ".detection");
    if (mode == "max_peak") {
      e.detection.mode = estimator::DetectionMode::MaxPeak;
    } else if (mode == "first_path") {
      e.detection.mode = estimator::DetectionMode::FirstPath;
    } else {
      r.fail(p + ".detection", "expected \"max_peak\" or \"first_path\"");
    }
  }
  if (j.contains("threshold_db")) e.detection.threshold_db = r.number(j["threshold_db"], p + ".threshold_db");
  if (j.contains("refine")) e.detection.refine = r.boolean(j["refine"], p + ".refine");
  if (j.contains("native_sample_rate_hz")) {
    e.native_sample_rate_hz = r.number(j["native_sample_rate_hz"], p + ".native_sample_rate_hz");
  }
  if (j.contains("toa_source")) {
    const auto source = r.string(j["toa_source"], p + ".toa_source");
    if (source == "channel") {
      e.toa_source = harness::ToaSource::Channel;
    } else if (source == "model") {
      e.toa_source = harness::ToaSource::Model;
    } else {
      r.fail(p + ".toa_source", "expected \"channel\" or \"model\"");
    }
  }
}

void read_campaign(const Reader& r, const json& j, harness::CampaignSpec& c) {
  const std::string p = "campaign";
  r.expect_keys(j, p, {"calibration_positions", "test_positions", "trials_per_position",
                       "estimates_per_gnb"});
  if (j.contains("calibration_positions")) {
    c.calibration_positions = r.positions(j["calibration_positions"], p + ".calibration_positions");
  }
  if (j.contains("test_positions")) c.test_positions = r.positions(j["test_positions"], p + ".test_positions");
  if (j.contains("trials_per_position")) {
    c.trials_per_position = r.int32(j["trials_per_position"], p + ".trials_per_position");
  }
  if (j.contains("estimates_per_gnb")) c.estimates_per_gnb = r.int32(j["estimates_per_gnb"], p + ".estimates_per_gnb");
}

void read_study(const Reader& r, const json& j, harness::StudySpec& s) {
  const std::string p = "study";
  r.expect_keys(j, p, {"trials", "echo_gain", "oversample_factors", "ue_position"});
  if (j.contains("trials")) s.trials = r.int32(j["trials"], p + ".trials");
  if (j.contains("echo_gain")) s.echo_gain = r.complex(j["echo_gain"], p + ".echo_gain");
  if (j.contains("oversample_factors")) {
    s.oversample_factors = r.list<int>(j["oversample_factors"], p + ".oversample_factors",
                                       [&](const json& v, const std::string& path) { return r.int32(v, path); });
  }
  if (j.contains("ue_position")) {
    if (j["ue_position"].is_null()) {
      s.ue_position.reset();
    } else {
      s.ue_position = r.position(j["ue_position"], p + ".ue_position");
    }
  }
}

json position_json(const Position2D& p) { return json::array({p.x, p.y}); }

json positions_json(const std::vector<Position2D>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(position_json(p));
  return out;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace

harness::ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(offset > 0 ? offset - 1 : 0), '\n');
    throw Error(ErrorCode::ParseError, std::string(source) + ":" + std::to_string(line) +
                                           ": malformed JSON (" + e.what() + ")");
  }

  const Reader r(text, source);
  r.expect_keys(doc, "", {"seed", "deployment", "prs", "offsets", "channel", "estimator", "campaign", "study"});

  auto config = harness::default_scenario();
  if (doc.contains("seed")) config.seed = r.uint64(doc["seed"], "seed");
  if (doc.contains("deployment")) read_deployment(r, doc["deployment"], config.deployment);
  if (doc.contains("prs")) read_prs(r, doc["prs"], config.prs);
  if (doc.contains("offsets")) read_offsets(r, doc["offsets"], config.offsets);
  if (doc.contains("channel")) read_channel(r, doc["channel"], config.channel);
  if (doc.contains("estimator")) read_estimator(r, doc["estimator"], config.estimator);
  if (doc.contains("campaign")) read_campaign(r, doc["campaign"], config.campaign);
  if (doc.contains("study")) read_study(r, doc["study"], config.study);
  return config;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return buf.str();
}

harness::ScenarioConfig load_scenario(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) throw Error(ErrorCode::Io, path.string() + " is a directory");
  return parse_scenario(read_file(path), path.string());
}

std::string dump_scenario(const harness::ScenarioConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["deployment"] = {{"gnbs", positions_json(c.deployment.positions)},
                       {"carrier_hz", c.deployment.carrier_hz},
                       {"scs_hz", c.deployment.scs_hz},
                       {"n_prb", c.deployment.n_prb}};
  doc["prs"] = {{"resource_set_period", c.prs.resource_set_period},
                {"resource_set_offset", c.prs.resource_set_offset},
                {"resource_offset_per_gnb", c.prs.resource_offset_per_gnb},
                {"resource_repetition", c.prs.resource_repetition},
                {"resource_time_gap", c.prs.resource_time_gap},
                {"symbol_start", c.prs.symbol_start},
                {"num_symbols", c.prs.num_symbols},
                {"rb_offset", c.prs.rb_offset},
                {"num_rbs", c.prs.num_rbs},
                {"comb_size", c.prs.comb_size},
                {"comb_offset_per_gnb", c.prs.comb_offset_per_gnb},
                {"sequence_id_per_gnb", c.prs.sequence_id_per_gnb}};

  json offsets = {{"phi_bound_s", c.offsets.phi_bound_s},
                  {"delta_bound_s", c.offsets.delta_bound_s},
                  {"noise_sigma_s", c.offsets.noise_sigma_s}};
  offsets["phi_s"] = c.offsets.phi_s ? json(*c.offsets.phi_s) : json(nullptr);
  offsets["delta_s"] = c.offsets.delta_s ? json(*c.offsets.delta_s) : json(nullptr);
  doc["offsets"] = offsets;

  json echoes = json::array();
  for (const auto& set : c.channel.echoes_per_gnb) {
    json s = json::array();
    for (const auto& e : set) s.push_back({{"excess_delay_s", e.excess_delay_s}, {"gain", complex_json(e.gain)}});
    echoes.push_back(s);
  }
  doc["channel"] = {{"snr_db", std::isfinite(c.channel.snr_db) ? json(c.channel.snr_db)
                                                               : json(c.channel.snr_db > 0 ? "inf" : "-inf")},
                    {"echoes", echoes}};

  doc["estimator"] = {
      {"oversample_factor", c.estimator.oversample_factor},
      {"detection", c.estimator.detection.mode == estimator::DetectionMode::MaxPeak ? "max_peak" : "first_path"},
      {"threshold_db", c.estimator.detection.threshold_db},
      {"refine", c.estimator.detection.refine},
      {"native_sample_rate_hz", c.estimator.native_sample_rate_hz},
      {"toa_source", c.estimator.toa_source == harness::ToaSource::Channel ? "channel" : "model"}};

  doc["campaign"] = {{"calibration_positions", positions_json(c.campaign.calibration_positions)},
                     {"test_positions", positions_json(c.campaign.test_positions)},
                     {"trials_per_position", c.campaign.trials_per_position},
                     {"estimates_per_gnb", c.campaign.estimates_per_gnb}};

  doc["study"] = {{"trials", c.study.trials},
                  {"echo_gain", complex_json(c.study.echo_gain)},
                  {"oversample_factors", c.study.oversample_factors}};
  doc["study"]["ue_position"] = c.study.ue_position ? position_json(*c.study.ue_position) : json(nullptr);

  return doc.dump(2) + "\n";
}

}  // namespace nrpos::tools
