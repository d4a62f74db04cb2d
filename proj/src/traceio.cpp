#include "dat/traceio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "dat/priority.hpp"

namespace dat {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceIoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw TraceIoError("cannot open " + path.string() + " for writing");
  return out;
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

std::uint64_t clamp_bytes(double value, std::size_t line, std::vector<std::string>* warnings) {
  if (value <= 0.0) {
    warn(warnings, "line " + std::to_string(line) + ": non-positive bandwidth clamped to 1 B/s");
    return 1;
  }
  const double rounded = std::llround(value);
  return rounded < 1.0 ? 1 : static_cast<std::uint64_t>(rounded);
}

constexpr std::uint64_t kMaxUnitBytes = 1ull << 50;  // keeps byte counts exact as doubles

std::uint64_t require_cost(const nlohmann::json& record, const char* field, std::size_t line) {
  if (!record.contains(field) || !record[field].is_number_integer()) {
    throw MalformedRecordError("line " + std::to_string(line) + ": missing integer field '" +
                                   field + "'",
                               line);
  }
  const auto value = record[field].get<std::int64_t>();
  if (value <= 0 || static_cast<std::uint64_t>(value) > kMaxUnitBytes) {
    throw MalformedRecordError("line " + std::to_string(line) + ": field '" + field +
                                   "' must be a positive byte count",
                               line);
  }
  return static_cast<std::uint64_t>(value);
}

}  // namespace

BandwidthTrace load_bandwidth_csv(const std::filesystem::path& path, double period_s,
                                  BandwidthUnits units, std::vector<std::string>* warnings) {
  if (!(period_s > 0.0)) throw std::invalid_argument("load_bandwidth_csv: period must be positive");
  std::ifstream in = open_input(path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw EmptyTraceError(path.string() + ": empty bandwidth trace");
  ++line_no;
  if (trim(line) != "t_sec,bytes_per_sec") {
    throw MalformedRowError(path.string() + ": line 1: expected header 't_sec,bytes_per_sec'", 1);
  }

  std::vector<BandwidthSample> raw;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    double t = 0.0, value = 0.0;
    const char* t_end = row.data() + (comma == std::string::npos ? row.size() : comma);
    auto [p1, ec1] = std::from_chars(row.data(), t_end, t);
    bool ok = comma != std::string::npos && ec1 == std::errc{} && p1 == t_end;
    if (ok) {
      const char* v_begin = row.data() + comma + 1;
      const char* v_end = row.data() + row.size();
      auto [p2, ec2] = std::from_chars(v_begin, v_end, value);
      ok = ec2 == std::errc{} && p2 == v_end;
    }
    if (!ok) {
      throw MalformedRowError(path.string() + ": line " + std::to_string(line_no) +
                                  ": malformed bandwidth row",
                              line_no);
    }
    if (!raw.empty() && t <= raw.back().t_start_s) {
      throw MalformedRowError(path.string() + ": line " + std::to_string(line_no) +
                                  ": timestamps must be strictly increasing",
                              line_no);
    }
    if (units == BandwidthUnits::KilobitsPerSecond) value *= 125.0;  // kbit/s -> bytes/s
    raw.push_back({t, clamp_bytes(value, line_no, warnings)});
  }
  if (raw.empty()) throw EmptyTraceError(path.string() + ": no bandwidth samples");

  BandwidthTrace trace;
  trace.sample_period_s = period_s;

  bool uniform = true;
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    if (std::fabs((raw[i + 1].t_start_s - raw[i].t_start_s) - period_s) > 1e-9) {
      uniform = false;
      break;
    }
  }
  if (uniform) {
    trace.samples = std::move(raw);
    return trace;
  }

  // Mean-pool into period-aligned bins; holes carry the previous bin forward.
  warn(warnings, path.string() + ": non-uniform sample spacing; mean-pooled to " +
                     std::to_string(period_s) + " s bins");
  const auto bin_of = [&](double t) {
    return static_cast<std::int64_t>(std::floor(t / period_s));
  };
  const std::int64_t first_bin = bin_of(raw.front().t_start_s);
  const std::int64_t last_bin = bin_of(raw.back().t_start_s);
  std::size_t i = 0;
  std::uint64_t previous = raw.front().bytes_per_s;
  for (std::int64_t bin = first_bin; bin <= last_bin; ++bin) {
    double sum = 0.0;
    std::size_t count = 0;
    while (i < raw.size() && bin_of(raw[i].t_start_s) == bin) {
      sum += static_cast<double>(raw[i].bytes_per_s);
      ++count;
      ++i;
    }
    const std::uint64_t value =
        count == 0 ? previous
                   : clamp_bytes(sum / static_cast<double>(count), 0, nullptr);
    trace.samples.push_back({static_cast<double>(bin) * period_s, value});
    previous = value;
  }
  return trace;
}

void save_bandwidth_csv(const BandwidthTrace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "t_sec,bytes_per_sec\n";
  for (const BandwidthSample& s : trace.samples) {
    out << s.t_start_s << ',' << s.bytes_per_s << '\n';
  }
  if (!out) throw TraceIoError("write failed: " + path.string());
}

std::vector<EventRecord> load_event_records(const std::filesystem::path& path,
                                            const EventLoadOptions& options) {
  std::ifstream in = open_input(path);
  std::vector<EventRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(row, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": not a JSON object",
                                 line_no);
    }
    EventRecord rec;
    if (!record.contains("event_id") || !record["event_id"].is_string() ||
        record["event_id"].get<std::string>().empty()) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": missing event_id",
                                 line_no);
    }
    rec.event_id = record["event_id"].get<std::string>();
    if (!seen_ids.insert(rec.event_id).second) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": duplicate event_id '" + rec.event_id + "'",
                                 line_no);
    }
    if (!record.contains("arrival_s") || !record["arrival_s"].is_number() ||
        record["arrival_s"].get<double>() < 0.0) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": arrival_s must be a non-negative number",
                                 line_no);
    }
    rec.arrival_s = record["arrival_s"].get<double>();
    rec.num_levels = record.value("num_levels", 2);
    if (rec.num_levels < 2) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": num_levels must be at least 2",
                                 line_no);
    }
    if (!record.contains("level") || !record["level"].is_number_integer()) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": missing integer level",
                                 line_no);
    }
    rec.level = record["level"].get<int>();
    if (rec.level < 0 || rec.level >= rec.num_levels) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": level out of range",
                                 line_no);
    }
    if (!record.contains("score") || !record["score"].is_number()) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": missing score",
                                 line_no);
    }
    rec.score = record["score"].get<double>();
    if (!(rec.score >= 0.0 && rec.score <= 1.0)) {
      throw MalformedRecordError(path.string() + ": line " + std::to_string(line_no) +
                                     ": score out of [0,1]",
                                 line_no);
    }
    rec.c_json = require_cost(record, "c_json", line_no);
    rec.c_roi = require_cost(record, "c_roi", line_no);
    rec.c_box = require_cost(record, "c_box", line_no);

    const PriorityOutput output{rec.level, rec.score, rec.num_levels};
    if (!validate_priority(output, options.gamma)) {
      if (options.strict_bands) {
        throw BandViolationError(path.string() + ": line " + std::to_string(line_no) +
                                     ": score outside its level band",
                                 line_no);
      }
      const double clamped =
          clamp_score_to_band(rec.level, rec.num_levels, options.gamma, rec.score);
      warn(options.warnings, path.string() + ": line " + std::to_string(line_no) +
                                 ": score " + std::to_string(rec.score) +
                                 " outside level band; clamped to " + std::to_string(clamped));
      rec.score = clamped;
    }
    records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
    return a.event_id < b.event_id;
  });
  return records;
}

std::vector<Event> load_events(const std::filesystem::path& path, const EventLoadOptions& options) {
  std::vector<Event> events;
  for (const EventRecord& rec : load_event_records(path, options)) {
    events.push_back(to_event(rec, options.beta));
  }
  return events;
}

void save_event_records(std::span<const EventRecord> records, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (const EventRecord& rec : records) {
    nlohmann::json record{
        {"event_id", rec.event_id}, {"arrival_s", rec.arrival_s},   {"level", rec.level},
        {"score", rec.score},       {"num_levels", rec.num_levels}, {"c_json", rec.c_json},
        {"c_roi", rec.c_roi},       {"c_box", rec.c_box},
    };
    out << record.dump() << '\n';
  }
  if (!out) throw TraceIoError("write failed: " + path.string());
}

std::vector<FrameDetections> load_detection_trace(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<FrameDetections> frames;
  std::string line;
  std::size_t line_no = 0;
  double last_timestamp = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(row, nullptr, false);
    const auto fail = [&](const std::string& what) -> MalformedRecordError {
      return MalformedRecordError(
          path.string() + ": line " + std::to_string(line_no) + ": " + what, line_no);
    };
    if (record.is_discarded() || !record.is_object()) throw fail("not a JSON object");
    FrameDetections frame;
    if (!record.contains("frame_id") || !record["frame_id"].is_string()) {
      throw fail("missing frame_id");
    }
    frame.frame_id = record["frame_id"].get<std::string>();
    if (!record.contains("timestamp_s") || !record["timestamp_s"].is_number()) {
      throw fail("missing timestamp_s");
    }
    frame.timestamp_s = record["timestamp_s"].get<double>();
    if (frame.timestamp_s < last_timestamp) {
      throw fail("timestamps must be non-decreasing");
    }
    last_timestamp = frame.timestamp_s;
    if (!record.contains("detections") || !record["detections"].is_array()) {
      throw fail("missing detections array");
    }
    for (const nlohmann::json& d : record["detections"]) {
      Detection det;
      if (!d.is_object() || !d.contains("bbox") || !d["bbox"].is_array() ||
          d["bbox"].size() != 4 || !d.contains("class") || !d["class"].is_string() ||
          !d.contains("conf") || !d["conf"].is_number() || !d.contains("size_bytes") ||
          !d["size_bytes"].is_number_integer()) {
        throw fail("malformed detection");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        if (!d["bbox"][i].is_number()) throw fail("malformed bbox");
        det.bbox[i] = d["bbox"][i].get<double>();
      }
      if (!(det.bbox[0] >= 0.0 && det.bbox[0] < det.bbox[2] && det.bbox[2] <= 1.0 &&
            det.bbox[1] >= 0.0 && det.bbox[1] < det.bbox[3] && det.bbox[3] <= 1.0)) {
        throw fail("bbox coordinates out of order or range");
      }
      det.class_label = d["class"].get<std::string>();
      det.confidence = d["conf"].get<double>();
      if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
        throw fail("confidence out of [0,1]");
      }
      const auto size = d["size_bytes"].get<std::int64_t>();
      if (size < 0) throw fail("negative size_bytes");
      det.size_bytes = static_cast<std::uint64_t>(size);
      frame.detections.push_back(std::move(det));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

nlohmann::json report_to_json(const MetricsReport& report, const SimulationConfig& config) {
  nlohmann::json summary;
  if (report.w_alarm_s) summary["w_alarm_s"] = *report.w_alarm_s;
  if (report.w_alarm_weighted_sum) summary["w_alarm_weighted_sum"] = *report.w_alarm_weighted_sum;
  if (!report.vtr.empty()) {
    nlohmann::json vtr = nlohmann::json::array();
    for (const auto& [deadline, fraction] : report.vtr) {
      vtr.push_back({{"deadline_s", deadline}, {"fraction", fraction}});
    }
    summary["vtr"] = std::move(vtr);
  }
  if (report.avg_visual_delay_s) summary["avg_visual_delay_s"] = *report.avg_visual_delay_s;
  summary["counts"] = {
      {"events", report.events},
      {"alarms_delivered", report.alarms_delivered},
      {"visuals_delivered", report.visuals_delivered},
      {"visuals_expired", report.visuals_expired},
      {"starved", report.starved},
  };
  summary["config"] = {
      {"policy", to_string(config.policy)},
      {"interval_s", config.interval_s},
      {"d_vis", config.d_vis},
      {"beta", config.beta},
      {"gamma", config.gamma},
      {"scale", config.bandwidth_scale},
      {"t_parse_s", config.t_parse_s},
      {"seed", config.seed},
  };
  return summary;
}

MetricsReport report_from_json(const nlohmann::json& summary) {
  MetricsReport report;
  if (summary.contains("w_alarm_s")) report.w_alarm_s = summary["w_alarm_s"].get<double>();
  if (summary.contains("w_alarm_weighted_sum")) {
    report.w_alarm_weighted_sum = summary["w_alarm_weighted_sum"].get<double>();
  }
  if (summary.contains("vtr")) {
    for (const nlohmann::json& row : summary["vtr"]) {
      report.vtr[row["deadline_s"].get<double>()] = row["fraction"].get<double>();
    }
  }
  if (summary.contains("avg_visual_delay_s")) {
    report.avg_visual_delay_s = summary["avg_visual_delay_s"].get<double>();
  }
  const nlohmann::json& counts = summary.at("counts");
  report.events = counts.at("events").get<std::uint64_t>();
  report.alarms_delivered = counts.at("alarms_delivered").get<std::uint64_t>();
  report.visuals_delivered = counts.at("visuals_delivered").get<std::uint64_t>();
  report.visuals_expired = counts.at("visuals_expired").get<std::uint64_t>();
  report.starved = counts.at("starved").get<std::uint64_t>();
  return report;
}

void emit_results(const DeliveryLedger& ledger, const MetricsReport& report,
                  const SimulationConfig& config, const std::filesystem::path& path,
                  ResultsFormat format) {
  std::ofstream out = open_output(path);
  if (format == ResultsFormat::Summary) {
    out << report_to_json(report, config).dump(2) << '\n';
  } else {
    out << "event_id,priority,arrival_s,alarm_s,visual_s,visual_kind,expired,starved\n";
    for (const LedgerEntry& entry : ledger.entries) {
      out << entry.event_id << ',' << entry.priority << ',' << entry.arrival_s << ',';
      if (entry.alarm_wallclock_s) out << *entry.alarm_wallclock_s;
      out << ',';
      if (entry.visual_wallclock_s) out << *entry.visual_wallclock_s;
      out << ',';
      if (entry.visual_kind) out << to_string(*entry.visual_kind);
      out << ',' << (entry.expired_visual ? 1 : 0) << ',' << (entry.starved ? 1 : 0) << '\n';
    }
  }
  if (!out) throw TraceIoError("write failed: " + path.string());
}

}  // namespace dat
