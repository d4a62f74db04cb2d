#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dat/traceio.hpp"

using namespace dat;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("datio-" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  fs::path file(const std::string& name) const { return path / name; }
};

fs::path write_file(const TempDir& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir.file(name);
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("bandwidth csv parses, clamps, and reports positioned errors") {
  TempDir dir;
  const fs::path ok = write_file(dir, "ok.csv", "t_sec,bytes_per_sec\n0,100000\n1,50000\n");
  const BandwidthTrace trace = load_bandwidth_csv(ok);
  REQUIRE(trace.samples.size() == 2);
  CHECK(trace.samples[0].bytes_per_s == 100000);
  CHECK(trace.samples[1].bytes_per_s == 50000);

  std::vector<std::string> warnings;
  const fs::path zero = write_file(dir, "zero.csv", "t_sec,bytes_per_sec\n0,0\n");
  const BandwidthTrace clamped = load_bandwidth_csv(zero, 1.0, BandwidthUnits::BytesPerSecond,
                                                    &warnings);
  CHECK(clamped.samples[0].bytes_per_s == 1);
  CHECK(warnings.size() == 1);

  const fs::path empty = write_file(dir, "empty.csv", "");
  CHECK_THROWS_AS(load_bandwidth_csv(empty), EmptyTraceError);
  const fs::path header_only = write_file(dir, "h.csv", "t_sec,bytes_per_sec\n");
  CHECK_THROWS_AS(load_bandwidth_csv(header_only), EmptyTraceError);

  const fs::path bad = write_file(dir, "bad.csv", "t_sec,bytes_per_sec\n0,100\nnope\n");
  try {
    load_bandwidth_csv(bad);
    FAIL("expected MalformedRowError");
  } catch (const MalformedRowError& e) {
    CHECK(e.line() == 3);
  }

  const fs::path back = write_file(dir, "back.csv", "t_sec,bytes_per_sec\n1,100\n0,100\n");
  CHECK_THROWS_AS(load_bandwidth_csv(back), MalformedRowError);
}

TEST_CASE("kilobit traces convert to bytes on load") {
  TempDir dir;
  const fs::path p = write_file(dir, "kbps.csv", "t_sec,bytes_per_sec\n0,1000\n1,8\n");
  const BandwidthTrace trace = load_bandwidth_csv(p, 1.0, BandwidthUnits::KilobitsPerSecond);
  CHECK(trace.samples[0].bytes_per_s == 125000);
  CHECK(trace.samples[1].bytes_per_s == 1000);
}

TEST_CASE("non-uniform samples are mean-pooled onto the scheduling period") {
  TempDir dir;
  const fs::path p = write_file(dir, "nu.csv",
                                "t_sec,bytes_per_sec\n0,100\n0.25,300\n1.0,500\n3.0,700\n");
  std::vector<std::string> warnings;
  const BandwidthTrace trace =
      load_bandwidth_csv(p, 1.0, BandwidthUnits::BytesPerSecond, &warnings);
  REQUIRE(trace.samples.size() == 4);
  CHECK(trace.samples[0].bytes_per_s == 200);  // mean of 100 and 300
  CHECK(trace.samples[1].bytes_per_s == 500);
  CHECK(trace.samples[2].bytes_per_s == 500);  // empty bin holds the last value
  CHECK(trace.samples[3].bytes_per_s == 700);
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("event records load, validate, and sort") {
  TempDir dir;
  const std::string body =
      R"({"event_id":"b","arrival_s":5.0,"level":1,"score":0.9,"c_json":2048,"c_roi":61440,"c_box":153600})"
      "\n"
      R"({"event_id":"a","arrival_s":1.0,"level":0,"score":0.2,"c_json":1000,"c_roi":50000,"c_box":90000})"
      "\n";
  const fs::path p = write_file(dir, "events.jsonl", body);
  const std::vector<Event> events = load_events(p);
  REQUIRE(events.size() == 2);
  CHECK(events[0].id == "a");  // sorted by arrival
  CHECK(events[1].id == "b");
  CHECK(events[1].priority == doctest::Approx(0.95));  // 0.5*1 + 0.5*0.9
  CHECK(events[0].priority == doctest::Approx(0.10));
}

TEST_CASE("malformed event records are rejected with their line number") {
  TempDir dir;
  const auto expect_malformed = [&](const std::string& name, const std::string& line) {
    const fs::path p = write_file(dir, name, line + "\n");
    CHECK_THROWS_AS(load_event_records(p), MalformedRecordError);
  };
  expect_malformed("score.jsonl",
                   R"({"event_id":"x","arrival_s":0,"level":1,"score":1.2,"c_json":1,"c_roi":1,"c_box":1})");
  expect_malformed("cost.jsonl",
                   R"({"event_id":"x","arrival_s":0,"level":1,"score":0.9,"c_json":0,"c_roi":1,"c_box":1})");
  expect_malformed("level.jsonl",
                   R"({"event_id":"x","arrival_s":0,"level":7,"score":0.9,"c_json":1,"c_roi":1,"c_box":1})");
  expect_malformed("json.jsonl", "not json at all");

  const std::string dup =
      R"({"event_id":"x","arrival_s":0,"level":1,"score":0.9,"c_json":1,"c_roi":1,"c_box":1})"
      "\n"
      R"({"event_id":"x","arrival_s":1,"level":1,"score":0.9,"c_json":1,"c_roi":1,"c_box":1})"
      "\n";
  const fs::path p = write_file(dir, "dup.jsonl", dup);
  try {
    load_event_records(p);
    FAIL("expected MalformedRecordError");
  } catch (const MalformedRecordError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("band violations clamp by default and reject in strict mode") {
  TempDir dir;
  const std::string body =
      R"({"event_id":"x","arrival_s":0,"level":0,"score":0.9,"c_json":1,"c_roi":1,"c_box":1})"
      "\n";
  const fs::path p = write_file(dir, "band.jsonl", body);

  std::vector<std::string> warnings;
  EventLoadOptions lenient;
  lenient.warnings = &warnings;
  const std::vector<EventRecord> records = load_event_records(p, lenient);
  REQUIRE(records.size() == 1);
  CHECK(records[0].score < 0.5);
  CHECK(warnings.size() == 1);

  EventLoadOptions strict;
  strict.strict_bands = true;
  CHECK_THROWS_AS(load_event_records(p, strict), BandViolationError);
}

TEST_CASE("event records round-trip through save and load") {
  TempDir dir;
  const std::vector<EventRecord> records = gen_event_records(ArrivalPattern::Burst, 20.0, 5);
  const fs::path p = dir.file("roundtrip.jsonl");
  save_event_records(records, p);
  const std::vector<EventRecord> reloaded = load_event_records(p);
  REQUIRE(reloaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(reloaded[i].event_id == records[i].event_id);
    CHECK(reloaded[i].arrival_s == records[i].arrival_s);
    CHECK(reloaded[i].level == records[i].level);
    CHECK(reloaded[i].score == records[i].score);
    CHECK(reloaded[i].c_json == records[i].c_json);
    CHECK(reloaded[i].c_roi == records[i].c_roi);
    CHECK(reloaded[i].c_box == records[i].c_box);
  }
}

TEST_CASE("detection traces parse and enforce frame invariants") {
  TempDir dir;
  const std::string body =
      R"({"frame_id":"f1","timestamp_s":0.0,"detections":[{"bbox":[0.1,0.1,0.5,0.5],"class":"severe","conf":0.9,"size_bytes":30000}]})"
      "\n"
      R"({"frame_id":"f2","timestamp_s":0.5,"detections":[]})"
      "\n";
  const fs::path p = write_file(dir, "det.jsonl", body);
  const std::vector<FrameDetections> frames = load_detection_trace(p);
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].detections.size() == 1);
  CHECK(frames[0].detections[0].class_label == "severe");
  CHECK(frames[1].detections.empty());

  const std::string bad_bbox =
      R"({"frame_id":"f1","timestamp_s":0.0,"detections":[{"bbox":[0.5,0.1,0.1,0.5],"class":"x","conf":0.9,"size_bytes":1}]})";
  CHECK_THROWS_AS(load_detection_trace(write_file(dir, "bb.jsonl", bad_bbox + "\n")),
                  MalformedRecordError);

  const std::string backwards =
      R"({"frame_id":"f1","timestamp_s":1.0,"detections":[]})"
      "\n"
      R"({"frame_id":"f2","timestamp_s":0.5,"detections":[]})"
      "\n";
  CHECK_THROWS_AS(load_detection_trace(write_file(dir, "ts.jsonl", backwards)),
                  MalformedRecordError);
}

TEST_CASE("summaries round-trip and omit absent metrics") {
  TempDir dir;
  std::vector<Event> events = gen_events(ArrivalPattern::Medium, 20.0, 3);
  BandwidthTrace trace;
  for (int i = 0; i < 8; ++i) trace.samples.push_back({static_cast<double>(i), 500000});

  SimulationConfig config;
  config.policy = PolicyId::JsonOnly;
  const SimulationResult result = run(trace, events, config);

  const nlohmann::json summary = report_to_json(result.report, config);
  CHECK_FALSE(summary.contains("avg_visual_delay_s"));
  for (const auto& row : summary.at("vtr")) CHECK(row.at("fraction").get<double>() == 0.0);
  CHECK(summary.at("config").at("policy") == "json-only");

  const MetricsReport reparsed = report_from_json(summary);
  CHECK(reparsed.w_alarm_s == result.report.w_alarm_s);
  CHECK(reparsed.vtr == result.report.vtr);
  CHECK(reparsed.avg_visual_delay_s == result.report.avg_visual_delay_s);
  CHECK(reparsed.events == result.report.events);
  CHECK(reparsed.visuals_delivered == result.report.visuals_delivered);

  const fs::path per_event = dir.file("per_event.csv");
  emit_results(result.ledger, result.report, config, per_event, ResultsFormat::PerEvent);
  std::ifstream in(per_event);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == result.report.events + 1);  // header + one row per event
}
