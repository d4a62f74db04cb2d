#pragma once

// On-disk formats:
//   bandwidth trace  CSV, header "t_sec,bytes_per_sec"
//   event trace      UTF-8 line-delimited JSON records
//   detection trace  UTF-8 line-delimited JSON records
//   results          single JSON object (summary) or CSV (per event)
//
// Loaders either parse fully or raise a positioned error; rows are never
// silently dropped.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dat/gating.hpp"
#include "dat/simulator.hpp"
#include "dat/types.hpp"

#include <json.hpp>

namespace dat {

class TraceIoError : public std::runtime_error {
 public:
  TraceIoError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MalformedRowError : public TraceIoError {
 public:
  using TraceIoError::TraceIoError;
};

class EmptyTraceError : public TraceIoError {
 public:
  using TraceIoError::TraceIoError;
};

class MalformedRecordError : public TraceIoError {
 public:
  using TraceIoError::TraceIoError;
};

class BandViolationError : public TraceIoError {
 public:
  using TraceIoError::TraceIoError;
};

enum class BandwidthUnits { BytesPerSecond, KilobitsPerSecond };

// Parses the CSV, clamps non-positive rows to 1 byte/s with a warning, and
// mean-pools onto the scheduling period when sample spacing is non-uniform.
BandwidthTrace load_bandwidth_csv(const std::filesystem::path& path, double period_s = 1.0,
                                  BandwidthUnits units = BandwidthUnits::BytesPerSecond,
                                  std::vector<std::string>* warnings = nullptr);

void save_bandwidth_csv(const BandwidthTrace& trace, const std::filesystem::path& path);

struct EventLoadOptions {
  double beta = 0.5;
  double gamma = 0.5;
  bool strict_bands = false;  // reject instead of clamping out-of-band scores
  std::vector<std::string>* warnings = nullptr;
};

std::vector<EventRecord> load_event_records(const std::filesystem::path& path,
                                            const EventLoadOptions& options = {});
std::vector<Event> load_events(const std::filesystem::path& path,
                               const EventLoadOptions& options = {});
void save_event_records(std::span<const EventRecord> records, const std::filesystem::path& path);

std::vector<FrameDetections> load_detection_trace(const std::filesystem::path& path);

enum class ResultsFormat { Summary, PerEvent };

nlohmann::json report_to_json(const MetricsReport& report, const SimulationConfig& config);
MetricsReport report_from_json(const nlohmann::json& summary);

void emit_results(const DeliveryLedger& ledger, const MetricsReport& report,
                  const SimulationConfig& config, const std::filesystem::path& path,
                  ResultsFormat format);

}  // namespace dat
