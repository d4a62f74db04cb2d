#pragma once

// Trace-driven simulation: advances interval by interval over a bandwidth
// trace, hands the pending set to a policy, records wall-clock deliveries and
// derives the transmission metrics. Also hosts the seeded synthetic workload
// generator and bandwidth-trace scaling.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dat/baselines.hpp"
#include "dat/types.hpp"

namespace dat {

enum class ArrivalPattern { Low, Medium, Burst };

const char* to_string(ArrivalPattern pattern);
std::optional<ArrivalPattern> parse_pattern(std::string_view name);

// Workload generator knobs. Arrivals are Poisson (low/medium) or Poisson
// background plus clustered epochs (burst); unit sizes are log-normal around
// the given medians; the score is drawn uniformly inside its level's band.
struct GenParams {
  double lambda_low = 0.5;    // events per second
  double lambda_medium = 2.0;
  double burst_background_lambda = 0.5;
  double burst_epoch_lambda = 0.1;  // burst clusters per second
  int burst_count_min = 5;
  int burst_count_max = 15;
  double burst_window_s = 1.0;
  double json_median_bytes = 2048;
  double json_sigma = 0.5;
  double roi_median_bytes = 61440;
  double roi_sigma = 0.6;
  double box_median_bytes = 153600;
  double box_sigma = 0.5;
  double severe_prob = 0.3;
  int num_levels = 2;
  double beta = 0.5;
  double gamma = 0.5;
};

// On-disk form of one event: the priority output is kept as (level, score)
// so the mixing weight can be chosen at load time.
struct EventRecord {
  std::string event_id;
  double arrival_s = 0.0;
  int level = 0;
  double score = 0.0;
  int num_levels = 2;
  std::uint64_t c_json = 0;
  std::uint64_t c_roi = 0;
  std::uint64_t c_box = 0;
};

Event to_event(const EventRecord& record, double beta);

std::vector<EventRecord> gen_event_records(ArrivalPattern pattern, double duration_s,
                                           std::uint64_t seed, const GenParams& params = {});
std::vector<Event> gen_events(ArrivalPattern pattern, double duration_s, std::uint64_t seed,
                              const GenParams& params = {});

// Multiplies every sample by `factor`, flooring to at least 1 byte/s.
BandwidthTrace scale_trace(const BandwidthTrace& trace, double factor);

struct SimulationConfig {
  double interval_s = 1.0;
  double d_vis = 1.5;
  double beta = 0.5;
  double gamma = 0.5;
  double bandwidth_scale = 1.0;
  double t_parse_s = 0.0;
  PolicyId policy = PolicyId::Dat;
  std::vector<double> vtr_deadlines = {0.5, 1.0};
  std::uint64_t seed = 0;
  bool visual_stage = true;         // disable to suppress stage 2 of the adaptive policy
  bool strict_trace_length = false; // error instead of wrapping a short trace
  BaselineOptions baseline;
};

struct LedgerEntry {
  std::string event_id;
  double arrival_s = 0.0;
  double priority = 0.0;
  std::optional<double> alarm_wallclock_s;
  std::optional<double> visual_wallclock_s;
  std::optional<UnitKind> visual_kind;
  bool expired_visual = false;  // carried visual dropped after aging out
  bool starved = false;         // could never fit any interval budget
};

struct DeliveryLedger {
  std::vector<LedgerEntry> entries;  // in (arrival, id) order
};

struct MetricsReport {
  std::optional<double> w_alarm_s;             // priority-weighted mean alert latency
  std::optional<double> w_alarm_weighted_sum;  // unnormalized sum, for reference
  std::map<double, double> vtr;                // deadline -> delivered-on-time fraction
  std::optional<double> avg_visual_delay_s;
  std::uint64_t events = 0;
  std::uint64_t alarms_delivered = 0;
  std::uint64_t visuals_delivered = 0;
  std::uint64_t visuals_expired = 0;
  std::uint64_t starved = 0;
};

struct SimulationResult {
  DeliveryLedger ledger;
  MetricsReport report;
  std::uint64_t intervals_run = 0;
  std::vector<std::string> diagnostics;
};

SimulationResult run(const BandwidthTrace& trace, std::vector<Event> events,
                     const SimulationConfig& config);

MetricsReport compute_metrics(const DeliveryLedger& ledger, const SimulationConfig& config);

}  // namespace dat
