#pragma once

// Two-stage greedy transmission scheduler for one interval.
//
// Stage 1 drains structured alerts in descending priority-per-byte order
// (S_i / c_json). Stage 2 spends the residual budget on at most one visual
// unit per event (the cheaper of ROI and box), in descending S_i / c_vis
// order, subject to the visual validity deadline. Budget arithmetic is exact
// integer; times are derived from byte prefix sums only for reporting and for
// the deadline check, so feasibility never depends on accumulated float
// error. Score comparisons are exact cross-multiplications (no division),
// with ties broken by higher priority, then lexicographic event id.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dat/types.hpp"

namespace dat {

// floor(bytes_per_s * interval_s); throws on non-positive inputs.
std::uint64_t interval_budget(std::uint64_t bytes_per_s, double interval_s);

// Total alert bytes over a pending set.
std::uint64_t json_load(std::span<const Event> events);

// Deadline test shared by the greedy stage 2, the oracle and the auditors:
// prefix_bytes / bandwidth <= d_vis.
bool meets_visual_deadline(std::uint64_t prefix_bytes, std::uint64_t bandwidth, double d_vis);

// Sign of s_a/c_a - s_b/c_b for positive costs, evaluated exactly.
int compare_score(double s_a, std::uint64_t c_a, double s_b, std::uint64_t c_b);

Schedule schedule_interval(const IntervalContext& ctx);

// Completion time of each unit in schedule order: prefix bytes / bandwidth.
std::vector<double> completion_times(const Schedule& schedule, std::uint64_t bandwidth);

// Alert latency = transmission completion plus cloud-side parse overhead.
double alarm_delay(double t_tx_json_s, double t_parse_s);

enum class ViolationKind {
  Hierarchy,       // visual selected without the event's alert
  NonRedundancy,   // both roi and box selected
  BudgetExceeded,  // selected bytes exceed the interval budget
  OrderMismatch,   // transmission sequence inconsistent with selections
  SizeMismatch,    // unit size differs from the owning event's cost
  UnknownEvent,    // unit references an event absent from the instance
  DeadlineExceeded // visual unit completes after d_vis
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string event_id;
  std::string detail;
};

// Structural audit: hierarchy, non-redundancy, budget, sequence/selection
// consistency and size agreement. Empty result means the schedule is valid.
std::vector<Violation> check_constraints(const Schedule& schedule, std::span<const Event> events,
                                         std::uint64_t budget);

// Deadline audit over the visual units of a schedule.
std::vector<Violation> check_visual_deadline(const Schedule& schedule, std::uint64_t bandwidth,
                                             double d_vis);

}  // namespace dat
