#pragma once

// Comparison policies behind the same per-interval interface as the adaptive
// scheduler. All are budget-feasible; they differ in what they upload and in
// what order:
//
//   fixed-box       box image only, arrival order; the box carries the alert
//   fixed-roi       roi crop only, arrival order; the roi carries the alert
//   fixed-json-box  alert immediately followed by its box, paired, arrival order
//   bandwidth-only  alerts then cheapest visuals, arrival order, no deadline
//   priority-only   alerts then cheapest visuals by raw priority, no deadline
//   json-only       alerts only, priority-per-byte order (raw-priority toggle)
//   dat             the two-stage adaptive scheduler
//
// Events that do not fit stay pending for the next interval.

#include "dat/types.hpp"

namespace dat {

struct BaselineOptions {
  // Order json-only by raw priority instead of priority per byte.
  bool json_only_priority_order = false;
};

Schedule policy_schedule(PolicyId policy, const IntervalContext& ctx,
                         const BaselineOptions& options = {});

// Bytes an interval budget must reach for the policy to ever deliver the
// event's alert (used to flag events that could never be transmitted).
std::uint64_t policy_required_bytes(PolicyId policy, const Event& event);

// True for policies that re-try skipped visual units in later intervals.
bool policy_retries_visual(PolicyId policy);

// True when the policy's visual unit is also the alert carrier.
bool policy_alert_is_visual(PolicyId policy);

}  // namespace dat
