#include "dat/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dat/scheduler.hpp"

namespace dat {

namespace {

// Pending events arrive already in (arrival, id) order; arrival order == input order.
std::vector<std::uint32_t> input_order(std::size_t n) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  return order;
}

std::vector<std::uint32_t> priority_order(const std::vector<Event>& events) {
  std::vector<std::uint32_t> order = input_order(events.size());
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (events[a].priority != events[b].priority) return events[a].priority > events[b].priority;
    return events[a].id < events[b].id;
  });
  return order;
}

// Appends the unit to the sequence and marks it in the given selection entry.
void select_unit(Schedule& schedule, const std::string& id, UnitKind kind, std::uint64_t size,
                 std::uint64_t& remaining, std::uint64_t& used, Selection& sel) {
  remaining -= size;
  used += size;
  schedule.order.push_back({id, kind, size});
  switch (kind) {
    case UnitKind::Json: sel.json = true; break;
    case UnitKind::Roi: sel.roi = true; break;
    case UnitKind::Box: sel.box = true; break;
  }
}

// Single-unit-per-event policies (fixed-box / fixed-roi).
Schedule fixed_single_unit(const IntervalContext& ctx, UnitKind kind) {
  Schedule schedule;
  std::uint64_t remaining = ctx.budget;
  std::uint64_t used = 0;
  for (const Event& e : ctx.pending) {
    const std::uint64_t size = e.cost(kind);
    if (size > remaining) continue;
    select_unit(schedule, e.id, kind, size, remaining, used, schedule.selections.append(e.id));
  }
  schedule.used_bytes = used;
  schedule.t_end = static_cast<double>(used) / static_cast<double>(ctx.bandwidth);
  return schedule;
}

Schedule fixed_json_box(const IntervalContext& ctx) {
  Schedule schedule;
  std::uint64_t remaining = ctx.budget;
  std::uint64_t used = 0;
  for (const Event& e : ctx.pending) {
    const std::uint64_t pair = e.c_json + e.c_box;
    if (pair > remaining) continue;
    Selection& sel = schedule.selections.append(e.id);
    select_unit(schedule, e.id, UnitKind::Json, e.c_json, remaining, used, sel);
    select_unit(schedule, e.id, UnitKind::Box, e.c_box, remaining, used, sel);
  }
  schedule.used_bytes = used;
  schedule.t_end = static_cast<double>(used) / static_cast<double>(ctx.bandwidth);
  return schedule;
}

struct VisualCandidate {
  const std::string* event_id;
  double priority;
  double arrival_s;
  std::uint64_t cost;
  UnitKind kind;
  std::uint32_t selection_pos;  // stage-one entry, or kCarried
};

constexpr std::uint32_t kCarried = ~0u;

// Alerts first, then cheapest visual per event, both stages in the supplied
// order, with no validity-deadline check.
Schedule two_stage_no_deadline(const IntervalContext& ctx, bool by_priority) {
  Schedule schedule;
  std::uint64_t remaining = ctx.budget;
  std::uint64_t used = 0;

  const std::vector<std::uint32_t> order =
      by_priority ? priority_order(ctx.pending) : input_order(ctx.pending.size());
  std::vector<std::uint32_t> selected;
  std::vector<std::uint32_t> selection_pos;
  selected.reserve(ctx.pending.size());
  selection_pos.reserve(ctx.pending.size());
  for (std::uint32_t idx : order) {
    const Event& e = ctx.pending[idx];
    if (e.c_json > remaining) continue;
    selection_pos.push_back(static_cast<std::uint32_t>(schedule.selections.size()));
    select_unit(schedule, e.id, UnitKind::Json, e.c_json, remaining, used,
                schedule.selections.append(e.id));
    selected.push_back(idx);
  }

  std::vector<VisualCandidate> candidates;
  candidates.reserve(selected.size() + ctx.visual_pending.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const Event& e = ctx.pending[selected[i]];
    candidates.push_back(
        {&e.id, e.priority, e.arrival_s, e.visual_cost(), e.visual_kind(), selection_pos[i]});
  }
  for (const VisualPendingEntry& entry : ctx.visual_pending) {
    candidates.push_back({&entry.event_id, entry.priority, entry.arrival_s, entry.visual_cost(),
                          entry.visual_kind(), kCarried});
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const VisualCandidate& a, const VisualCandidate& b) {
              if (by_priority) {
                if (a.priority != b.priority) return a.priority > b.priority;
              } else {
                if (a.arrival_s != b.arrival_s) return a.arrival_s < b.arrival_s;
              }
              return *a.event_id < *b.event_id;
            });
  for (const VisualCandidate& cand : candidates) {
    if (cand.cost > remaining) continue;
    Selection& sel = cand.selection_pos == kCarried
                         ? schedule.selections.append(*cand.event_id)
                         : schedule.selections[cand.selection_pos];
    select_unit(schedule, *cand.event_id, cand.kind, cand.cost, remaining, used, sel);
    if (cand.selection_pos == kCarried) schedule.carried_visual.insert(*cand.event_id);
  }

  schedule.used_bytes = used;
  schedule.t_end = static_cast<double>(used) / static_cast<double>(ctx.bandwidth);
  return schedule;
}

Schedule json_only(const IntervalContext& ctx, const BaselineOptions& options) {
  if (!options.json_only_priority_order) {
    // Same semantic stage as the adaptive scheduler; no visual stage.
    IntervalContext no_visual = ctx;
    no_visual.visual_stage = false;
    no_visual.visual_pending.clear();
    return schedule_interval(no_visual);
  }
  Schedule schedule;
  std::uint64_t remaining = ctx.budget;
  std::uint64_t used = 0;
  for (std::uint32_t idx : priority_order(ctx.pending)) {
    const Event& e = ctx.pending[idx];
    if (e.c_json > remaining) continue;
    select_unit(schedule, e.id, UnitKind::Json, e.c_json, remaining, used,
                schedule.selections.append(e.id));
  }
  schedule.used_bytes = used;
  schedule.t_end = static_cast<double>(used) / static_cast<double>(ctx.bandwidth);
  return schedule;
}

}  // namespace

Schedule policy_schedule(PolicyId policy, const IntervalContext& ctx,
                         const BaselineOptions& options) {
  if (ctx.bandwidth == 0) throw std::invalid_argument("policy_schedule: bandwidth must be positive");
  switch (policy) {
    case PolicyId::FixedBox: return fixed_single_unit(ctx, UnitKind::Box);
    case PolicyId::FixedRoi: return fixed_single_unit(ctx, UnitKind::Roi);
    case PolicyId::FixedJsonBox: return fixed_json_box(ctx);
    case PolicyId::BandwidthOnly: return two_stage_no_deadline(ctx, /*by_priority=*/false);
    case PolicyId::PriorityOnly: return two_stage_no_deadline(ctx, /*by_priority=*/true);
    case PolicyId::JsonOnly: return json_only(ctx, options);
    case PolicyId::Dat: return schedule_interval(ctx);
  }
  throw std::invalid_argument("policy_schedule: unknown policy");
}

std::uint64_t policy_required_bytes(PolicyId policy, const Event& event) {
  switch (policy) {
    case PolicyId::FixedBox: return event.c_box;
    case PolicyId::FixedRoi: return event.c_roi;
    case PolicyId::FixedJsonBox: return event.c_json + event.c_box;
    default: return event.c_json;
  }
}

bool policy_retries_visual(PolicyId policy) {
  return policy == PolicyId::Dat || policy == PolicyId::BandwidthOnly ||
         policy == PolicyId::PriorityOnly;
}

bool policy_alert_is_visual(PolicyId policy) {
  return policy == PolicyId::FixedBox || policy == PolicyId::FixedRoi;
}

}  // namespace dat
