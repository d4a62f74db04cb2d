#include "dat/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dat/exactfp.hpp"

namespace dat {

std::uint64_t interval_budget(std::uint64_t bytes_per_s, double interval_s) {
  if (bytes_per_s == 0) throw std::invalid_argument("interval_budget: bandwidth must be positive");
  if (!(interval_s > 0.0)) throw std::invalid_argument("interval_budget: interval must be positive");
  const double budget = std::floor(static_cast<double>(bytes_per_s) * interval_s);
  return budget <= 0.0 ? 0 : static_cast<std::uint64_t>(budget);
}

std::uint64_t json_load(std::span<const Event> events) {
  std::uint64_t total = 0;
  for (const Event& e : events) total += e.c_json;
  return total;
}

bool meets_visual_deadline(std::uint64_t prefix_bytes, std::uint64_t bandwidth, double d_vis) {
  return static_cast<double>(prefix_bytes) / static_cast<double>(bandwidth) <= d_vis;
}

int compare_score(double s_a, std::uint64_t c_a, double s_b, std::uint64_t c_b) {
  return exactfp::compare_ratio(s_a, static_cast<double>(c_a), s_b, static_cast<double>(c_b));
}

namespace {

// Candidate for the visual stage; fresh candidates are events whose alert was
// selected this interval (selection_pos indexes their stage-one entry),
// carried candidates come from visual_pending.
struct VisualCandidate {
  const std::string* event_id;
  double priority;
  std::uint64_t cost;
  UnitKind kind;
  std::uint32_t selection_pos;
};

}  // namespace

Schedule schedule_interval(const IntervalContext& ctx) {
  Schedule schedule;
  if (ctx.bandwidth == 0) throw std::invalid_argument("schedule_interval: bandwidth must be positive");

  const std::uint64_t bandwidth = ctx.bandwidth;
  std::uint64_t remaining = ctx.budget;
  std::uint64_t used = 0;

  // Stage 1: alerts by descending priority per byte. Sorting compact keys
  // instead of the events themselves keeps the comparator cache-resident.
  struct AlertKey {
    double priority;
    std::uint64_t cost;
    std::uint32_t idx;
  };
  std::vector<AlertKey> order;
  order.reserve(ctx.pending.size());
  for (std::uint32_t i = 0; i < ctx.pending.size(); ++i) {
    order.push_back({ctx.pending[i].priority, ctx.pending[i].c_json, i});
  }
  std::sort(order.begin(), order.end(), [&](const AlertKey& a, const AlertKey& b) {
    const int cmp = compare_score(a.priority, a.cost, b.priority, b.cost);
    if (cmp != 0) return cmp > 0;
    if (a.priority != b.priority) return a.priority > b.priority;
    return ctx.pending[a.idx].id < ctx.pending[b.idx].id;
  });

  // Budget walk over the sorted keys first; the schedule itself is emitted in
  // a sequential pass over the pending array afterwards.
  constexpr std::uint32_t kSkipped = ~0u;
  std::vector<std::uint32_t> alert_rank(ctx.pending.size(), kSkipped);
  std::uint32_t selected_count = 0;
  for (const AlertKey& key : order) {
    if (key.cost > remaining) continue;  // skipped events stay pending
    remaining -= key.cost;
    used += key.cost;
    alert_rank[key.idx] = selected_count++;
  }

  schedule.order.resize(selected_count);
  schedule.selections.reserve(selected_count + ctx.visual_pending.size());
  std::vector<std::uint32_t> selected_events;
  std::vector<std::uint32_t> selection_pos(ctx.pending.size(), kSkipped);
  selected_events.reserve(selected_count);
  for (std::uint32_t i = 0; i < ctx.pending.size(); ++i) {
    if (alert_rank[i] == kSkipped) continue;
    const Event& e = ctx.pending[i];
    schedule.order[alert_rank[i]] = {e.id, UnitKind::Json, e.c_json};
    selection_pos[i] = static_cast<std::uint32_t>(schedule.selections.size());
    schedule.selections.append(e.id).json = true;
    selected_events.push_back(i);
  }

  // Stage 2: one visual unit per event while budget and deadline allow.
  if (ctx.visual_stage) {
    std::vector<VisualCandidate> candidates;
    candidates.reserve(selected_events.size() + ctx.visual_pending.size());
    for (std::uint32_t idx : selected_events) {
      const Event& e = ctx.pending[idx];
      candidates.push_back({&e.id, e.priority, e.visual_cost(), e.visual_kind(), selection_pos[idx]});
    }
    constexpr std::uint32_t kCarried = ~0u;
    for (const VisualPendingEntry& entry : ctx.visual_pending) {
      candidates.push_back(
          {&entry.event_id, entry.priority, entry.visual_cost(), entry.visual_kind(), kCarried});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const VisualCandidate& a, const VisualCandidate& b) {
                const int cmp = compare_score(a.priority, a.cost, b.priority, b.cost);
                if (cmp != 0) return cmp > 0;
                if (a.priority != b.priority) return a.priority > b.priority;
                return *a.event_id < *b.event_id;
              });
    for (const VisualCandidate& cand : candidates) {
      if (cand.cost > remaining) continue;
      if (!meets_visual_deadline(used + cand.cost, bandwidth, ctx.d_vis)) continue;
      remaining -= cand.cost;
      used += cand.cost;
      schedule.order.push_back({*cand.event_id, cand.kind, cand.cost});
      Selection& sel = cand.selection_pos == kCarried
                           ? schedule.selections.append(*cand.event_id)
                           : schedule.selections[cand.selection_pos];
      if (cand.kind == UnitKind::Roi) sel.roi = true;
      else sel.box = true;
      if (cand.selection_pos == kCarried) schedule.carried_visual.insert(*cand.event_id);
    }
  }

  schedule.used_bytes = used;
  schedule.t_end = static_cast<double>(used) / static_cast<double>(bandwidth);
  return schedule;
}

std::vector<double> completion_times(const Schedule& schedule, std::uint64_t bandwidth) {
  if (bandwidth == 0) throw std::invalid_argument("completion_times: bandwidth must be positive");
  std::vector<double> times;
  times.reserve(schedule.order.size());
  std::uint64_t prefix = 0;
  for (const TransmissionUnit& unit : schedule.order) {
    prefix += unit.size;
    times.push_back(static_cast<double>(prefix) / static_cast<double>(bandwidth));
  }
  return times;
}

double alarm_delay(double t_tx_json_s, double t_parse_s) {
  if (t_tx_json_s < 0.0 || t_parse_s < 0.0) {
    throw std::invalid_argument("alarm_delay: negative delay component");
  }
  return t_tx_json_s + t_parse_s;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Hierarchy: return "hierarchy";
    case ViolationKind::NonRedundancy: return "non-redundancy";
    case ViolationKind::BudgetExceeded: return "budget-exceeded";
    case ViolationKind::OrderMismatch: return "order-mismatch";
    case ViolationKind::SizeMismatch: return "size-mismatch";
    case ViolationKind::UnknownEvent: return "unknown-event";
    case ViolationKind::DeadlineExceeded: return "deadline-exceeded";
  }
  return "?";
}

std::vector<Violation> check_constraints(const Schedule& schedule, std::span<const Event> events,
                                         std::uint64_t budget) {
  std::vector<Violation> violations;
  std::unordered_map<std::string_view, const Event*> by_id;
  by_id.reserve(events.size());
  for (const Event& e : events) by_id.emplace(e.id, &e);

  std::unordered_map<std::string_view, Selection> selected;
  selected.reserve(schedule.selections.size());
  for (const auto& [id, sel] : schedule.selections) selected.emplace(id, sel);

  // Selection-level rules, in deterministic id order.
  std::vector<const std::string*> ids;
  ids.reserve(schedule.selections.size());
  for (const auto& [id, sel] : schedule.selections) ids.push_back(&id);
  std::sort(ids.begin(), ids.end(), [](const auto* a, const auto* b) { return *a < *b; });
  for (const std::string* id : ids) {
    const Selection& sel = selected.at(*id);
    const bool carried = schedule.carried_visual.contains(*id);
    if ((sel.roi || sel.box) && !sel.json && !carried) {
      violations.push_back({ViolationKind::Hierarchy, *id, "visual unit without alert"});
    }
    if (sel.roi && sel.box) {
      violations.push_back({ViolationKind::NonRedundancy, *id, "both roi and box selected"});
    }
    if (!by_id.contains(*id) && !carried) {
      violations.push_back({ViolationKind::UnknownEvent, *id, "selection for unknown event"});
    }
  }

  // Sequence consistency: each selected unit appears exactly once.
  std::unordered_map<std::string_view, Selection> seen;
  std::uint64_t total = 0;
  for (const TransmissionUnit& unit : schedule.order) {
    total += unit.size;
    Selection& s = seen[unit.event_id];
    bool dup = false;
    switch (unit.kind) {
      case UnitKind::Json: dup = s.json; s.json = true; break;
      case UnitKind::Roi: dup = s.roi; s.roi = true; break;
      case UnitKind::Box: dup = s.box; s.box = true; break;
    }
    if (dup) {
      violations.push_back({ViolationKind::OrderMismatch, unit.event_id, "unit transmitted twice"});
    }
    auto it = by_id.find(unit.event_id);
    if (it != by_id.end() && unit.size != it->second->cost(unit.kind)) {
      violations.push_back({ViolationKind::SizeMismatch, unit.event_id,
                            std::string("size differs from event cost for ") + to_string(unit.kind)});
    }
    const auto sel_it = selected.find(unit.event_id);
    const bool is_selected =
        sel_it != selected.end() &&
        (unit.kind == UnitKind::Json ? sel_it->second.json
                                     : (unit.kind == UnitKind::Roi ? sel_it->second.roi
                                                                   : sel_it->second.box));
    if (!is_selected) {
      violations.push_back({ViolationKind::OrderMismatch, unit.event_id,
                            "transmitted unit is not selected"});
    }
  }
  for (const std::string* id : ids) {
    const Selection& want = selected.at(*id);
    const Selection got = seen.count(*id) ? seen.at(*id) : Selection{};
    if (want.json != got.json || want.roi != got.roi || want.box != got.box) {
      violations.push_back({ViolationKind::OrderMismatch, *id,
                            "selection not matched by transmission sequence"});
    }
  }

  if (total > budget) {
    violations.push_back({ViolationKind::BudgetExceeded, "",
                          "selected " + std::to_string(total) + " of " + std::to_string(budget) +
                              " budget bytes"});
  }
  return violations;
}

std::vector<Violation> check_visual_deadline(const Schedule& schedule, std::uint64_t bandwidth,
                                             double d_vis) {
  std::vector<Violation> violations;
  std::uint64_t prefix = 0;
  for (const TransmissionUnit& unit : schedule.order) {
    prefix += unit.size;
    if (unit.kind == UnitKind::Json) continue;
    if (!meets_visual_deadline(prefix, bandwidth, d_vis)) {
      violations.push_back({ViolationKind::DeadlineExceeded, unit.event_id,
                            "visual completes after the validity deadline"});
    }
  }
  return violations;
}

}  // namespace dat
