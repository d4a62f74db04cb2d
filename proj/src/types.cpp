#include "dat/types.hpp"

#include <cmath>

#include "dat/scheduler.hpp"

namespace dat {

const char* to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Json: return "json";
    case UnitKind::Roi: return "roi";
    case UnitKind::Box: return "box";
  }
  return "?";
}

std::optional<UnitKind> parse_unit_kind(std::string_view name) {
  if (name == "json") return UnitKind::Json;
  if (name == "roi") return UnitKind::Roi;
  if (name == "box") return UnitKind::Box;
  return std::nullopt;
}

IntervalContext make_interval_context(std::uint64_t bandwidth, double interval_s, double d_vis,
                                      std::vector<Event> pending,
                                      std::vector<VisualPendingEntry> visual_pending) {
  if (d_vis <= 0.0) throw std::invalid_argument("make_interval_context: d_vis must be positive");
  IntervalContext ctx;
  ctx.bandwidth = bandwidth;
  ctx.interval_s = interval_s;
  ctx.budget = interval_budget(bandwidth, interval_s);
  ctx.d_vis = d_vis;
  ctx.pending = std::move(pending);
  ctx.visual_pending = std::move(visual_pending);
  return ctx;
}

const char* to_string(PolicyId policy) {
  switch (policy) {
    case PolicyId::FixedBox: return "fixed-box";
    case PolicyId::FixedRoi: return "fixed-roi";
    case PolicyId::FixedJsonBox: return "fixed-json-box";
    case PolicyId::BandwidthOnly: return "bandwidth-only";
    case PolicyId::PriorityOnly: return "priority-only";
    case PolicyId::JsonOnly: return "json-only";
    case PolicyId::Dat: return "dat";
  }
  return "?";
}

std::optional<PolicyId> parse_policy(std::string_view name) {
  for (PolicyId p : all_policies()) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

const std::vector<PolicyId>& all_policies() {
  static const std::vector<PolicyId> kAll = {
      PolicyId::FixedBox,    PolicyId::FixedRoi,     PolicyId::FixedJsonBox,
      PolicyId::BandwidthOnly, PolicyId::PriorityOnly, PolicyId::JsonOnly,
      PolicyId::Dat,
  };
  return kAll;
}

}  // namespace dat
