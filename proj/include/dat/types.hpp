#pragma once

// Core domain types shared by the scheduler, oracle, baselines and simulator.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dat {

enum class UnitKind : std::uint8_t { Json, Roi, Box };

const char* to_string(UnitKind kind);
std::optional<UnitKind> parse_unit_kind(std::string_view name);

// One detected incident, ready for transmission scheduling. `priority` is the
// semantic priority S in [0,1]; the three costs are the byte sizes of the
// structured alert, the representative ROI crop and the boxed image.
// All costs are strictly positive and expected to stay below 2^50 bytes so
// that score comparisons on double-converted sizes remain exact.
struct Event {
  std::string id;
  double arrival_s = 0.0;
  double priority = 0.0;
  std::uint64_t c_json = 0;
  std::uint64_t c_roi = 0;
  std::uint64_t c_box = 0;

  std::uint64_t cost(UnitKind kind) const {
    switch (kind) {
      case UnitKind::Json: return c_json;
      case UnitKind::Roi: return c_roi;
      case UnitKind::Box: return c_box;
    }
    return 0;
  }
  // Lower-cost visual unit; ties prefer the ROI crop.
  std::uint64_t visual_cost() const { return c_roi <= c_box ? c_roi : c_box; }
  UnitKind visual_kind() const { return c_roi <= c_box ? UnitKind::Roi : UnitKind::Box; }
};

struct TransmissionUnit {
  std::string event_id;
  UnitKind kind = UnitKind::Json;
  std::uint64_t size = 0;

  bool operator==(const TransmissionUnit&) const = default;
};

struct Selection {
  bool json = false;
  bool roi = false;
  bool box = false;
};

// Per-event selection variables, stored flat in emission order. Schedulers
// append entries as they select units (cache-friendly at large event counts);
// point queries scan, so bulk consumers should index the entries themselves.
class SelectionMap {
 public:
  Selection& append(std::string event_id) {
    return entries_.emplace_back(std::move(event_id), Selection{}).second;
  }
  const Selection* find(std::string_view event_id) const {
    for (const auto& [id, sel] : entries_) {
      if (id == event_id) return &sel;
    }
    return nullptr;
  }
  Selection* find_mut(std::string_view event_id) {
    for (auto& [id, sel] : entries_) {
      if (id == event_id) return &sel;
    }
    return nullptr;
  }
  // Entry for the id, appending one if absent.
  Selection& find_or_append(std::string_view event_id) {
    if (Selection* sel = find_mut(event_id)) return *sel;
    return append(std::string(event_id));
  }
  bool contains(std::string_view event_id) const { return find(event_id) != nullptr; }
  const Selection& at(std::string_view event_id) const {
    const Selection* sel = find(event_id);
    if (!sel) throw std::out_of_range("SelectionMap: no entry for " + std::string(event_id));
    return *sel;
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  Selection& operator[](std::size_t pos) { return entries_[pos].second; }

 private:
  std::vector<std::pair<std::string, Selection>> entries_;
};

// Per-interval scheduling result: selection variables, the ordered
// transmission sequence, and the accumulated transmit time within the
// interval. `carried_visual` lists events whose visual unit was scheduled
// from the carry-over set (their alert left in an earlier interval), which
// exempts them from the per-interval alert-before-visual check.
struct Schedule {
  SelectionMap selections;
  std::vector<TransmissionUnit> order;
  std::unordered_set<std::string> carried_visual;
  std::uint64_t used_bytes = 0;
  double t_end = 0.0;
};

// Visual unit awaiting budget in a later interval; the alert of the owning
// event has already been delivered.
struct VisualPendingEntry {
  std::string event_id;
  std::uint64_t c_roi = 0;
  std::uint64_t c_box = 0;
  double arrival_s = 0.0;
  double priority = 0.0;

  std::uint64_t visual_cost() const { return c_roi <= c_box ? c_roi : c_box; }
  UnitKind visual_kind() const { return c_roi <= c_box ? UnitKind::Roi : UnitKind::Box; }
};

struct IntervalContext {
  std::uint64_t bandwidth = 0;  // bytes per second
  double interval_s = 1.0;
  std::uint64_t budget = 0;  // bytes transmittable this interval
  double d_vis = 1.5;
  bool visual_stage = true;
  std::vector<Event> pending;
  std::vector<VisualPendingEntry> visual_pending;
};

IntervalContext make_interval_context(std::uint64_t bandwidth, double interval_s, double d_vis,
                                      std::vector<Event> pending,
                                      std::vector<VisualPendingEntry> visual_pending = {});

struct BandwidthSample {
  double t_start_s = 0.0;
  std::uint64_t bytes_per_s = 0;
};

struct BandwidthTrace {
  std::vector<BandwidthSample> samples;
  double sample_period_s = 1.0;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

enum class PolicyId {
  FixedBox,
  FixedRoi,
  FixedJsonBox,
  BandwidthOnly,
  PriorityOnly,
  JsonOnly,
  Dat,
};

const char* to_string(PolicyId policy);
std::optional<PolicyId> parse_policy(std::string_view name);
const std::vector<PolicyId>& all_policies();

}  // namespace dat
