#include "dat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dat/exactfp.hpp"
#include "dat/scheduler.hpp"

namespace dat {

namespace {

struct UnitRef {
  std::uint32_t event = 0;
  UnitKind kind = UnitKind::Json;
  std::uint64_t size = 0;
};

// One fully ordered feasible solution, in byte-scaled terms.
struct Leaf {
  std::vector<double> alarm_scaled;
  std::vector<int> z;
  std::vector<std::uint32_t> order_key;  // (event << 2) | kind, in sequence order
  std::vector<UnitRef> units;
  double primary_approx = 0.0;
};

std::uint32_t key_of(const UnitRef& u) {
  return (u.event << 2) | static_cast<std::uint32_t>(u.kind);
}

struct Enumerator {
  std::span<const Event> events;
  std::uint64_t bandwidth;
  double d_vis;
  bool json_first_only;
  bool prune;

  std::vector<double> weights;          // S_i
  std::vector<double> penalty_scaled;   // unserved charge in bytes
  std::vector<UnitRef> combo_units;
  std::vector<int> choice;              // 0 none, 1 json, 2 json+roi, 3 json+box
  std::uint64_t budget = 0;

  // permutation state
  std::vector<UnitRef> seq;
  std::vector<bool> used;
  std::vector<double> alarm_scaled;
  std::vector<int> z;

  Leaf best;
  bool have_best = false;
  std::uint64_t leaves = 0;

  void consider_leaf(std::uint64_t /*prefix*/) {
    ++leaves;
    double primary = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) primary += weights[i] * alarm_scaled[i];

    if (have_best) {
      int cmp = exactfp::compare_weighted(weights, alarm_scaled, best.alarm_scaled);
      if (cmp > 0) return;
      if (cmp == 0) {
        std::vector<double> za(z.begin(), z.end());
        std::vector<double> zb(best.z.begin(), best.z.end());
        cmp = exactfp::compare_weighted(weights, za, zb);
        if (cmp < 0) return;
        if (cmp == 0) {
          // Canonical order: keep the lexicographically smaller sequence.
          std::vector<std::uint32_t> key(seq.size());
          for (std::size_t i = 0; i < seq.size(); ++i) key[i] = key_of(seq[i]);
          if (key >= best.order_key) return;
        }
      }
    }

    best.alarm_scaled = alarm_scaled;
    best.z = z;
    best.units = seq;
    best.order_key.resize(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) best.order_key[i] = key_of(seq[i]);
    best.primary_approx = primary;
    have_best = true;
  }

  // Lower bound on the final primary for the current partial order: placed
  // alert terms are fixed, every unplaced alert completes no earlier than
  // prefix + its own size, and unserved charges are combo-fixed.
  bool bound_prunes(std::uint64_t prefix, double placed_partial) {
    if (!prune || !have_best) return false;
    double bound = placed_partial;
    for (std::size_t u = 0; u < combo_units.size(); ++u) {
      if (used[u] || combo_units[u].kind != UnitKind::Json) continue;
      bound += weights[combo_units[u].event] *
               (static_cast<double>(prefix) + static_cast<double>(combo_units[u].size));
    }
    const double slack = 1e-9 * (std::fabs(bound) + std::fabs(best.primary_approx)) + 1e-300;
    return bound > best.primary_approx + slack;
  }

  void permute(std::uint64_t prefix, double placed_partial, std::size_t placed,
               std::size_t json_left) {
    if (placed == combo_units.size()) {
      consider_leaf(prefix);
      return;
    }
    if (bound_prunes(prefix, placed_partial)) return;
    for (std::size_t u = 0; u < combo_units.size(); ++u) {
      if (used[u]) continue;
      const UnitRef& unit = combo_units[u];
      if (json_first_only && unit.kind != UnitKind::Json && json_left > 0) continue;
      used[u] = true;
      seq.push_back(unit);
      const std::uint64_t next_prefix = prefix + unit.size;
      double next_partial = placed_partial;
      if (unit.kind == UnitKind::Json) {
        alarm_scaled[unit.event] = static_cast<double>(next_prefix);
        next_partial += weights[unit.event] * static_cast<double>(next_prefix);
      } else {
        z[unit.event] = meets_visual_deadline(next_prefix, bandwidth, d_vis) ? 1 : 0;
      }
      permute(next_prefix, next_partial, placed + 1,
              unit.kind == UnitKind::Json ? json_left - 1 : json_left);
      if (unit.kind == UnitKind::Json) {
        alarm_scaled[unit.event] = penalty_scaled[unit.event];
      } else {
        z[unit.event] = 0;
      }
      seq.pop_back();
      used[u] = false;
    }
  }

  void run_combo() {
    std::size_t json_count = 0;
    for (const UnitRef& u : combo_units) {
      if (u.kind == UnitKind::Json) ++json_count;
    }
    used.assign(combo_units.size(), false);
    seq.clear();
    double partial = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      alarm_scaled[i] = penalty_scaled[i];
      if (choice[i] == 0) partial += weights[i] * penalty_scaled[i];
      z[i] = 0;
    }
    // Unplaced-but-selected alerts are tracked by the bound; start the fixed
    // part with unserved charges only.
    permute(0, partial, 0, json_count);
  }

  void choose(std::size_t i, std::uint64_t bytes, bool visual_stage) {
    if (i == events.size()) {
      run_combo();
      return;
    }
    const Event& e = events[i];
    choice[i] = 0;
    choose(i + 1, bytes, visual_stage);

    if (bytes + e.c_json > budget) return;
    choice[i] = 1;
    combo_units.push_back({static_cast<std::uint32_t>(i), UnitKind::Json, e.c_json});
    choose(i + 1, bytes + e.c_json, visual_stage);

    if (visual_stage) {
      if (bytes + e.c_json + e.c_roi <= budget) {
        choice[i] = 2;
        combo_units.push_back({static_cast<std::uint32_t>(i), UnitKind::Roi, e.c_roi});
        choose(i + 1, bytes + e.c_json + e.c_roi, visual_stage);
        combo_units.pop_back();
      }
      if (bytes + e.c_json + e.c_box <= budget) {
        choice[i] = 3;
        combo_units.push_back({static_cast<std::uint32_t>(i), UnitKind::Box, e.c_box});
        choose(i + 1, bytes + e.c_json + e.c_box, visual_stage);
        combo_units.pop_back();
      }
    }
    combo_units.pop_back();
  }
};

}  // namespace

OracleSolution exact_lexicographic(std::span<const Event> events, std::uint64_t bandwidth,
                                   double interval_s, double d_vis,
                                   const OracleOptions& options) {
  if (events.size() > options.n_max) {
    throw std::invalid_argument("exact_lexicographic: instance larger than n_max");
  }
  if (bandwidth == 0) throw std::invalid_argument("exact_lexicographic: bandwidth must be positive");
  if (!(interval_s > 0.0) || !(d_vis > 0.0)) {
    throw std::invalid_argument("exact_lexicographic: interval and d_vis must be positive");
  }
  for (const Event& e : events) {
    if (e.c_json == 0 || e.c_roi == 0 || e.c_box == 0) {
      throw std::invalid_argument("exact_lexicographic: unit costs must be positive");
    }
  }

  Enumerator en;
  en.events = events;
  en.bandwidth = bandwidth;
  en.d_vis = d_vis;
  en.json_first_only = options.json_first_only;
  en.prune = options.prune;
  en.budget = interval_budget(bandwidth, interval_s);
  const double interval_bytes = static_cast<double>(bandwidth) * interval_s;
  en.weights.resize(events.size());
  en.penalty_scaled.resize(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    en.weights[i] = events[i].priority;
    en.penalty_scaled[i] = interval_bytes + static_cast<double>(events[i].c_json);
  }
  en.choice.assign(events.size(), 0);
  en.alarm_scaled.assign(events.size(), 0.0);
  en.z.assign(events.size(), 0);
  en.choose(0, 0, options.visual_stage);

  OracleSolution solution;
  solution.enumeration_count = en.leaves;
  solution.alarm_scaled = en.best.alarm_scaled;
  solution.on_time_visual = en.best.z;
  if (!en.have_best) {  // no events: the empty solution
    solution.alarm_scaled.assign(events.size(), 0.0);
    solution.on_time_visual.assign(events.size(), 0);
    return solution;
  }
  for (const UnitRef& u : en.best.units) {
    const Event& e = events[u.event];
    solution.order.push_back({e.id, u.kind, u.size});
    Selection& sel = solution.selections.find_or_append(e.id);
    switch (u.kind) {
      case UnitKind::Json: sel.json = true; break;
      case UnitKind::Roi: sel.roi = true; break;
      case UnitKind::Box: sel.box = true; break;
    }
  }
  double primary = 0.0;
  double secondary = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    primary += en.weights[i] * solution.alarm_scaled[i];
    secondary += en.weights[i] * static_cast<double>(solution.on_time_visual[i]);
  }
  solution.primary = primary / static_cast<double>(bandwidth);
  solution.secondary = secondary;
  return solution;
}

std::vector<double> greedy_alarm_scaled(const Schedule& schedule, std::span<const Event> events,
                                        std::uint64_t bandwidth, double interval_s) {
  const double interval_bytes = static_cast<double>(bandwidth) * interval_s;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < events.size(); ++i) index.emplace(events[i].id, i);
  std::vector<double> scaled(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    scaled[i] = interval_bytes + static_cast<double>(events[i].c_json);
  }
  std::uint64_t prefix = 0;
  for (const TransmissionUnit& unit : schedule.order) {
    prefix += unit.size;
    if (unit.kind != UnitKind::Json) continue;
    auto it = index.find(unit.event_id);
    if (it != index.end()) scaled[it->second] = static_cast<double>(prefix);
  }
  return scaled;
}

std::vector<int> greedy_on_time_visual(const Schedule& schedule, std::span<const Event> events,
                                       std::uint64_t bandwidth, double d_vis) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < events.size(); ++i) index.emplace(events[i].id, i);
  std::vector<int> z(events.size(), 0);
  std::uint64_t prefix = 0;
  for (const TransmissionUnit& unit : schedule.order) {
    prefix += unit.size;
    if (unit.kind == UnitKind::Json) continue;
    auto it = index.find(unit.event_id);
    if (it != index.end() && meets_visual_deadline(prefix, bandwidth, d_vis)) z[it->second] = 1;
  }
  return z;
}

GapReport compare_with_oracle(const Schedule& greedy, const OracleSolution& exact,
                              std::span<const Event> events, std::uint64_t bandwidth,
                              double interval_s, double d_vis) {
  const std::uint64_t budget = interval_budget(bandwidth, interval_s);
  if (!check_constraints(greedy, events, budget).empty()) {
    throw std::logic_error("compare_with_oracle: greedy schedule is infeasible");
  }

  std::vector<double> weights(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) weights[i] = events[i].priority;
  const std::vector<double> greedy_scaled =
      greedy_alarm_scaled(greedy, events, bandwidth, interval_s);
  const std::vector<int> greedy_z = greedy_on_time_visual(greedy, events, bandwidth, d_vis);

  GapReport report;
  report.greedy_feasible = true;
  double gp = 0.0, gs = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    gp += weights[i] * greedy_scaled[i];
    gs += weights[i] * static_cast<double>(greedy_z[i]);
  }
  report.greedy_primary = gp / static_cast<double>(bandwidth);
  report.greedy_secondary = gs;
  report.exact_primary = exact.primary;
  report.exact_secondary = exact.secondary;
  report.primary_gap = report.greedy_primary - report.exact_primary;
  report.secondary_gap = report.exact_secondary - report.greedy_secondary;
  report.primary_sign =
      exactfp::compare_weighted(weights, greedy_scaled, exact.alarm_scaled);
  std::vector<double> za(greedy_z.begin(), greedy_z.end());
  std::vector<double> zb(exact.on_time_visual.begin(), exact.on_time_visual.end());
  report.secondary_sign = exactfp::compare_weighted(weights, zb, za);
  return report;
}

}  // namespace dat
