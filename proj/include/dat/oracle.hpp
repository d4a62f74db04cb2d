#pragma once

// Exhaustive solver for the single-interval lexicographic program on small
// instances: minimize the priority-weighted alert delay, then maximize the
// priority-weighted count of visual units arriving within the validity
// deadline. Enumerates unit selections (per event: nothing, alert only,
// alert+roi, alert+box) under the byte budget and all transmission orders of
// the selected units. Used as a correctness and optimality-gap reference for
// the greedy scheduler.
//
// Events whose alert is not selected are charged interval_s + c_json/B, the
// earliest completion they could reach in the next interval under unchanged
// bandwidth; without that charge, dropping all traffic would be "optimal".
//
// Objective comparisons are exact (error-free transforms), so reported optima
// are insensitive to float summation order.

#include <cstdint>
#include <span>
#include <vector>

#include "dat/types.hpp"

namespace dat {

struct OracleOptions {
  std::size_t n_max = 4;       // instance-size guard
  bool visual_stage = true;    // when false, roi/box units are never selected
  bool json_first_only = false;  // restrict orders to alerts-before-visuals
  bool prune = true;           // sound branch-and-bound on the primary objective
};

struct OracleSolution {
  SelectionMap selections;
  std::vector<TransmissionUnit> order;
  double primary = 0.0;    // sum S_i * alert delay (seconds), unserved charged
  double secondary = 0.0;  // sum S_i * on-time visual indicator
  std::uint64_t enumeration_count = 0;  // feasible (selection, order) leaves evaluated

  // Per input event, for exact cross-checks: completion of the alert in bytes
  // (prefix sum), or the unserved charge expressed in bytes.
  std::vector<double> alarm_scaled;
  std::vector<int> on_time_visual;
};

OracleSolution exact_lexicographic(std::span<const Event> events, std::uint64_t bandwidth,
                                   double interval_s, double d_vis,
                                   const OracleOptions& options = {});

// Greedy-side terms in the same byte-scaled form the oracle uses.
std::vector<double> greedy_alarm_scaled(const Schedule& schedule, std::span<const Event> events,
                                        std::uint64_t bandwidth, double interval_s);
std::vector<int> greedy_on_time_visual(const Schedule& schedule, std::span<const Event> events,
                                       std::uint64_t bandwidth, double d_vis);

struct GapReport {
  double greedy_primary = 0.0;
  double exact_primary = 0.0;
  double primary_gap = 0.0;  // greedy - exact, >= 0 when the oracle is sound
  double greedy_secondary = 0.0;
  double exact_secondary = 0.0;
  double secondary_gap = 0.0;  // exact - greedy
  int primary_sign = 0;        // exact sign of greedy_primary - exact_primary
  int secondary_sign = 0;      // exact sign of exact_secondary - greedy_secondary
  bool greedy_feasible = true;
};

// Throws std::logic_error if the greedy schedule is infeasible.
GapReport compare_with_oracle(const Schedule& greedy, const OracleSolution& exact,
                              std::span<const Event> events, std::uint64_t bandwidth,
                              double interval_s, double d_vis);

}  // namespace dat
