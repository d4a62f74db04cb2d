#pragma once

// Edge-side gating over detection trace records: trigger scoring, threshold
// gating, three-way routing, and representative-ROI selection. Pure functions
// over immutable inputs.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dat {

inline constexpr double kDefaultTauLow = 0.25;
inline constexpr double kDefaultTauHigh = 0.8;

struct Detection {
  std::array<double, 4> bbox{0.0, 0.0, 0.0, 0.0};  // x1, y1, x2, y2 normalized
  std::string class_label;
  double confidence = 0.0;
  std::uint64_t size_bytes = 0;  // encoded crop size from the trace
};

struct FrameDetections {
  std::string frame_id;
  double timestamp_s = 0.0;
  std::vector<Detection> detections;
};

enum class Route { Discard, ToMllm, DirectAccept };

const char* to_string(Route route);

struct GateDecision {
  double trigger_score = 0.0;
  bool gate = false;
  Route route = Route::Discard;
  std::vector<Detection> valid_set;
};

// Maximum detection confidence in the frame; 0 for an empty frame.
double trigger_score(const FrameDetections& frame);

// score < tau_low -> Discard; tau_low <= score < tau_high -> ToMllm;
// score >= tau_high -> DirectAccept.
Route route(double trigger_score, double tau_low, double tau_high);

// Gate at tau_g (inclusive) and keep detections at or above the threshold.
GateDecision gate(const FrameDetections& frame, double tau_g, double tau_high = kDefaultTauHigh);

// Configurable total order over class labels, most severe first.
struct SeverityOrder {
  std::vector<std::string> labels_desc{"severe", "moderate"};

  // Higher rank = more severe; unknown labels rank below all known ones.
  int rank(const std::string& label) const;
};

// Most severe detection; ties broken by smallest size, then input order.
const Detection& select_representative_roi(const std::vector<Detection>& valid_set,
                                           const SeverityOrder& order = {});

}  // namespace dat
