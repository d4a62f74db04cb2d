#include "dat/gating.hpp"

#include <algorithm>
#include <stdexcept>

namespace dat {

const char* to_string(Route route) {
  switch (route) {
    case Route::Discard: return "discard";
    case Route::ToMllm: return "to-mllm";
    case Route::DirectAccept: return "direct-accept";
  }
  return "?";
}

double trigger_score(const FrameDetections& frame) {
  double best = 0.0;
  for (const Detection& d : frame.detections) {
    if (d.confidence > best) best = d.confidence;
  }
  return best;
}

Route route(double trigger_score, double tau_low, double tau_high) {
  if (!(tau_low >= 0.0 && tau_high <= 1.0 && tau_low <= tau_high)) {
    throw std::invalid_argument("route: need 0 <= tau_low <= tau_high <= 1");
  }
  if (trigger_score < tau_low) return Route::Discard;
  if (trigger_score < tau_high) return Route::ToMllm;
  return Route::DirectAccept;
}

GateDecision gate(const FrameDetections& frame, double tau_g, double tau_high) {
  if (!(tau_g >= 0.0 && tau_g <= 1.0)) {
    throw std::invalid_argument("gate: tau_g must be in [0,1]");
  }
  GateDecision decision;
  decision.trigger_score = trigger_score(frame);
  decision.gate = decision.trigger_score >= tau_g;
  for (const Detection& d : frame.detections) {
    if (d.confidence >= tau_g) decision.valid_set.push_back(d);
  }
  // A gate threshold above the routing threshold routes everything it passes.
  decision.route = route(decision.trigger_score, tau_g, std::max(tau_g, tau_high));
  return decision;
}

int SeverityOrder::rank(const std::string& label) const {
  for (std::size_t i = 0; i < labels_desc.size(); ++i) {
    if (labels_desc[i] == label) return static_cast<int>(labels_desc.size() - i);
  }
  return 0;
}

const Detection& select_representative_roi(const std::vector<Detection>& valid_set,
                                           const SeverityOrder& order) {
  if (valid_set.empty()) {
    throw std::invalid_argument("select_representative_roi: empty valid set");
  }
  const Detection* best = &valid_set.front();
  int best_rank = order.rank(best->class_label);
  for (std::size_t i = 1; i < valid_set.size(); ++i) {
    const Detection& d = valid_set[i];
    const int r = order.rank(d.class_label);
    if (r > best_rank || (r == best_rank && d.size_bytes < best->size_bytes)) {
      best = &d;
      best_rank = r;
    }
  }
  return *best;
}

}  // namespace dat
