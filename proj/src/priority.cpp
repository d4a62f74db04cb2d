#include "dat/priority.hpp"

#include <cmath>
#include <stdexcept>

namespace dat {

std::pair<double, double> score_band(int level, int num_levels, double gamma) {
  if (num_levels < 2) throw std::invalid_argument("score_band: need at least two levels");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("score_band: gamma must be in (0,1)");
  if (level < 0 || level >= num_levels) throw std::invalid_argument("score_band: level out of range");
  if (num_levels == 2) {
    return level == 0 ? std::pair{0.0, gamma} : std::pair{gamma, 1.0};
  }
  const double width = 1.0 / static_cast<double>(num_levels);
  return {static_cast<double>(level) * width, static_cast<double>(level + 1) * width};
}

bool validate_priority(const PriorityOutput& p, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("validate_priority: gamma must be in (0,1)");
  if (p.num_levels < 2) return false;
  if (p.level < 0 || p.level >= p.num_levels) return false;
  if (!(p.score >= 0.0 && p.score <= 1.0)) return false;
  const auto [lo, hi] = score_band(p.level, p.num_levels, gamma);
  const bool top = p.level == p.num_levels - 1;
  return p.score >= lo && (top ? p.score <= 1.0 : p.score < hi);
}

double clamp_score_to_band(int level, int num_levels, double gamma, double score) {
  const auto [lo, hi] = score_band(level, num_levels, gamma);
  const bool top = level == num_levels - 1;
  if (score < lo) return lo;
  const double max_in_band = top ? 1.0 : std::nextafter(hi, lo);
  if (score > max_in_band) return max_in_band;
  return score;
}

double normalize_level(int level, int num_levels) {
  if (num_levels < 2) throw std::invalid_argument("normalize_level: need at least two levels");
  if (level < 0 || level > num_levels - 1) throw std::invalid_argument("normalize_level: level out of range");
  return static_cast<double>(level) / static_cast<double>(num_levels - 1);
}

double semantic_priority(double level_norm, double score, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("semantic_priority: beta must be in (0,1)");
  if (!(level_norm >= 0.0 && level_norm <= 1.0)) throw std::invalid_argument("semantic_priority: level_norm out of [0,1]");
  if (!(score >= 0.0 && score <= 1.0)) throw std::invalid_argument("semantic_priority: score out of [0,1]");
  return beta * level_norm + (1.0 - beta) * score;
}

}  // namespace dat
