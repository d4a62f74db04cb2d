#pragma once

// Semantic priority computation. An upstream model emits a discrete priority
// level and a continuous score that must stay inside the level's band; the
// two are mixed into a single priority value used by the scheduler.

#include <utility>

namespace dat {

struct PriorityOutput {
  int level = 0;          // 0 .. num_levels-1
  double score = 0.0;     // [0,1]
  int num_levels = 2;
};

// Half-open band owned by `level`: [lo, hi), except the top band which is
// closed at 1. Two levels split at gamma; more levels partition [0,1]
// uniformly.
std::pair<double, double> score_band(int level, int num_levels, double gamma);

// True iff the score lies in its level's band (and level/score are in range).
bool validate_priority(const PriorityOutput& p, double gamma);

// Nearest in-band score for the given level.
double clamp_score_to_band(int level, int num_levels, double gamma, double score);

// level / (num_levels - 1), so priorities stay comparable across level counts.
double normalize_level(int level, int num_levels);

// beta * level_norm + (1 - beta) * score, in [0,1].
double semantic_priority(double level_norm, double score, double beta);

}  // namespace dat
