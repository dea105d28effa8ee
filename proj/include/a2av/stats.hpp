#pragma once

#include <vector>

namespace a2av {

/// Summary of a repeated run. Times are in the transport's unit.
struct RunStats {
  int best_repeat = 0;
  double min = 0;
  double avg = 0;
  double max = 0;
  double makespan = 0;
};

/// repeats[r] holds the per-rank durations of repeat r. The reported repeat
/// is the one with the smallest makespan (max over ranks), ties resolved to
/// the lowest index; min/avg/max describe the rank spread within it. With
/// best_per_metric each of min/avg/max is instead the best value of that
/// metric across repeats (a sensitivity view; the metrics may then come from
/// different repeats). Throws ConfigError on empty input.
RunStats summarize(const std::vector<std::vector<double>>& repeats, bool best_per_metric = false);

}  // namespace a2av
