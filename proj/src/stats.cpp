#include "a2av/stats.hpp"

#include <algorithm>
#include <numeric>

#include "a2av/error.hpp"

namespace a2av {

namespace {

struct RepeatSummary {
  double min = 0;
  double avg = 0;
  double max = 0;
};

RepeatSummary summarize_repeat(const std::vector<double>& durations) {
  RepeatSummary s;
  s.min = *std::min_element(durations.begin(), durations.end());
  s.max = *std::max_element(durations.begin(), durations.end());
  // Summation error can push the mean a hair outside [min, max]; clamp so the
  // reported statistics always order.
  s.avg = std::clamp(std::accumulate(durations.begin(), durations.end(), 0.0) /
                         static_cast<double>(durations.size()),
                     s.min, s.max);
  return s;
}

}  // namespace

RunStats summarize(const std::vector<std::vector<double>>& repeats, bool best_per_metric) {
  if (repeats.empty()) throw ConfigError("no repeats to summarize");
  std::vector<RepeatSummary> per;
  per.reserve(repeats.size());
  for (const auto& r : repeats) {
    if (r.empty()) throw ConfigError("repeat holds no rank durations");
    per.push_back(summarize_repeat(r));
  }

  int best = 0;
  for (int r = 1; r < static_cast<int>(per.size()); ++r)
    if (per[static_cast<std::size_t>(r)].max < per[static_cast<std::size_t>(best)].max) best = r;

  RunStats out;
  out.best_repeat = best;
  out.makespan = per[static_cast<std::size_t>(best)].max;
  if (best_per_metric) {
    out.min = per[0].min;
    out.avg = per[0].avg;
    out.max = per[0].max;
    for (const auto& s : per) {
      out.min = std::min(out.min, s.min);
      out.avg = std::min(out.avg, s.avg);
      out.max = std::min(out.max, s.max);
    }
  } else {
    out.min = per[static_cast<std::size_t>(best)].min;
    out.avg = per[static_cast<std::size_t>(best)].avg;
    out.max = per[static_cast<std::size_t>(best)].max;
  }
  return out;
}

}  // namespace a2av
