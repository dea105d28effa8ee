#pragma once

#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <string>
#include <vector>

#include "a2av/plan.hpp"
#include "a2av/schedules.hpp"
#include "a2av/simnet.hpp"
#include "a2av/stats.hpp"
#include "a2av/transport.hpp"

namespace a2av {

enum class TransportKind { threaded, simnet };

std::string_view transport_name(TransportKind kind);
TransportKind transport_from_name(std::string_view name);

/// Exchange pattern generator named in configs and result rows.
struct WorkloadSpec {
  enum class Kind { uniform, fft_transpose, random };

  Kind kind = Kind::uniform;
  int elem_size = 8;
  Count count = 64;       // uniform: elements per rank pair
  Count max_count = 32;   // random: per-pair count bound
  Count grid_x = 0;       // fft_transpose
  Count grid_y = 0;
  int proc_rows = 0;
  int proc_cols = 0;

  static WorkloadSpec uniform(Count count, int elem_size);
  static WorkloadSpec fft_transpose(Count grid_x, Count grid_y, int proc_rows, int proc_cols,
                                    int elem_size);
  static WorkloadSpec random(Count max_count, int elem_size);

  /// Comma-free tag used in the results CSV, e.g. "uniform-c64-e8".
  std::string label() const;

  /// Materializes the plan; throws ConfigError when the workload cannot
  /// serve n_ranks (fft process grid mismatch).
  ExchangePlan build(int n_ranks, std::uint64_t seed) const;
};

/// One benchmark point. The simnet-only fields (cost, skew) are ignored by
/// the threaded transport except that a non-trivial skew is rejected.
struct RunConfig {
  ScheduleKind schedule = ScheduleKind::pairwise;
  TransportKind transport = TransportKind::threaded;
  int n_ranks = 4;
  int stride = 1;
  WorkloadSpec workload;
  int repeats = 1;
  std::uint64_t seed = 1;
  CostModel cost = default_cost_model();
  SkewProfile skew;
  bool best_per_metric = false;

  void validate() const;
  std::string_view time_unit() const;  // "ns" for threaded, "sim" for simnet
};

/// One results CSV row; the header is
/// schedule,transport,n_ranks,stride,workload,repeats,seed,time_unit,min,avg,max,makespan,status
struct ResultRow {
  std::string schedule;
  std::string transport;
  int n_ranks = 0;
  int stride = 0;
  std::string workload;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::string time_unit;
  double min = 0;
  double avg = 0;
  double max = 0;
  double makespan = 0;
  std::string status = "ok";
};

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);

/// Per-rank durations of one repeat. Simnet repeats re-resolve a seeded skew
/// distribution per repeat index; explicit offsets repeat identically.
std::vector<double> run_repeat(const RunConfig& cfg, int repeat_index);

/// Full benchmark point: repeats, then best-repeat statistics. A simulation
/// failure (deadlock, livelock, transport misuse) is reported in the status
/// column instead of aborting a sweep.
ResultRow run_config(const RunConfig& cfg);

/// True when every delivered receive buffer equals the direct permutation.
bool verify_delivery(const ExchangePlan& plan,
                     const std::vector<std::vector<std::byte>>& recv_bufs);

/// Runs cfg once on its transport and checks delivery; details receives a
/// short report (reproduction parameters on failure).
bool verify_config(const RunConfig& cfg, std::string& details);

/// Runs one simnet repeat and streams its event trace as CSV.
void write_trace(const RunConfig& cfg, std::ostream& os);

/// Schedule/stride grid around a base config. Non-stride schedules produce
/// one row each; stride schedules one row per stride value.
struct SweepConfig {
  RunConfig base;
  std::vector<ScheduleKind> schedules{std::begin(kAllSchedules), std::end(kAllSchedules)};
  std::vector<int> strides{5, 10, 15};
};

std::vector<ResultRow> run_sweep(const SweepConfig& sweep);

}  // namespace a2av
