#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "a2av/plan.hpp"
#include "a2av/schedules.hpp"
#include "a2av/transport.hpp"

namespace a2av {

/// Simulated time; abstract units.
using SimTime = double;

/// Network cost parameters of the simulator.
struct CostModel {
  SimTime alpha = 0;            // per-message latency
  SimTime beta = 0;             // per byte on the wire
  SimTime gamma = 0;            // per posted-receive entry examined at match
  bool inject_serialize = false;  // a rank's NIC transmits one message at a time
  SimTime poll_cost = 0;        // local clock charge per unsuccessful poll
  SimTime local_copy_cost = 0;  // per byte for self-messages

  /// Throws ConfigError if any parameter is negative.
  void validate() const;
};

/// Preset used by the CLI when no cost model is configured.
CostModel default_cost_model();

/// Per-rank start-time offsets modeling load imbalance. Either an explicit
/// vector or a seeded distribution resolved at simulation start.
struct SkewProfile {
  enum class Kind { none, explicit_offsets, uniform, one_rank };

  Kind kind = Kind::none;
  std::vector<SimTime> offsets;  // explicit_offsets
  SimTime max_offset = 0;        // uniform: per-rank draw in [0, max_offset)
  SimTime offset = 0;            // one_rank: delay applied to one rank
  int rank = -1;                 // one_rank: fixed rank, or -1 for seed-drawn
  std::uint64_t seed = 0;        // distribution seed

  static SkewProfile none();
  static SkewProfile explicit_offsets_of(std::vector<SimTime> offsets);
  static SkewProfile uniform(SimTime max_offset, std::uint64_t seed);
  static SkewProfile one_rank(int rank, SimTime offset);
  static SkewProfile one_rank_seeded(SimTime offset, std::uint64_t seed);

  /// Concrete per-rank offsets; deterministic in (profile, n_ranks, salt).
  /// The salt separates draws across repeats and simulate() seeds.
  std::vector<SimTime> resolve(int n_ranks, std::uint64_t salt) const;
};

/// Shortest fixed-notation decimal that round-trips; integral values print
/// with no fraction or exponent. Every numeric CSV column uses it.
std::string format_value(double v);

enum class EventKind : std::uint8_t {
  start,
  send_issue,
  recv_post,
  send_complete,
  arrive_match,
  arrive_unexpected,
  recv_complete,
  retire,
  poll,
  finish,
};

std::string_view event_name(EventKind kind);

struct TraceRecord {
  SimTime time = 0;
  int rank = -1;
  EventKind kind = EventKind::start;
  int peer = -1;                 // -1 when not applicable
  std::uint64_t bytes = 0;
  std::int64_t queue_len = -1;   // posted-queue entries examined; -1 when n/a
};

/// Ordered simulation observations; time is nondecreasing.
struct EventTrace {
  std::vector<TraceRecord> records;

  /// Line-delimited export, header `time,rank,event,peer,bytes,queue_len`.
  void to_csv(std::ostream& os) const;
};

/// Max across ranks of (finish time − skewed start), read from the trace.
/// Throws SimError if any started rank has no finish record.
SimTime makespan(const EventTrace& trace);

/// Deterministic single-threaded event engine implementing the transport
/// contract. Waits suspend the rank's coroutine; the engine resumes it when
/// the wait is satisfied. Event order is lexicographic (time, rank, seq).
class SimNet {
 public:
  SimNet(int n_ranks, CostModel cost, std::vector<SimTime> skew_offsets);
  ~SimNet();

  SimNet(const SimNet&) = delete;
  SimNet& operator=(const SimNet&) = delete;

  /// Runs one schedule coroutine per rank from its skewed start to
  /// completion. Throws SimError on deadlock (naming stuck ranks and their
  /// pending peers) or livelock, TransportError on transport misuse.
  void run(const RankTaskFactory& factory);

  const EventTrace& trace() const;

  /// Per-rank duration from skewed start to last handle retirement.
  std::vector<SimTime> finish_durations() const;

  const MatchQueueStats& stats(int rank) const;
  std::uint64_t failed_polls(int rank) const;

 private:
  friend class SimRankCtx;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One simulated collective: builds pattern buffers, runs the schedule on
/// SimNet, and returns durations, trace, buffers, and queue statistics.
struct SimResult {
  std::vector<SimTime> finish;
  EventTrace trace;
  std::vector<std::vector<std::byte>> recv_bufs;
  std::vector<MatchQueueStats> stats;
  std::vector<std::uint64_t> failed_polls;
};

SimResult simulate(const ExchangePlan& plan, ScheduleKind kind, const CostModel& cost,
                   const SkewProfile& skew, int stride, std::uint64_t seed);

}  // namespace a2av
