#pragma once

#include <barrier>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "a2av/transport.hpp"

namespace a2av {

/// Real in-process transport: one thread of control per rank over shared
/// in-memory channels. Eager delivery; matching by (source, tag) in FIFO
/// order; blocking waits park the calling thread. Delivery order across
/// distinct peers is genuinely nondeterministic.
class ThreadedTransport {
 public:
  explicit ThreadedTransport(int n_ranks);
  ~ThreadedTransport();

  ThreadedTransport(const ThreadedTransport&) = delete;
  ThreadedTransport& operator=(const ThreadedTransport&) = delete;

  int n_ranks() const { return n_; }

  /// Spawns one thread per rank, releases them through a barrier, runs each
  /// rank's schedule to completion, and returns per-rank wall durations in
  /// nanoseconds measured from the post-barrier start to schedule completion.
  /// The first rank failure is rethrown after all threads have stopped.
  std::vector<double> run(const RankTaskFactory& factory);

  /// Phase barrier for the rank threads inside run(); no rank exits before
  /// every rank has entered. Reusable across phases.
  void barrier();

  /// Matching counters for one rank, valid after run() returns.
  const MatchQueueStats& stats(int rank) const;

 private:
  friend class ThreadedRankCtx;
  struct Endpoint;

  RequestHandle issue_send(int rank, int peer, std::span<const std::byte> data, int tag);
  RequestHandle issue_recv(int rank, int peer, std::span<std::byte> capacity, int tag);
  bool wait(int rank, const WaitRequest& req, WaitResult& out);
  void abort_all();
  void check_peer(int peer) const;

  int n_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;
  std::barrier<> sync_;
};

}  // namespace a2av
