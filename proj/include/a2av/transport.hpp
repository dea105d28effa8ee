#pragma once

#include <coroutine>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "a2av/error.hpp"

namespace a2av {

/// Sentinel returned by wait_any/test_any when every slot is retired.
inline constexpr int kUndefinedIndex = -1;

enum class ReqKind : std::uint8_t { send, recv };

/// Identity of one in-flight nonblocking operation. Completion state lives in
/// the transport; the handle is just a per-rank token.
struct RequestHandle {
  std::uint64_t id = 0;
  ReqKind kind = ReqKind::send;
  int peer = -1;
};

/// Ordered slots of in-flight requests. A retired slot is empty and is never
/// waited on again; refilling reuses the slot index.
class RequestBatch {
 public:
  int add(RequestHandle h) {
    slots_.push_back(h);
    return static_cast<int>(slots_.size()) - 1;
  }

  void put(int slot, RequestHandle h) { slots_[static_cast<std::size_t>(slot)] = h; }

  void retire(int slot) { slots_[static_cast<std::size_t>(slot)].reset(); }

  bool holds(int slot) const { return slots_[static_cast<std::size_t>(slot)].has_value(); }

  const RequestHandle& at(int slot) const { return *slots_[static_cast<std::size_t>(slot)]; }

  int size() const { return static_cast<int>(slots_.size()); }

  bool all_retired() const {
    for (const auto& s : slots_)
      if (s.has_value()) return false;
    return true;
  }

  void clear() { slots_.clear(); }

 private:
  std::vector<std::optional<RequestHandle>> slots_;
};

/// Per-rank queue-matching counters. posted_receive_scans accumulates the
/// entries examined when an arrival matches in the posted-receive queue (the
/// quantity the simulator prices); unexpected_messages counts arrivals that
/// found no posted receive.
struct MatchQueueStats {
  std::uint64_t posted_receive_scans = 0;
  std::uint64_t unexpected_messages = 0;
};

enum class WaitOp : std::uint8_t { wait_all, wait_any, test_any };

struct WaitRequest {
  WaitOp op;
  RequestBatch* batch;
};

/// flag is the test_any "completed something or all retired" bit (always true
/// for the blocking waits); index is the retired slot, or kUndefinedIndex.
struct WaitResult {
  bool flag = true;
  int index = kUndefinedIndex;
};

/// One rank's view of the transport. Schedules are written against this
/// interface only; implementations are the threaded transport (waits block
/// the rank's thread) and the simulator (waits suspend the rank's coroutine
/// until the event engine resumes it).
class RankCtx {
 public:
  virtual ~RankCtx() = default;

  virtual int rank() const = 0;
  virtual int n_ranks() const = 0;

  virtual RequestHandle isend(int peer, std::span<const std::byte> data, int tag) = 0;
  virtual RequestHandle irecv(int peer, std::span<std::byte> capacity, int tag) = 0;

  /// True if the wait is satisfied without suspending; result filled. The
  /// threaded transport always returns true (it blocks internally).
  virtual bool wait_ready(const WaitRequest& req, WaitResult& out) = 0;

  /// Called when wait_ready returned false: park the coroutine; the engine
  /// fills *out and resumes k when the wait is satisfied.
  virtual void wait_suspend(const WaitRequest& req, WaitResult* out,
                            std::coroutine_handle<> k) = 0;
};

/// Resumable per-rank schedule. Starts suspended; the driver resumes it and
/// it runs until its next transport wait or completion. Under the threaded
/// transport the first resume runs it to completion.
class [[nodiscard]] SchedTask {
 public:
  struct promise_type {
    std::exception_ptr error;

    SchedTask get_return_object() {
      return SchedTask(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { error = std::current_exception(); }
  };

  SchedTask() = default;
  explicit SchedTask(std::coroutine_handle<promise_type> h) : h_(h) {}
  SchedTask(SchedTask&& o) noexcept : h_(std::exchange(o.h_, nullptr)) {}
  SchedTask& operator=(SchedTask&& o) noexcept {
    if (this != &o) {
      destroy();
      h_ = std::exchange(o.h_, nullptr);
    }
    return *this;
  }
  SchedTask(const SchedTask&) = delete;
  SchedTask& operator=(const SchedTask&) = delete;
  ~SchedTask() { destroy(); }

  void resume() { h_.resume(); }
  bool done() const { return !h_ || h_.done(); }

  /// Rethrows an exception that escaped the schedule body, if any.
  void check() const {
    if (h_ && h_.done() && h_.promise().error) std::rethrow_exception(h_.promise().error);
  }

 private:
  void destroy() {
    if (h_) h_.destroy();
  }
  std::coroutine_handle<promise_type> h_;
};

struct WaitAwaiter {
  RankCtx& ctx;
  WaitRequest req;
  WaitResult result{};

  bool await_ready() { return ctx.wait_ready(req, result); }
  void await_suspend(std::coroutine_handle<> k) { ctx.wait_suspend(req, &result, k); }
  WaitResult await_resume() { return result; }
};

/// Builds the schedule coroutine a transport runs on each rank.
using RankTaskFactory = std::function<SchedTask(RankCtx&)>;

/// co_await wait_all(ctx, batch): every slot complete and retired.
inline WaitAwaiter wait_all(RankCtx& ctx, RequestBatch& batch) {
  return {ctx, {WaitOp::wait_all, &batch}};
}

/// co_await wait_any(ctx, batch) -> .index: one newly retired slot, or
/// kUndefinedIndex if the batch was all-retired.
inline WaitAwaiter wait_any(RankCtx& ctx, RequestBatch& batch) {
  return {ctx, {WaitOp::wait_any, &batch}};
}

/// co_await test_any(ctx, batch) -> (.flag, .index): .flag false means no
/// completion this poll; .flag true with kUndefinedIndex means all retired.
inline WaitAwaiter test_any(RankCtx& ctx, RequestBatch& batch) {
  return {ctx, {WaitOp::test_any, &batch}};
}

}  // namespace a2av
