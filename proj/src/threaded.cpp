#include "a2av/threaded.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <thread>

namespace a2av {

struct ThreadedTransport::Endpoint {
  struct PostedRecv {
    int src;
    int tag;
    std::span<std::byte> capacity;
    std::uint64_t id;
  };
  struct Unexpected {
    int src;
    int tag;
    std::vector<std::byte> payload;
  };

  std::mutex mu;
  std::condition_variable cv;
  std::deque<PostedRecv> posted;
  std::deque<Unexpected> unexpected;
  std::vector<char> complete;  // indexed by request id, owner-rank scope
  MatchQueueStats stats;
  std::atomic<bool> abort{false};
};

class ThreadedRankCtx final : public RankCtx {
 public:
  ThreadedRankCtx(ThreadedTransport& t, int rank) : t_(t), rank_(rank) {}

  int rank() const override { return rank_; }
  int n_ranks() const override { return t_.n_ranks(); }

  RequestHandle isend(int peer, std::span<const std::byte> data, int tag) override {
    return t_.issue_send(rank_, peer, data, tag);
  }
  RequestHandle irecv(int peer, std::span<std::byte> capacity, int tag) override {
    return t_.issue_recv(rank_, peer, capacity, tag);
  }
  bool wait_ready(const WaitRequest& req, WaitResult& out) override {
    return t_.wait(rank_, req, out);
  }
  void wait_suspend(const WaitRequest&, WaitResult*, std::coroutine_handle<>) override {
    throw TransportError("threaded transport waits never suspend");
  }

 private:
  ThreadedTransport& t_;
  int rank_;
};

namespace {
int checked_rank_count(int n) {
  if (n < 1) throw TransportError("transport needs at least one rank");
  return n;
}
}  // namespace

ThreadedTransport::ThreadedTransport(int n_ranks)
    : n_(checked_rank_count(n_ranks)), sync_(n_ranks) {
  endpoints_.reserve(static_cast<std::size_t>(n_));
  for (int r = 0; r < n_; ++r) endpoints_.push_back(std::make_unique<Endpoint>());
}

ThreadedTransport::~ThreadedTransport() = default;

void ThreadedTransport::check_peer(int peer) const {
  if (peer < 0 || peer >= n_)
    throw TransportError("peer " + std::to_string(peer) + " outside communicator of size " +
                         std::to_string(n_));
}

RequestHandle ThreadedTransport::issue_send(int rank, int peer, std::span<const std::byte> data,
                                            int tag) {
  check_peer(peer);
  Endpoint& me = *endpoints_[static_cast<std::size_t>(rank)];
  std::uint64_t id;
  {
    std::lock_guard lk(me.mu);
    id = me.complete.size();
    me.complete.push_back(1);  // eager: the send is complete once issued
  }
  Endpoint& dst = *endpoints_[static_cast<std::size_t>(peer)];
  {
    std::lock_guard lk(dst.mu);
    for (std::size_t i = 0; i < dst.posted.size(); ++i) {
      Endpoint::PostedRecv& pr = dst.posted[i];
      if (pr.src != rank || pr.tag != tag) continue;
      dst.stats.posted_receive_scans += i + 1;
      if (pr.capacity.size() < data.size())
        throw TransportError("message of " + std::to_string(data.size()) + " bytes from rank " +
                             std::to_string(rank) + " truncates receive capacity " +
                             std::to_string(pr.capacity.size()) + " at rank " +
                             std::to_string(peer));
      std::copy(data.begin(), data.end(), pr.capacity.begin());
      dst.complete[pr.id] = 1;
      dst.posted.erase(dst.posted.begin() + static_cast<std::ptrdiff_t>(i));
      dst.cv.notify_all();
      return {id, ReqKind::send, peer};
    }
    dst.stats.unexpected_messages += 1;
    dst.unexpected.push_back({rank, tag, std::vector<std::byte>(data.begin(), data.end())});
  }
  return {id, ReqKind::send, peer};
}

RequestHandle ThreadedTransport::issue_recv(int rank, int peer, std::span<std::byte> capacity,
                                            int tag) {
  check_peer(peer);
  Endpoint& me = *endpoints_[static_cast<std::size_t>(rank)];
  std::lock_guard lk(me.mu);
  const std::uint64_t id = me.complete.size();
  me.complete.push_back(0);
  for (std::size_t i = 0; i < me.unexpected.size(); ++i) {
    Endpoint::Unexpected& u = me.unexpected[i];
    if (u.src != peer || u.tag != tag) continue;
    if (capacity.size() < u.payload.size())
      throw TransportError("buffered message of " + std::to_string(u.payload.size()) +
                           " bytes from rank " + std::to_string(peer) +
                           " truncates receive capacity " + std::to_string(capacity.size()) +
                           " at rank " + std::to_string(rank));
    std::copy(u.payload.begin(), u.payload.end(), capacity.begin());
    me.complete[id] = 1;
    me.unexpected.erase(me.unexpected.begin() + static_cast<std::ptrdiff_t>(i));
    return {id, ReqKind::recv, peer};
  }
  me.posted.push_back({peer, tag, capacity, id});
  return {id, ReqKind::recv, peer};
}

bool ThreadedTransport::wait(int rank, const WaitRequest& req, WaitResult& out) {
  Endpoint& me = *endpoints_[static_cast<std::size_t>(rank)];
  RequestBatch& batch = *req.batch;
  auto slot_complete = [&](int i) { return me.complete[batch.at(i).id] != 0; };
  auto throw_if_aborted = [&] {
    if (me.abort.load(std::memory_order_relaxed))
      throw TransportError("transport aborted after a peer failure");
  };

  std::unique_lock lk(me.mu);
  switch (req.op) {
    case WaitOp::wait_all: {
      me.cv.wait(lk, [&] {
        if (me.abort.load(std::memory_order_relaxed)) return true;
        for (int i = 0; i < batch.size(); ++i)
          if (batch.holds(i) && !slot_complete(i)) return false;
        return true;
      });
      throw_if_aborted();
      for (int i = 0; i < batch.size(); ++i)
        if (batch.holds(i)) batch.retire(i);
      out = {true, kUndefinedIndex};
      return true;
    }
    case WaitOp::wait_any: {
      if (batch.all_retired()) {
        out = {true, kUndefinedIndex};
        return true;
      }
      int found = -1;
      me.cv.wait(lk, [&] {
        if (me.abort.load(std::memory_order_relaxed)) return true;
        for (int i = 0; i < batch.size(); ++i)
          if (batch.holds(i) && slot_complete(i)) {
            found = i;
            return true;
          }
        return false;
      });
      throw_if_aborted();
      batch.retire(found);
      out = {true, found};
      return true;
    }
    case WaitOp::test_any: {
      throw_if_aborted();
      if (batch.all_retired()) {
        out = {true, kUndefinedIndex};
        return true;
      }
      for (int i = 0; i < batch.size(); ++i)
        if (batch.holds(i) && slot_complete(i)) {
          batch.retire(i);
          out = {true, i};
          return true;
        }
      lk.unlock();
      std::this_thread::yield();  // keep a polling rank from starving completers
      out = {false, kUndefinedIndex};
      return true;
    }
  }
  throw TransportError("unhandled wait op");
}

void ThreadedTransport::abort_all() {
  for (auto& ep : endpoints_) {
    std::lock_guard lk(ep->mu);
    ep->abort.store(true, std::memory_order_relaxed);
    ep->cv.notify_all();
  }
}

void ThreadedTransport::barrier() { sync_.arrive_and_wait(); }

const MatchQueueStats& ThreadedTransport::stats(int rank) const {
  return endpoints_[static_cast<std::size_t>(rank)]->stats;
}

std::vector<double> ThreadedTransport::run(const RankTaskFactory& factory) {
  std::vector<double> durations(static_cast<std::size_t>(n_), 0.0);
  std::mutex err_mu;
  std::exception_ptr first_error;  // root failure; secondary aborted-wait
                                   // errors can only occur after it is set
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_));
  for (int r = 0; r < n_; ++r) {
    threads.emplace_back([&, r] {
      ThreadedRankCtx ctx(*this, r);
      try {
        sync_.arrive_and_wait();
        const auto t0 = std::chrono::steady_clock::now();
        SchedTask task = factory(ctx);
        task.resume();
        task.check();
        durations[static_cast<std::size_t>(r)] = static_cast<double>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
                .count());
      } catch (...) {
        {
          std::lock_guard lk(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
        abort_all();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return durations;
}

}  // namespace a2av
