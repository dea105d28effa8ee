#include "a2av/simnet.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <map>
#include <ostream>
#include <queue>
#include <string>
#include <utility>

#include "a2av/error.hpp"
#include "a2av/rng.hpp"

namespace a2av {

namespace {

/// Consecutive unsuccessful polls by one rank with no completion anywhere
/// before the run is declared livelocked.
constexpr std::uint64_t kMaxFruitlessPolls = 1'000'000;

std::string_view wait_op_name(WaitOp op) {
  switch (op) {
    case WaitOp::wait_all: return "wait_all";
    case WaitOp::wait_any: return "wait_any";
    case WaitOp::test_any: return "test_any";
  }
  return "wait";
}

}  // namespace

std::string format_value(double v) {
  char buf[400];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

void CostModel::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0 || poll_cost < 0 || local_copy_cost < 0)
    throw ConfigError("cost model parameters must be nonnegative");
}

CostModel default_cost_model() {
  CostModel m;
  m.alpha = 1000;
  m.beta = 1;
  m.gamma = 10;
  m.inject_serialize = false;
  m.poll_cost = 50;
  m.local_copy_cost = 0.1;
  return m;
}

SkewProfile SkewProfile::none() { return {}; }

SkewProfile SkewProfile::explicit_offsets_of(std::vector<SimTime> offsets) {
  SkewProfile s;
  s.kind = Kind::explicit_offsets;
  s.offsets = std::move(offsets);
  return s;
}

SkewProfile SkewProfile::uniform(SimTime max_offset, std::uint64_t seed) {
  SkewProfile s;
  s.kind = Kind::uniform;
  s.max_offset = max_offset;
  s.seed = seed;
  return s;
}

SkewProfile SkewProfile::one_rank(int rank, SimTime offset) {
  SkewProfile s;
  s.kind = Kind::one_rank;
  s.rank = rank;
  s.offset = offset;
  return s;
}

SkewProfile SkewProfile::one_rank_seeded(SimTime offset, std::uint64_t seed) {
  SkewProfile s;
  s.kind = Kind::one_rank;
  s.rank = -1;
  s.offset = offset;
  s.seed = seed;
  return s;
}

std::vector<SimTime> SkewProfile::resolve(int n_ranks, std::uint64_t salt) const {
  if (n_ranks < 1) throw ConfigError("skew profile needs at least one rank");
  std::vector<SimTime> out(static_cast<std::size_t>(n_ranks), 0.0);
  switch (kind) {
    case Kind::none:
      break;
    case Kind::explicit_offsets:
      if (static_cast<int>(offsets.size()) != n_ranks)
        throw ConfigError("explicit skew offsets must list every rank");
      for (SimTime t : offsets)
        if (t < 0) throw ConfigError("skew offsets must be nonnegative");
      out = offsets;
      break;
    case Kind::uniform: {
      if (max_offset < 0) throw ConfigError("skew offsets must be nonnegative");
      SplitMix64 rng(derive_seed(seed, salt));
      for (auto& t : out) t = rng.next_double() * max_offset;
      break;
    }
    case Kind::one_rank: {
      if (offset < 0) throw ConfigError("skew offsets must be nonnegative");
      int r = rank;
      if (r < 0) {
        SplitMix64 rng(derive_seed(seed, salt));
        r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_ranks)));
      }
      if (r >= n_ranks) throw ConfigError("skewed rank out of range");
      out[static_cast<std::size_t>(r)] = offset;
      break;
    }
  }
  return out;
}

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::start: return "start";
    case EventKind::send_issue: return "send_issue";
    case EventKind::recv_post: return "recv_post";
    case EventKind::send_complete: return "send_complete";
    case EventKind::arrive_match: return "arrive_match";
    case EventKind::arrive_unexpected: return "arrive_unexpected";
    case EventKind::recv_complete: return "recv_complete";
    case EventKind::retire: return "retire";
    case EventKind::poll: return "poll";
    case EventKind::finish: return "finish";
  }
  return "unknown";
}

void EventTrace::to_csv(std::ostream& os) const {
  os << "time,rank,event,peer,bytes,queue_len\n";
  for (const auto& r : records) {
    os << format_value(r.time) << ',' << r.rank << ',' << event_name(r.kind) << ',' << r.peer
       << ',' << r.bytes << ',' << r.queue_len << '\n';
  }
}

SimTime makespan(const EventTrace& trace) {
  std::map<int, SimTime> start, finish;
  for (const auto& r : trace.records) {
    if (r.kind == EventKind::start) start[r.rank] = r.time;
    if (r.kind == EventKind::finish) finish[r.rank] = r.time;
  }
  if (start.empty()) throw SimError("trace holds no start records");
  SimTime best = 0;
  for (const auto& [rank, t0] : start) {
    auto it = finish.find(rank);
    if (it == finish.end())
      throw SimError("incomplete trace: rank " + std::to_string(rank) + " never finished");
    best = std::max(best, it->second - t0);
  }
  return best;
}

namespace {

enum class EvType : std::uint8_t { start, send_done, arrival, recv_done, poll_return };

struct Message {
  int src = -1;
  int tag = 0;
  std::span<const std::byte> payload;
};

struct Event {
  SimTime time = 0;
  int rank = 0;
  std::uint64_t seq = 0;
  EvType type = EvType::start;
  std::uint64_t handle = 0;     // send_done / recv_done
  Message msg;                  // arrival / recv_done
  std::int64_t match_pos = 0;   // recv_done: 1-based posted-queue depth
};

/// Heap order: earliest time first, ties by rank then push order.
struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.rank != b.rank) return a.rank > b.rank;
    return a.seq > b.seq;
  }
};

struct ReqEntry {
  ReqKind kind = ReqKind::send;
  int peer = -1;
  bool complete = false;
  std::uint64_t bytes = 0;
  std::span<std::byte> capacity;  // recv only
};

struct PostedRecv {
  std::uint64_t id = 0;
  int src = -1;
  int tag = 0;
};

struct RankState {
  SimTime clock = 0;
  SchedTask task;
  bool finished = false;
  SimTime finish_clock = 0;

  bool waiting = false;
  bool poll_parked = false;  // zero-cost poll suspended until the next completion
  WaitRequest wreq{WaitOp::wait_all, nullptr};
  WaitResult* wout = nullptr;
  std::coroutine_handle<> cont;

  std::vector<ReqEntry> reqs;
  std::deque<PostedRecv> posted;
  std::deque<Message> unexpected;

  MatchQueueStats stats;
  std::uint64_t failed_polls = 0;
  std::uint64_t fruitless_polls = 0;
  std::uint64_t completions_at_last_poll = 0;
};

}  // namespace

class SimRankCtx final : public RankCtx {
 public:
  SimRankCtx(SimNet::Impl& eng, int rank) : eng_(eng), rank_(rank) {}

  int rank() const override { return rank_; }
  int n_ranks() const override;
  RequestHandle isend(int peer, std::span<const std::byte> data, int tag) override;
  RequestHandle irecv(int peer, std::span<std::byte> capacity, int tag) override;
  bool wait_ready(const WaitRequest& req, WaitResult& out) override;
  void wait_suspend(const WaitRequest& req, WaitResult* out, std::coroutine_handle<> k) override;

 private:
  SimNet::Impl& eng_;
  int rank_;
};

struct SimNet::Impl {
  int n = 0;
  CostModel cost;
  std::vector<SimTime> skew;
  std::vector<RankState> ranks;
  std::vector<SimRankCtx> ctxs;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::uint64_t next_seq = 0;
  std::vector<SimTime> nic_free;      // per rank, inject_serialize only
  std::vector<SimTime> last_arrival;  // per (src, dst) channel, FIFO clamp
  EventTrace trace_log;
  std::uint64_t total_completions = 0;
  bool ran = false;

  Impl(int n_ranks, CostModel cost_model, std::vector<SimTime> skew_offsets)
      : n(n_ranks), cost(cost_model), skew(std::move(skew_offsets)) {
    if (n < 1) throw ConfigError("simulation needs at least one rank");
    cost.validate();
    if (static_cast<int>(skew.size()) != n)
      throw ConfigError("skew offsets must list every rank");
    for (SimTime t : skew)
      if (t < 0) throw ConfigError("skew offsets must be nonnegative");
    ranks.resize(static_cast<std::size_t>(n));
    ctxs.reserve(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) ctxs.emplace_back(*this, p);
    nic_free.assign(static_cast<std::size_t>(n), 0.0);
    last_arrival.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  }

  RankState& state(int p) { return ranks[static_cast<std::size_t>(p)]; }

  void check_peer(int peer) const {
    if (peer < 0 || peer >= n)
      throw TransportError("peer " + std::to_string(peer) + " out of range for " +
                           std::to_string(n) + " ranks");
  }

  void push(Event e) {
    e.seq = next_seq++;
    queue.push(std::move(e));
  }

  void log(SimTime t, int rank, EventKind k, int peer, std::uint64_t bytes, std::int64_t qlen) {
    trace_log.records.push_back({t, rank, k, peer, bytes, qlen});
  }

  RequestHandle do_isend(int p, int peer, std::span<const std::byte> data, int tag) {
    check_peer(peer);
    auto& rs = state(p);
    const auto nbytes = static_cast<std::uint64_t>(data.size());
    const auto id = static_cast<std::uint64_t>(rs.reqs.size());
    rs.reqs.push_back({ReqKind::send, peer, false, nbytes, {}});
    log(rs.clock, p, EventKind::send_issue, peer, nbytes, -1);

    SimTime done, arr;
    if (peer == p) {
      // loopback: no wire and no injection, only latency plus the local copy
      done = rs.clock;
      arr = rs.clock + cost.alpha + cost.local_copy_cost * static_cast<SimTime>(nbytes);
    } else {
      SimTime inj = cost.inject_serialize
                        ? std::max(rs.clock, nic_free[static_cast<std::size_t>(p)])
                        : rs.clock;
      done = inj + cost.beta * static_cast<SimTime>(nbytes);
      if (cost.inject_serialize) nic_free[static_cast<std::size_t>(p)] = done;
      arr = done + cost.alpha;
    }
    // messages on one (src, dst) channel never overtake each other
    SimTime& chan = last_arrival[static_cast<std::size_t>(p) * static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(peer)];
    arr = std::max(arr, chan);
    chan = arr;

    Event ev;
    ev.time = arr;
    ev.rank = peer;
    ev.type = EvType::arrival;
    ev.msg = {p, tag, data};
    push(std::move(ev));

    if (done == rs.clock) {
      complete_send(p, id, rs.clock);
    } else {
      Event done_ev;
      done_ev.time = done;
      done_ev.rank = p;
      done_ev.type = EvType::send_done;
      done_ev.handle = id;
      push(std::move(done_ev));
    }
    return {id, ReqKind::send, peer};
  }

  RequestHandle do_irecv(int p, int src, std::span<std::byte> capacity, int tag) {
    check_peer(src);
    auto& rs = state(p);
    const auto id = static_cast<std::uint64_t>(rs.reqs.size());
    rs.reqs.push_back({ReqKind::recv, src, false, 0, capacity});
    log(rs.clock, p, EventKind::recv_post, src, static_cast<std::uint64_t>(capacity.size()), -1);

    for (auto it = rs.unexpected.begin(); it != rs.unexpected.end(); ++it) {
      if (it->src != src || it->tag != tag) continue;
      if (it->payload.size() > capacity.size())
        throw TransportError("receive truncation: " + std::to_string(it->payload.size()) +
                             " bytes from rank " + std::to_string(src) + " into " +
                             std::to_string(capacity.size()) + "-byte buffer at rank " +
                             std::to_string(p));
      // buffered message consumed at the posting instant; no match charge
      Message m = *it;
      rs.unexpected.erase(it);
      complete_recv(p, id, m, 0, rs.clock);
      return {id, ReqKind::recv, src};
    }
    rs.posted.push_back({id, src, tag});
    return {id, ReqKind::recv, src};
  }

  void handle_arrival(const Event& e) {
    auto& rs = state(e.rank);
    const Message& m = e.msg;
    std::int64_t pos = 0;
    for (auto it = rs.posted.begin(); it != rs.posted.end(); ++it) {
      ++pos;
      if (it->src != m.src || it->tag != m.tag) continue;
      const std::uint64_t id = it->id;
      auto& req = rs.reqs[id];
      rs.stats.posted_receive_scans += static_cast<std::uint64_t>(pos);
      log(e.time, e.rank, EventKind::arrive_match, m.src,
          static_cast<std::uint64_t>(m.payload.size()), pos);
      if (m.payload.size() > req.capacity.size())
        throw TransportError("receive truncation: " + std::to_string(m.payload.size()) +
                             " bytes from rank " + std::to_string(m.src) + " into " +
                             std::to_string(req.capacity.size()) + "-byte buffer at rank " +
                             std::to_string(e.rank));
      rs.posted.erase(it);
      const SimTime tdone = e.time + cost.gamma * static_cast<SimTime>(pos);
      if (tdone == e.time) {
        complete_recv(e.rank, id, m, pos, e.time);
      } else {
        Event done_ev;
        done_ev.time = tdone;
        done_ev.rank = e.rank;
        done_ev.type = EvType::recv_done;
        done_ev.handle = id;
        done_ev.msg = m;
        done_ev.match_pos = pos;
        push(std::move(done_ev));
      }
      return;
    }
    rs.stats.unexpected_messages += 1;
    log(e.time, e.rank, EventKind::arrive_unexpected, m.src,
        static_cast<std::uint64_t>(m.payload.size()), static_cast<std::int64_t>(rs.posted.size()));
    rs.unexpected.push_back(m);
  }

  void complete_send(int p, std::uint64_t id, SimTime t) {
    auto& rs = state(p);
    auto& req = rs.reqs[id];
    req.complete = true;
    total_completions += 1;
    log(t, p, EventKind::send_complete, req.peer, req.bytes, -1);
    on_completion(p, t);
  }

  void complete_recv(int p, std::uint64_t id, const Message& m, std::int64_t pos, SimTime t) {
    auto& rs = state(p);
    auto& req = rs.reqs[id];
    if (!m.payload.empty()) std::memcpy(req.capacity.data(), m.payload.data(), m.payload.size());
    req.bytes = static_cast<std::uint64_t>(m.payload.size());
    req.complete = true;
    total_completions += 1;
    log(t, p, EventKind::recv_complete, m.src, req.bytes, pos);
    on_completion(p, t);
  }

  bool is_complete(int p, const RequestHandle& h) const {
    return ranks[static_cast<std::size_t>(p)].reqs[h.id].complete;
  }

  void retire_slot(int p, RequestBatch& batch, int slot, SimTime t) {
    const auto& h = batch.at(slot);
    log(t, p, EventKind::retire, h.peer, state(p).reqs[h.id].bytes, -1);
    batch.retire(slot);
  }

  /// A handle of rank p completed at time t; satisfy its pending wait if any.
  void on_completion(int p, SimTime t) {
    auto& rs = state(p);
    if (!rs.waiting) return;
    auto& batch = *rs.wreq.batch;
    switch (rs.wreq.op) {
      case WaitOp::wait_all: {
        for (int i = 0; i < batch.size(); ++i)
          if (batch.holds(i) && !is_complete(p, batch.at(i))) return;
        for (int i = 0; i < batch.size(); ++i)
          if (batch.holds(i)) retire_slot(p, batch, i, t);
        *rs.wout = {true, kUndefinedIndex};
        resume_rank(p, t);
        return;
      }
      case WaitOp::wait_any: {
        for (int i = 0; i < batch.size(); ++i) {
          if (batch.holds(i) && is_complete(p, batch.at(i))) {
            retire_slot(p, batch, i, t);
            *rs.wout = {true, i};
            resume_rank(p, t);
            return;
          }
        }
        return;
      }
      case WaitOp::test_any: {
        // a timed poll returns only through its poll_return event
        if (!rs.poll_parked) return;
        *rs.wout = {false, kUndefinedIndex};
        resume_rank(p, t);
        return;
      }
    }
  }

  bool do_wait_ready(int p, const WaitRequest& req, WaitResult& out) {
    auto& rs = state(p);
    auto& batch = *req.batch;
    switch (req.op) {
      case WaitOp::wait_all: {
        for (int i = 0; i < batch.size(); ++i)
          if (batch.holds(i) && !is_complete(p, batch.at(i))) return false;
        for (int i = 0; i < batch.size(); ++i)
          if (batch.holds(i)) retire_slot(p, batch, i, rs.clock);
        out = {true, kUndefinedIndex};
        return true;
      }
      case WaitOp::wait_any: {
        if (batch.all_retired()) {
          out = {true, kUndefinedIndex};
          return true;
        }
        for (int i = 0; i < batch.size(); ++i) {
          if (batch.holds(i) && is_complete(p, batch.at(i))) {
            retire_slot(p, batch, i, rs.clock);
            out = {true, i};
            return true;
          }
        }
        return false;
      }
      case WaitOp::test_any: {
        if (batch.all_retired()) {
          out = {true, kUndefinedIndex};
          return true;
        }
        for (int i = 0; i < batch.size(); ++i) {
          if (batch.holds(i) && is_complete(p, batch.at(i))) {
            retire_slot(p, batch, i, rs.clock);
            out = {true, i};
            return true;
          }
        }
        rs.failed_polls += 1;
        if (total_completions == rs.completions_at_last_poll) {
          rs.fruitless_polls += 1;
          if (rs.fruitless_polls > kMaxFruitlessPolls)
            throw SimError("livelock: rank " + std::to_string(p) + " polled " +
                           std::to_string(rs.fruitless_polls) +
                           " times with no completion anywhere; pending [" + pending_summary(p, batch) +
                           "]");
        } else {
          rs.fruitless_polls = 1;
          rs.completions_at_last_poll = total_completions;
        }
        log(rs.clock, p, EventKind::poll, -1, 0, -1);
        if (cost.poll_cost > 0) {
          Event ev;
          ev.time = rs.clock + cost.poll_cost;
          ev.rank = p;
          ev.type = EvType::poll_return;
          push(std::move(ev));
        }
        return false;
      }
    }
    return false;
  }

  void do_wait_suspend(int p, const WaitRequest& req, WaitResult* out, std::coroutine_handle<> k) {
    auto& rs = state(p);
    rs.waiting = true;
    rs.poll_parked = req.op == WaitOp::test_any && cost.poll_cost == 0;
    rs.wreq = req;
    rs.wout = out;
    rs.cont = k;
  }

  void resume_rank(int p, SimTime t) {
    auto& rs = state(p);
    rs.clock = std::max(rs.clock, t);
    rs.waiting = false;
    rs.poll_parked = false;
    auto k = std::exchange(rs.cont, {});
    k.resume();
    after_resume(p);
  }

  void after_resume(int p) {
    auto& rs = state(p);
    if (!rs.task.done()) return;
    rs.task.check();
    rs.finished = true;
    rs.finish_clock = rs.clock;
    log(rs.clock, p, EventKind::finish, -1, 0, -1);
  }

  void dispatch(const Event& e) {
    switch (e.type) {
      case EvType::start: {
        auto& rs = state(e.rank);
        rs.clock = e.time;
        log(e.time, e.rank, EventKind::start, -1, 0, -1);
        rs.task.resume();
        after_resume(e.rank);
        return;
      }
      case EvType::send_done:
        complete_send(e.rank, e.handle, e.time);
        return;
      case EvType::arrival:
        handle_arrival(e);
        return;
      case EvType::recv_done:
        complete_recv(e.rank, e.handle, e.msg, e.match_pos, e.time);
        return;
      case EvType::poll_return: {
        auto& rs = state(e.rank);
        *rs.wout = {false, kUndefinedIndex};
        resume_rank(e.rank, e.time);
        return;
      }
    }
  }

  std::string pending_summary(int p, const RequestBatch& batch) const {
    std::string out;
    for (int i = 0; i < batch.size(); ++i) {
      if (!batch.holds(i) || is_complete(p, batch.at(i))) continue;
      if (!out.empty()) out += ", ";
      const auto& h = batch.at(i);
      out += h.kind == ReqKind::send ? "send to " : "recv from ";
      out += std::to_string(h.peer);
    }
    if (out.empty()) out = "nothing";
    return out;
  }

  void fail_deadlock() const {
    std::string msg = "simulation deadlock:";
    for (int p = 0; p < n; ++p) {
      const auto& rs = ranks[static_cast<std::size_t>(p)];
      if (rs.finished) continue;
      msg += " rank " + std::to_string(p);
      if (rs.waiting)
        msg += " stuck in " + std::string(wait_op_name(rs.wreq.op)) + " on [" +
               pending_summary(p, *rs.wreq.batch) + "];";
      else
        msg += " never reached a wait;";
    }
    throw SimError(msg);
  }

  void run(const RankTaskFactory& factory) {
    if (ran) throw SimError("simulation already ran");
    ran = true;
    for (int p = 0; p < n; ++p) state(p).task = factory(ctxs[static_cast<std::size_t>(p)]);
    for (int p = 0; p < n; ++p) {
      Event ev;
      ev.time = skew[static_cast<std::size_t>(p)];
      ev.rank = p;
      ev.type = EvType::start;
      push(std::move(ev));
    }
    while (!queue.empty()) {
      Event e = queue.top();
      queue.pop();
      dispatch(e);
    }
    for (int p = 0; p < n; ++p)
      if (!state(p).finished) fail_deadlock();
  }
};

int SimRankCtx::n_ranks() const { return eng_.n; }

RequestHandle SimRankCtx::isend(int peer, std::span<const std::byte> data, int tag) {
  return eng_.do_isend(rank_, peer, data, tag);
}

RequestHandle SimRankCtx::irecv(int peer, std::span<std::byte> capacity, int tag) {
  return eng_.do_irecv(rank_, peer, capacity, tag);
}

bool SimRankCtx::wait_ready(const WaitRequest& req, WaitResult& out) {
  return eng_.do_wait_ready(rank_, req, out);
}

void SimRankCtx::wait_suspend(const WaitRequest& req, WaitResult* out, std::coroutine_handle<> k) {
  eng_.do_wait_suspend(rank_, req, out, k);
}

SimNet::SimNet(int n_ranks, CostModel cost, std::vector<SimTime> skew_offsets)
    : impl_(std::make_unique<Impl>(n_ranks, cost, std::move(skew_offsets))) {}

SimNet::~SimNet() = default;

void SimNet::run(const RankTaskFactory& factory) { impl_->run(factory); }

const EventTrace& SimNet::trace() const { return impl_->trace_log; }

std::vector<SimTime> SimNet::finish_durations() const {
  if (!impl_->ran) throw SimError("simulation has not run");
  std::vector<SimTime> out(static_cast<std::size_t>(impl_->n));
  for (int p = 0; p < impl_->n; ++p) {
    const auto& rs = impl_->ranks[static_cast<std::size_t>(p)];
    if (!rs.finished) throw SimError("rank " + std::to_string(p) + " never finished");
    out[static_cast<std::size_t>(p)] = rs.finish_clock - impl_->skew[static_cast<std::size_t>(p)];
  }
  return out;
}

const MatchQueueStats& SimNet::stats(int rank) const {
  return impl_->ranks.at(static_cast<std::size_t>(rank)).stats;
}

std::uint64_t SimNet::failed_polls(int rank) const {
  return impl_->ranks.at(static_cast<std::size_t>(rank)).failed_polls;
}

SimResult simulate(const ExchangePlan& plan, ScheduleKind kind, const CostModel& cost,
                   const SkewProfile& skew, int stride, std::uint64_t seed) {
  plan.validate();
  const int n = plan.n_ranks;
  SimNet net(n, cost, skew.resolve(n, seed));
  std::vector<RankBuffers> bufs;
  bufs.reserve(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) bufs.push_back(fill_pattern(plan, p));
  net.run([&](RankCtx& ctx) {
    auto& b = bufs[static_cast<std::size_t>(ctx.rank())];
    return run_schedule(kind, ctx, plan, b.send_buf, b.recv_buf, stride, 0);
  });

  SimResult r;
  r.finish = net.finish_durations();
  r.trace = net.trace();
  r.recv_bufs.reserve(static_cast<std::size_t>(n));
  r.stats.reserve(static_cast<std::size_t>(n));
  r.failed_polls.reserve(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    r.recv_bufs.push_back(std::move(bufs[static_cast<std::size_t>(p)].recv_buf));
    r.stats.push_back(net.stats(p));
    r.failed_polls.push_back(net.failed_polls(p));
  }
  return r;
}

}  // namespace a2av
