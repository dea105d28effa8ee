#include "a2av/schedules.hpp"

#include <algorithm>
#include <cstring>
#include <string>
#include <utility>

namespace a2av {

namespace {

std::span<const std::byte> send_region(const ExchangePlan& plan,
                                       std::span<const std::byte> send_buf, int p, int q) {
  return send_buf.subspan(plan.send_offset_bytes(p, q), plan.send_bytes(p, q));
}

std::span<std::byte> recv_region(const ExchangePlan& plan, std::span<std::byte> recv_buf, int p,
                                 int q) {
  return recv_buf.subspan(plan.recv_offset_bytes(p, q), plan.recv_bytes(p, q));
}

}  // namespace

std::string_view schedule_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::pairwise: return "pairwise";
    case ScheduleKind::nonblocking: return "nonblocking";
    case ScheduleKind::multipair_waitall: return "multipair-waitall";
    case ScheduleKind::multipair_waitany: return "multipair-waitany";
    case ScheduleKind::multipair_testany: return "multipair-testany";
  }
  throw ConfigError("unhandled schedule kind");
}

ScheduleKind schedule_from_name(std::string_view name) {
  for (ScheduleKind kind : kAllSchedules)
    if (schedule_name(kind) == name) return kind;
  throw ConfigError("unknown schedule: " + std::string(name));
}

bool uses_stride(ScheduleKind kind) {
  return kind == ScheduleKind::multipair_waitall || kind == ScheduleKind::multipair_waitany ||
         kind == ScheduleKind::multipair_testany;
}

int partner_send(int p, int i, int n) { return (p + i) % n; }

int partner_recv(int p, int i, int n) { return (p + n - i % n) % n; }

SchedTask run_pairwise(RankCtx& ctx, const ExchangePlan& plan, std::span<const std::byte> send_buf,
                       std::span<std::byte> recv_buf, int tag) {
  const int n = plan.n_ranks;
  const int p = ctx.rank();
  for (int i = 0; i < n; ++i) {
    const int dst = partner_send(p, i, n);
    const int src = partner_recv(p, i, n);
    RequestBatch batch;
    batch.add(ctx.isend(dst, send_region(plan, send_buf, p, dst), tag));
    batch.add(ctx.irecv(src, recv_region(plan, recv_buf, p, src), tag));
    co_await wait_all(ctx, batch);
  }
}

SchedTask run_nonblocking(RankCtx& ctx, const ExchangePlan& plan,
                          std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                          int tag) {
  const int n = plan.n_ranks;
  const int p = ctx.rank();
  RequestBatch batch;
  for (int i = 0; i < n; ++i) {
    const int dst = partner_send(p, i, n);
    const int src = partner_recv(p, i, n);
    batch.add(ctx.isend(dst, send_region(plan, send_buf, p, dst), tag));
    batch.add(ctx.irecv(src, recv_region(plan, recv_buf, p, src), tag));
  }
  co_await wait_all(ctx, batch);
}

SchedTask run_multipair_waitall(RankCtx& ctx, const ExchangePlan& plan,
                                std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                                int stride, int tag) {
  const int n = plan.n_ranks;
  const int p = ctx.rank();
  RequestBatch batch;
  for (int i = 0; i < n; ++i) {
    const int dst = partner_send(p, i, n);
    const int src = partner_recv(p, i, n);
    batch.add(ctx.isend(dst, send_region(plan, send_buf, p, dst), tag));
    batch.add(ctx.irecv(src, recv_region(plan, recv_buf, p, src), tag));
    if ((i + 1) % stride == 0) {
      co_await wait_all(ctx, batch);
      batch.clear();
    }
  }
  if (batch.size() > 0) co_await wait_all(ctx, batch);
}

namespace {

// Shared issue/refill skeleton of the waitany and testany variants. Primes
// min(stride, n) pairs; sends live at even slots, receives at odd slots, and
// a retired slot is refilled with the next un-issued request of its kind.
struct MultipairState {
  int sends_issued = 0;
  int recvs_issued = 0;

  void prime(RankCtx& ctx, const ExchangePlan& plan, std::span<const std::byte> send_buf,
             std::span<std::byte> recv_buf, int stride, int tag, RequestBatch& batch) {
    const int n = plan.n_ranks;
    const int p = ctx.rank();
    const int primed = std::min(stride, n);
    for (int i = 0; i < primed; ++i) {
      const int dst = partner_send(p, i, n);
      const int src = partner_recv(p, i, n);
      batch.add(ctx.isend(dst, send_region(plan, send_buf, p, dst), tag));
      batch.add(ctx.irecv(src, recv_region(plan, recv_buf, p, src), tag));
    }
    sends_issued = primed;
    recvs_issued = primed;
  }

  void refill(RankCtx& ctx, const ExchangePlan& plan, std::span<const std::byte> send_buf,
              std::span<std::byte> recv_buf, int tag, RequestBatch& batch, int slot) {
    const int n = plan.n_ranks;
    const int p = ctx.rank();
    if (slot % 2 == 0) {
      if (sends_issued < n) {
        const int dst = partner_send(p, sends_issued, n);
        batch.put(slot, ctx.isend(dst, send_region(plan, send_buf, p, dst), tag));
        ++sends_issued;
      }
    } else {
      if (recvs_issued < n) {
        const int src = partner_recv(p, recvs_issued, n);
        batch.put(slot, ctx.irecv(src, recv_region(plan, recv_buf, p, src), tag));
        ++recvs_issued;
      }
    }
  }
};

}  // namespace

SchedTask run_multipair_waitany(RankCtx& ctx, const ExchangePlan& plan,
                                std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                                int stride, int tag) {
  const int n = plan.n_ranks;
  MultipairState st;
  RequestBatch batch;
  st.prime(ctx, plan, send_buf, recv_buf, stride, tag, batch);
  if (stride > n) {
    co_await wait_all(ctx, batch);
    co_return;
  }
  for (;;) {
    const WaitResult r = co_await wait_any(ctx, batch);
    if (r.index == kUndefinedIndex) break;
    st.refill(ctx, plan, send_buf, recv_buf, tag, batch, r.index);
  }
}

SchedTask run_multipair_testany(RankCtx& ctx, const ExchangePlan& plan,
                                std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                                int stride, int tag, PollHook hook) {
  const int n = plan.n_ranks;
  MultipairState st;
  RequestBatch batch;
  st.prime(ctx, plan, send_buf, recv_buf, stride, tag, batch);
  if (stride > n) {
    co_await wait_all(ctx, batch);
    co_return;
  }
  for (;;) {
    WaitResult r;
    for (;;) {
      r = co_await test_any(ctx, batch);
      if (r.flag) break;
      if (hook) hook();
    }
    if (r.index == kUndefinedIndex) break;
    st.refill(ctx, plan, send_buf, recv_buf, tag, batch, r.index);
  }
}

SchedTask run_schedule(ScheduleKind kind, RankCtx& ctx, const ExchangePlan& plan,
                       std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                       int stride, int tag) {
  if (uses_stride(kind) && stride < 1)
    throw ConfigError("stride must be >= 1 for " + std::string(schedule_name(kind)));
  switch (kind) {
    case ScheduleKind::pairwise: return run_pairwise(ctx, plan, send_buf, recv_buf, tag);
    case ScheduleKind::nonblocking: return run_nonblocking(ctx, plan, send_buf, recv_buf, tag);
    case ScheduleKind::multipair_waitall:
      return run_multipair_waitall(ctx, plan, send_buf, recv_buf, stride, tag);
    case ScheduleKind::multipair_waitany:
      return run_multipair_waitany(ctx, plan, send_buf, recv_buf, stride, tag);
    case ScheduleKind::multipair_testany:
      return run_multipair_testany(ctx, plan, send_buf, recv_buf, stride, tag);
  }
  throw ConfigError("unhandled schedule kind");
}

std::vector<std::vector<std::byte>> oracle_alltoallv(
    const ExchangePlan& plan, const std::vector<std::span<const std::byte>>& send_bufs) {
  const int n = plan.n_ranks;
  std::vector<std::vector<std::byte>> out(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q)
    out[static_cast<std::size_t>(q)].resize(plan.recv_buf_elems(q) *
                                            static_cast<std::size_t>(plan.elem_size));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const std::size_t bytes = plan.send_bytes(p, q);
      if (bytes == 0) continue;
      std::memcpy(out[static_cast<std::size_t>(q)].data() + plan.recv_offset_bytes(q, p),
                  send_bufs[static_cast<std::size_t>(p)].data() + plan.send_offset_bytes(p, q),
                  bytes);
    }
  return out;
}

}  // namespace a2av
