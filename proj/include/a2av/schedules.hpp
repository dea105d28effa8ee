#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "a2av/plan.hpp"
#include "a2av/transport.hpp"

namespace a2av {

enum class ScheduleKind {
  pairwise,
  nonblocking,
  multipair_waitall,
  multipair_waitany,
  multipair_testany,
};

inline constexpr ScheduleKind kAllSchedules[] = {
    ScheduleKind::pairwise,          ScheduleKind::nonblocking,
    ScheduleKind::multipair_waitall, ScheduleKind::multipair_waitany,
    ScheduleKind::multipair_testany,
};

/// Config/CLI name of the schedule, e.g. "multipair-waitany".
std::string_view schedule_name(ScheduleKind kind);

/// Inverse of schedule_name; throws ConfigError on an unknown name.
ScheduleKind schedule_from_name(std::string_view name);

/// True for the kinds whose behavior depends on the stride parameter.
bool uses_stride(ScheduleKind kind);

/// Step-i send partner (p + i) mod n.
int partner_send(int p, int i, int n);

/// Step-i receive partner (p + n - i) mod n, always in [0, n).
int partner_recv(int p, int i, int n);

/// Invoked after each unsuccessful poll of the testany schedule; lets a
/// caller overlap other work with polling. No-op when empty.
using PollHook = std::function<void()>;

SchedTask run_pairwise(RankCtx& ctx, const ExchangePlan& plan, std::span<const std::byte> send_buf,
                       std::span<std::byte> recv_buf, int tag);

SchedTask run_nonblocking(RankCtx& ctx, const ExchangePlan& plan,
                          std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                          int tag);

SchedTask run_multipair_waitall(RankCtx& ctx, const ExchangePlan& plan,
                                std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                                int stride, int tag);

SchedTask run_multipair_waitany(RankCtx& ctx, const ExchangePlan& plan,
                                std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                                int stride, int tag);

SchedTask run_multipair_testany(RankCtx& ctx, const ExchangePlan& plan,
                                std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                                int stride, int tag, PollHook hook = {});

/// Dispatch by kind. stride is ignored by pairwise/nonblocking; the multipair
/// kinds require stride >= 1 (ConfigError otherwise).
SchedTask run_schedule(ScheduleKind kind, RankCtx& ctx, const ExchangePlan& plan,
                       std::span<const std::byte> send_buf, std::span<std::byte> recv_buf,
                       int stride, int tag);

/// Ground truth: direct permutation copy with no transport. Element block
/// sent by p to q lands at q's rdispls[q][p].
std::vector<std::vector<std::byte>> oracle_alltoallv(
    const ExchangePlan& plan, const std::vector<std::span<const std::byte>>& send_bufs);

}  // namespace a2av
