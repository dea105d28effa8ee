#include "a2av/bench.hpp"

#include <ostream>
#include <sstream>
#include <utility>

#include "a2av/error.hpp"
#include "a2av/rng.hpp"
#include "a2av/threaded.hpp"

namespace a2av {

std::string_view transport_name(TransportKind kind) {
  switch (kind) {
    case TransportKind::threaded: return "threaded";
    case TransportKind::simnet: return "simnet";
  }
  return "unknown";
}

TransportKind transport_from_name(std::string_view name) {
  if (name == "threaded") return TransportKind::threaded;
  if (name == "simnet") return TransportKind::simnet;
  throw ConfigError("unknown transport '" + std::string(name) + "'");
}

WorkloadSpec WorkloadSpec::uniform(Count count, int elem_size) {
  WorkloadSpec w;
  w.kind = Kind::uniform;
  w.count = count;
  w.elem_size = elem_size;
  return w;
}

WorkloadSpec WorkloadSpec::fft_transpose(Count grid_x, Count grid_y, int proc_rows, int proc_cols,
                                         int elem_size) {
  WorkloadSpec w;
  w.kind = Kind::fft_transpose;
  w.grid_x = grid_x;
  w.grid_y = grid_y;
  w.proc_rows = proc_rows;
  w.proc_cols = proc_cols;
  w.elem_size = elem_size;
  return w;
}

WorkloadSpec WorkloadSpec::random(Count max_count, int elem_size) {
  WorkloadSpec w;
  w.kind = Kind::random;
  w.max_count = max_count;
  w.elem_size = elem_size;
  return w;
}

std::string WorkloadSpec::label() const {
  switch (kind) {
    case Kind::uniform:
      return "uniform-c" + std::to_string(count) + "-e" + std::to_string(elem_size);
    case Kind::fft_transpose:
      return "fft-g" + std::to_string(grid_x) + "x" + std::to_string(grid_y) + "-p" +
             std::to_string(proc_rows) + "x" + std::to_string(proc_cols) + "-e" +
             std::to_string(elem_size);
    case Kind::random:
      return "random-m" + std::to_string(max_count) + "-e" + std::to_string(elem_size);
  }
  return "unknown";
}

ExchangePlan WorkloadSpec::build(int n_ranks, std::uint64_t seed) const {
  switch (kind) {
    case Kind::uniform:
      return uniform_plan(n_ranks, count, elem_size);
    case Kind::fft_transpose:
      if (proc_rows < 1 || proc_cols < 1 || proc_rows * proc_cols != n_ranks)
        throw ConfigError("fft workload process grid " + std::to_string(proc_rows) + "x" +
                          std::to_string(proc_cols) + " does not cover " +
                          std::to_string(n_ranks) + " ranks");
      return fft_transpose_plan(grid_x, grid_y, proc_rows, proc_cols, elem_size);
    case Kind::random:
      return random_plan(n_ranks, max_count, elem_size, seed);
  }
  throw ConfigError("unknown workload kind");
}

void RunConfig::validate() const {
  if (n_ranks < 1) throw ConfigError("n_ranks must be at least 1");
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (uses_stride(schedule) && stride < 1) throw ConfigError("stride must be at least 1");
  cost.validate();
  if (transport == TransportKind::threaded && skew.kind != SkewProfile::Kind::none)
    throw ConfigError("skew profiles apply to the simnet transport only");
}

std::string_view RunConfig::time_unit() const {
  return transport == TransportKind::threaded ? "ns" : "sim";
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "schedule,transport,n_ranks,stride,workload,repeats,seed,time_unit,"
        "min,avg,max,makespan,status\n";
  for (const auto& r : rows) {
    os << r.schedule << ',' << r.transport << ',' << r.n_ranks << ',' << r.stride << ','
       << r.workload << ',' << r.repeats << ',' << r.seed << ',' << r.time_unit << ','
       << format_value(r.min) << ',' << format_value(r.avg) << ',' << format_value(r.max) << ','
       << format_value(r.makespan) << ',' << r.status << '\n';
  }
}

namespace {

/// Threaded exchange of one repeat; durations are wall nanoseconds per rank.
std::vector<double> run_threaded(const RunConfig& cfg, const ExchangePlan& plan,
                                 std::vector<std::vector<std::byte>>* recv_out) {
  ThreadedTransport transport(cfg.n_ranks);
  std::vector<RankBuffers> bufs;
  bufs.reserve(static_cast<std::size_t>(cfg.n_ranks));
  for (int p = 0; p < cfg.n_ranks; ++p) bufs.push_back(fill_pattern(plan, p));
  auto durations = transport.run([&](RankCtx& ctx) {
    auto& b = bufs[static_cast<std::size_t>(ctx.rank())];
    return run_schedule(cfg.schedule, ctx, plan, b.send_buf, b.recv_buf, cfg.stride, 0);
  });
  if (recv_out) {
    recv_out->clear();
    for (int p = 0; p < cfg.n_ranks; ++p)
      recv_out->push_back(std::move(bufs[static_cast<std::size_t>(p)].recv_buf));
  }
  return durations;
}

ResultRow row_shell(const RunConfig& cfg) {
  ResultRow row;
  row.schedule = std::string(schedule_name(cfg.schedule));
  row.transport = std::string(transport_name(cfg.transport));
  row.n_ranks = cfg.n_ranks;
  row.stride = uses_stride(cfg.schedule) ? cfg.stride : 1;
  row.workload = cfg.workload.label();
  row.repeats = cfg.repeats;
  row.seed = cfg.seed;
  row.time_unit = std::string(cfg.time_unit());
  return row;
}

}  // namespace

std::vector<double> run_repeat(const RunConfig& cfg, int repeat_index) {
  cfg.validate();
  auto plan = cfg.workload.build(cfg.n_ranks, cfg.seed);
  plan.validate();
  if (cfg.transport == TransportKind::simnet) {
    auto res = simulate(plan, cfg.schedule, cfg.cost, cfg.skew, cfg.stride,
                        derive_seed(cfg.seed, static_cast<std::uint64_t>(repeat_index)));
    return res.finish;
  }
  return run_threaded(cfg, plan, nullptr);
}

ResultRow run_config(const RunConfig& cfg) {
  cfg.validate();
  ResultRow row = row_shell(cfg);
  try {
    std::vector<std::vector<double>> reps;
    reps.reserve(static_cast<std::size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r) reps.push_back(run_repeat(cfg, r));
    auto st = summarize(reps, cfg.best_per_metric);
    row.min = st.min;
    row.avg = st.avg;
    row.max = st.max;
    row.makespan = st.makespan;
  } catch (const SimError&) {
    row.status = "sim-error";
  } catch (const TransportError&) {
    row.status = "transport-error";
  }
  return row;
}

bool verify_delivery(const ExchangePlan& plan,
                     const std::vector<std::vector<std::byte>>& recv_bufs) {
  if (static_cast<int>(recv_bufs.size()) != plan.n_ranks) return false;
  std::vector<RankBuffers> ref;
  std::vector<std::span<const std::byte>> views;
  ref.reserve(static_cast<std::size_t>(plan.n_ranks));
  for (int p = 0; p < plan.n_ranks; ++p) ref.push_back(fill_pattern(plan, p));
  for (int p = 0; p < plan.n_ranks; ++p) views.emplace_back(ref[static_cast<std::size_t>(p)].send_buf);
  auto want = oracle_alltoallv(plan, views);
  for (int p = 0; p < plan.n_ranks; ++p)
    if (recv_bufs[static_cast<std::size_t>(p)] != want[static_cast<std::size_t>(p)]) return false;
  return true;
}

bool verify_config(const RunConfig& cfg, std::string& details) {
  cfg.validate();
  std::ostringstream repro;
  repro << "schedule=" << schedule_name(cfg.schedule)
        << " transport=" << transport_name(cfg.transport) << " n_ranks=" << cfg.n_ranks
        << " stride=" << cfg.stride << " workload=" << cfg.workload.label()
        << " seed=" << cfg.seed;
  auto plan = cfg.workload.build(cfg.n_ranks, cfg.seed);
  plan.validate();
  try {
    std::vector<std::vector<std::byte>> got;
    if (cfg.transport == TransportKind::simnet) {
      auto res =
          simulate(plan, cfg.schedule, cfg.cost, cfg.skew, cfg.stride, derive_seed(cfg.seed, 0));
      got = std::move(res.recv_bufs);
    } else {
      run_threaded(cfg, plan, &got);
    }
    if (verify_delivery(plan, got)) {
      details = "verified " + repro.str();
      return true;
    }
    details = "delivery mismatch: " + repro.str();
    return false;
  } catch (const Error& e) {
    details = std::string("run failed: ") + e.what() + " [" + repro.str() + "]";
    return false;
  }
}

void write_trace(const RunConfig& cfg, std::ostream& os) {
  cfg.validate();
  if (cfg.transport != TransportKind::simnet)
    throw ConfigError("event traces require the simnet transport");
  auto plan = cfg.workload.build(cfg.n_ranks, cfg.seed);
  plan.validate();
  auto res = simulate(plan, cfg.schedule, cfg.cost, cfg.skew, cfg.stride, derive_seed(cfg.seed, 0));
  res.trace.to_csv(os);
}

std::vector<ResultRow> run_sweep(const SweepConfig& sweep) {
  if (sweep.schedules.empty()) throw ConfigError("sweep needs at least one schedule");
  std::vector<ResultRow> rows;
  for (ScheduleKind kind : sweep.schedules) {
    RunConfig cfg = sweep.base;
    cfg.schedule = kind;
    if (uses_stride(kind)) {
      if (sweep.strides.empty()) throw ConfigError("sweep needs at least one stride");
      for (int s : sweep.strides) {
        cfg.stride = s;
        rows.push_back(run_config(cfg));
      }
    } else {
      cfg.stride = 1;
      rows.push_back(run_config(cfg));
    }
  }
  return rows;
}

}  // namespace a2av
