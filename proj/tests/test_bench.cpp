#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "a2av/bench.hpp"
#include "a2av/config.hpp"
#include "a2av/error.hpp"
#include "a2av/rng.hpp"
#include "a2av/stats.hpp"

using namespace a2av;

namespace {

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_results_csv(os, rows);
  return os.str();
}

RunConfig sim_base() {
  RunConfig cfg;
  cfg.transport = TransportKind::simnet;
  cfg.n_ranks = 6;
  cfg.repeats = 2;
  cfg.seed = 11;
  cfg.workload = WorkloadSpec::uniform(8, 8);
  return cfg;
}

}  // namespace

TEST_CASE("best repeat keeps the smallest makespan and the earliest tie") {
  // single repeat: rank spread is reported untouched
  auto one = summarize({{3, 5, 4}});
  CHECK(one.best_repeat == 0);
  CHECK(one.min == 3);
  CHECK(one.avg == 4);
  CHECK(one.max == 5);
  CHECK(one.makespan == 5);

  // five repeats with makespans 9,7,8,7,10: the first 7 wins
  std::vector<std::vector<double>> reps = {{9, 1}, {7, 2}, {8, 3}, {7, 4}, {10, 5}};
  auto five = summarize(reps);
  CHECK(five.best_repeat == 1);
  CHECK(five.makespan == 7);
  CHECK(five.min == 2);
  CHECK(five.avg == doctest::Approx(4.5));
  CHECK(five.max == 7);

  // one repeat reports itself
  auto ident = summarize({{2.5, 6.5}});
  CHECK(ident.min == 2.5);
  CHECK(ident.avg == doctest::Approx(4.5));
  CHECK(ident.max == 6.5);
  CHECK(ident.makespan == 6.5);
}

TEST_CASE("per metric selection floors each statistic independently") {
  std::vector<std::vector<double>> reps = {{1, 9}, {4, 5}};
  auto def = summarize(reps);
  CHECK(def.best_repeat == 1);
  CHECK(def.min == 4);
  CHECK(def.max == 5);
  auto best = summarize(reps, true);
  CHECK(best.best_repeat == 1);
  CHECK(best.min == 1);        // from repeat 0
  CHECK(best.max == 5);        // from repeat 1
  CHECK(best.avg == doctest::Approx(4.5));
  CHECK(best.makespan == 5);
}

TEST_CASE("summarize rejects empty input") {
  CHECK_THROWS_AS(summarize({}), ConfigError);
  CHECK_THROWS_AS(summarize({{}}), ConfigError);
}

TEST_CASE("statistics order on arbitrary duration vectors") {
  SplitMix64 rng(0xa11d0c5u);
  for (int iter = 0; iter < 200; ++iter) {
    const int n_repeats = 1 + static_cast<int>(rng.next_below(6));
    const int n_ranks = 1 + static_cast<int>(rng.next_below(12));
    std::vector<std::vector<double>> reps(static_cast<std::size_t>(n_repeats));
    for (auto& rep : reps) {
      rep.resize(static_cast<std::size_t>(n_ranks));
      // mixed magnitudes stress the summation error path
      for (auto& d : rep) d = rng.next_double() * (rng.next_below(2) ? 1e9 : 1e-3);
    }
    auto stats = summarize(reps);
    CHECK(stats.min <= stats.avg);
    CHECK(stats.avg <= stats.max);
    const auto& best = reps[static_cast<std::size_t>(stats.best_repeat)];
    long double mean = 0;
    for (double d : best) mean += d;
    mean /= best.size();
    CHECK(stats.avg == doctest::Approx(static_cast<double>(mean)).epsilon(1e-12));
    for (const auto& rep : reps)
      CHECK(stats.makespan <= *std::max_element(rep.begin(), rep.end()));
  }
}

TEST_CASE("workload labels are stable and comma free") {
  CHECK(WorkloadSpec::uniform(64, 8).label() == "uniform-c64-e8");
  CHECK(WorkloadSpec::random(32, 4).label() == "random-m32-e4");
  CHECK(WorkloadSpec::fft_transpose(4096, 2048, 4, 2, 16).label() == "fft-g4096x2048-p4x2-e16");
  for (const auto& label :
       {WorkloadSpec::uniform(64, 8).label(), WorkloadSpec::random(32, 4).label(),
        WorkloadSpec::fft_transpose(4096, 2048, 4, 2, 16).label()})
    CHECK(label.find(',') == std::string::npos);
}

TEST_CASE("workloads build the plans they name") {
  auto uni = WorkloadSpec::uniform(5, 4).build(3, 1);
  CHECK(uni.n_ranks == 3);
  CHECK(uni.sendcounts.at(1, 2) == 5);

  auto rnd = WorkloadSpec::random(16, 8).build(4, 33);
  CHECK(rnd.n_ranks == 4);
  auto rnd2 = WorkloadSpec::random(16, 8).build(4, 33);
  CHECK(rnd.sendcounts.at(2, 3) == rnd2.sendcounts.at(2, 3));

  auto fft = WorkloadSpec::fft_transpose(8, 8, 2, 2, 8).build(4, 1);
  CHECK(fft.n_ranks == 4);
  CHECK_THROWS_AS(WorkloadSpec::fft_transpose(8, 8, 2, 2, 8).build(6, 1), ConfigError);
  CHECK_THROWS_AS(WorkloadSpec::fft_transpose(8, 8, 0, 2, 8).build(0, 1), ConfigError);
}

TEST_CASE("transport names round trip") {
  CHECK(transport_from_name("threaded") == TransportKind::threaded);
  CHECK(transport_from_name("simnet") == TransportKind::simnet);
  CHECK(transport_name(TransportKind::simnet) == "simnet");
  CHECK_THROWS_AS(transport_from_name("bogus"), ConfigError);
}

TEST_CASE("run config validation rejects impossible shapes") {
  RunConfig cfg = sim_base();
  CHECK_NOTHROW(cfg.validate());
  cfg.n_ranks = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = sim_base();
  cfg.repeats = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = sim_base();
  cfg.schedule = ScheduleKind::multipair_waitany;
  cfg.stride = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = sim_base();
  cfg.transport = TransportKind::threaded;
  cfg.skew = SkewProfile::one_rank(0, 10);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.skew = SkewProfile::none();
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("threaded run produces positive wall times per rank") {
  RunConfig cfg;
  cfg.transport = TransportKind::threaded;
  cfg.schedule = ScheduleKind::multipair_waitany;
  cfg.stride = 2;
  cfg.n_ranks = 4;
  cfg.repeats = 2;
  cfg.workload = WorkloadSpec::random(16, 8);
  CHECK(cfg.time_unit() == "ns");
  auto row = run_config(cfg);
  CHECK(row.status == "ok");
  CHECK(row.min > 0);
  CHECK(row.min <= row.avg);
  CHECK(row.avg <= row.max);
  CHECK(row.makespan == row.max);
  CHECK(row.time_unit == "ns");
  CHECK(row.schedule == "multipair-waitany");
}

TEST_CASE("simulated runs repeat to identical result rows") {
  RunConfig cfg = sim_base();
  cfg.schedule = ScheduleKind::multipair_testany;
  cfg.stride = 3;
  cfg.skew = SkewProfile::uniform(800, 21);
  auto a = results_csv({run_config(cfg)});
  auto b = results_csv({run_config(cfg)});
  CHECK(a == b);
  CHECK(a.find("sim") != std::string::npos);
}

TEST_CASE("explicit skew repeats identically while seeded skew re-resolves") {
  RunConfig cfg = sim_base();
  cfg.skew = SkewProfile::explicit_offsets_of({0, 400, 0, 0, 0, 0});
  auto r0 = run_repeat(cfg, 0);
  auto r1 = run_repeat(cfg, 1);
  CHECK(r0 == r1);

  cfg.skew = SkewProfile::uniform(5000, 9);
  auto s0 = run_repeat(cfg, 0);
  auto s1 = run_repeat(cfg, 1);
  CHECK(s0 != s1);  // the offsets redraw with the repeat index
}

TEST_CASE("sweep covers plain schedules once and stride schedules per stride") {
  SweepConfig sweep;
  sweep.base = sim_base();
  auto rows = run_sweep(sweep);
  REQUIRE(rows.size() == 11);  // 2 + 3 schedules x 3 strides
  CHECK(rows[0].schedule == "pairwise");
  CHECK(rows[0].stride == 1);
  CHECK(rows[1].schedule == "nonblocking");
  int stride_rows = 0;
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.workload == "uniform-c8-e8");
    if (r.schedule.rfind("multipair", 0) == 0) {
      ++stride_rows;
      CHECK((r.stride == 5 || r.stride == 10 || r.stride == 15));
    }
  }
  CHECK(stride_rows == 9);

  auto again = run_sweep(sweep);
  CHECK(results_csv(rows) == results_csv(again));
  CHECK(results_csv(rows).rfind("schedule,transport,n_ranks,stride,workload,repeats,seed,"
                                "time_unit,min,avg,max,makespan,status\n",
                                0) == 0);
}

TEST_CASE("delivery verification flags a corrupted buffer") {
  auto plan = WorkloadSpec::random(12, 8).build(4, 5);
  RunConfig cfg = sim_base();
  cfg.n_ranks = 4;
  cfg.workload = WorkloadSpec::random(12, 8);
  cfg.seed = 5;

  std::string details;
  CHECK(verify_config(cfg, details));
  CHECK(details.find("schedule=pairwise") != std::string::npos);
  CHECK(details.find("seed=5") != std::string::npos);

  auto res = simulate(plan, ScheduleKind::pairwise, cfg.cost, SkewProfile::none(), 1, 1);
  CHECK(verify_delivery(plan, res.recv_bufs));
  auto bad = res.recv_bufs;
  bool flipped = false;
  for (auto& buf : bad) {
    if (!buf.empty()) {
      buf[buf.size() / 2] ^= std::byte{0x40};
      flipped = true;
      break;
    }
  }
  REQUIRE(flipped);
  CHECK_FALSE(verify_delivery(plan, bad));
  bad = res.recv_bufs;
  bad.pop_back();
  CHECK_FALSE(verify_delivery(plan, bad));
}

TEST_CASE("verification catches swapped receive displacements") {
  auto plan = WorkloadSpec::uniform(4, 8).build(3, 1);
  auto mutated = plan;
  std::swap(mutated.rdispls.at(0, 1), mutated.rdispls.at(0, 2));
  mutated.validate();  // still a well-formed plan, just a different placement
  auto res = simulate(mutated, ScheduleKind::nonblocking, default_cost_model(),
                      SkewProfile::none(), 1, 1);
  CHECK(verify_delivery(mutated, res.recv_bufs));
  CHECK_FALSE(verify_delivery(plan, res.recv_bufs));
}

TEST_CASE("single rank zero cost run reports all zero times") {
  RunConfig cfg;
  cfg.transport = TransportKind::simnet;
  cfg.n_ranks = 1;
  cfg.workload = WorkloadSpec::uniform(4, 8);
  cfg.cost = CostModel{};
  auto row = run_config(cfg);
  CHECK(row.status == "ok");
  CHECK(row.min == 0);
  CHECK(row.avg == 0);
  CHECK(row.max == 0);
  CHECK(row.makespan == 0);
}

TEST_CASE("threaded verification also passes every schedule") {
  RunConfig cfg;
  cfg.transport = TransportKind::threaded;
  cfg.n_ranks = 5;
  cfg.workload = WorkloadSpec::random(10, 4);
  cfg.seed = 17;
  cfg.stride = 2;
  for (ScheduleKind kind : kAllSchedules) {
    cfg.schedule = kind;
    std::string details;
    CAPTURE(schedule_name(kind));
    CHECK(verify_config(cfg, details));
  }
}

TEST_CASE("trace writing is simnet only and deterministic") {
  RunConfig cfg = sim_base();
  std::ostringstream a, b;
  write_trace(cfg, a);
  write_trace(cfg, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("time,rank,event,peer,bytes,queue_len\n", 0) == 0);

  cfg.transport = TransportKind::threaded;
  std::ostringstream c;
  CHECK_THROWS_AS(write_trace(cfg, c), ConfigError);
}

TEST_CASE("json config round trips every section") {
  const std::string text = R"({
    "schedule": "multipair-waitany",
    "transport": "simnet",
    "n_ranks": 16,
    "stride": 10,
    "repeats": 5,
    "seed": 42,
    "best_per_metric": true,
    "workload": {"kind": "fft-transpose", "grid_x": 64, "grid_y": 32, "proc_rows": 4, "proc_cols": 4, "elem_size": 16},
    "cost_model": {"alpha": 500, "beta": 2, "gamma": 4, "inject_serialize": true, "poll_cost": 25, "local_copy_cost": 0.5},
    "skew": {"kind": "one_rank", "offset": 25000, "seed": 3}
  })";
  auto cfg = parse_run_config(text);
  CHECK(cfg.schedule == ScheduleKind::multipair_waitany);
  CHECK(cfg.transport == TransportKind::simnet);
  CHECK(cfg.n_ranks == 16);
  CHECK(cfg.stride == 10);
  CHECK(cfg.repeats == 5);
  CHECK(cfg.seed == 42);
  CHECK(cfg.best_per_metric);
  CHECK(cfg.workload.kind == WorkloadSpec::Kind::fft_transpose);
  CHECK(cfg.workload.grid_x == 64);
  CHECK(cfg.workload.proc_cols == 4);
  CHECK(cfg.workload.elem_size == 16);
  CHECK(cfg.cost.alpha == 500);
  CHECK(cfg.cost.inject_serialize);
  CHECK(cfg.cost.local_copy_cost == 0.5);
  CHECK(cfg.skew.kind == SkewProfile::Kind::one_rank);
  CHECK(cfg.skew.rank == -1);  // no fixed rank: drawn from the seed
  CHECK(cfg.skew.offset == 25000);
}

TEST_CASE("json config defaults cover every omitted field") {
  auto cfg = parse_run_config("{}");
  CHECK(cfg.schedule == ScheduleKind::pairwise);
  CHECK(cfg.transport == TransportKind::threaded);
  CHECK(cfg.n_ranks == 4);
  CHECK(cfg.repeats == 1);
  CHECK(cfg.workload.kind == WorkloadSpec::Kind::uniform);
  CHECK(cfg.workload.count == 64);
  CHECK(cfg.cost.alpha == 1000);
  CHECK(cfg.cost.poll_cost == 50);
  CHECK(cfg.skew.kind == SkewProfile::Kind::none);

  auto fixed = parse_run_config(R"({"skew": {"kind": "one_rank", "offset": 10, "rank": 2}})");
  CHECK(fixed.skew.rank == 2);

  auto expl = parse_run_config(R"({"skew": {"kind": "explicit", "offsets": [0, 5, 0]}})");
  CHECK(expl.skew.kind == SkewProfile::Kind::explicit_offsets);
  CHECK(expl.skew.offsets == std::vector<SimTime>{0, 5, 0});
}

TEST_CASE("json config rejects unknown keys and broken values") {
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"n_rank": 4})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"n_ranks": "four"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"schedule": "fastest"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"workload": {"kind": "uniform", "grdi_x": 4}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"workload": {"kind": "fft-transpose", "grid_x": 8}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"cost_model": {"alhpa": 3}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"cost_model": {"alpha": -3}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"skew": {"kind": "sometimes"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"workload": 7})"), ConfigError);
}

TEST_CASE("json sweep section overrides the grid") {
  auto sweep = parse_sweep_config(R"({
    "transport": "simnet", "n_ranks": 4, "workload": {"kind": "uniform", "count": 2},
    "sweep": {"schedules": ["pairwise", "multipair-waitall"], "strides": [2, 4]}
  })");
  CHECK(sweep.base.transport == TransportKind::simnet);
  REQUIRE(sweep.schedules.size() == 2);
  CHECK(sweep.schedules[1] == ScheduleKind::multipair_waitall);
  CHECK(sweep.strides == std::vector<int>{2, 4});
  auto rows = run_sweep(sweep);
  REQUIRE(rows.size() == 3);  // pairwise once, waitall per stride
  for (const auto& r : rows) CHECK(r.status == "ok");

  auto defaults = parse_sweep_config(R"({"n_ranks": 4})");
  CHECK(defaults.schedules.size() == 5);
  CHECK(defaults.strides == std::vector<int>{5, 10, 15});
  CHECK_THROWS_AS(parse_sweep_config(R"({"sweep": {"stride": [1]}})"), ConfigError);
}

TEST_CASE("missing config files fail as config errors") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
  CHECK_THROWS_AS(load_sweep_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("result csv prints integral sim values without fractions") {
  ResultRow row;
  row.schedule = "pairwise";
  row.transport = "simnet";
  row.n_ranks = 4;
  row.stride = 1;
  row.workload = "uniform-c1-e1";
  row.repeats = 1;
  row.seed = 9;
  row.time_unit = "sim";
  row.min = 4;
  row.avg = 4;
  row.max = 4;
  row.makespan = 4;
  auto csv = results_csv({row});
  CHECK(csv.find("pairwise,simnet,4,1,uniform-c1-e1,1,9,sim,4,4,4,4,ok\n") != std::string::npos);
}
