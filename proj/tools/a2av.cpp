#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "a2av/bench.hpp"
#include "a2av/config.hpp"
#include "a2av/error.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string output;
  std::string schedule;
  std::string transport;
  std::string workload;
  int n_ranks = 4;
  int stride = 1;
  int repeats = 1;
  std::uint64_t seed = 1;
  bool best_per_metric = false;
  std::int64_t count = 64;
  std::int64_t max_count = 32;
  int elem_size = 8;
  std::int64_t grid_x = 0;
  std::int64_t grid_y = 0;
  int proc_rows = 0;
  int proc_cols = 0;
  std::vector<std::string> sweep_schedules;
  std::vector<int> sweep_strides;
  bool all_schedules = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file (see docs/config.md)");
  sub->add_option("--output", o.output, "write to this file instead of stdout");
  sub->add_option("--schedule", o.schedule,
                  "pairwise | nonblocking | multipair-waitall | multipair-waitany | "
                  "multipair-testany");
  sub->add_option("--transport", o.transport, "threaded | simnet");
  sub->add_option("--n-ranks", o.n_ranks, "number of ranks");
  sub->add_option("--stride", o.stride, "in-flight pair budget of the multipair schedules");
  sub->add_option("--repeats", o.repeats, "repeat count; the best repeat is reported");
  sub->add_option("--seed", o.seed, "base seed for workload and skew draws");
  sub->add_flag("--best-per-metric", o.best_per_metric,
                "take each of min/avg/max as its best value across repeats");
  sub->add_option("--workload", o.workload, "uniform | fft-transpose | random");
  sub->add_option("--count", o.count, "uniform workload: elements per rank pair");
  sub->add_option("--elem-size", o.elem_size, "element size in bytes");
  sub->add_option("--max-count", o.max_count, "random workload: per-pair count bound");
  sub->add_option("--grid-x", o.grid_x, "fft-transpose workload: mesh width");
  sub->add_option("--grid-y", o.grid_y, "fft-transpose workload: mesh height");
  sub->add_option("--proc-rows", o.proc_rows, "fft-transpose workload: process grid rows");
  sub->add_option("--proc-cols", o.proc_cols, "fft-transpose workload: process grid columns");
}

a2av::WorkloadSpec workload_from_cli(const Options& o) {
  if (o.workload == "uniform") return a2av::WorkloadSpec::uniform(o.count, o.elem_size);
  if (o.workload == "random") return a2av::WorkloadSpec::random(o.max_count, o.elem_size);
  if (o.workload == "fft-transpose")
    return a2av::WorkloadSpec::fft_transpose(o.grid_x, o.grid_y, o.proc_rows, o.proc_cols,
                                             o.elem_size);
  throw a2av::ConfigError("unknown workload '" + o.workload + "'");
}

a2av::RunConfig build_run_config(const CLI::App* sub, const Options& o) {
  a2av::RunConfig cfg;
  if (!o.config_path.empty()) cfg = a2av::load_run_config(o.config_path);
  if (sub->count("--schedule")) cfg.schedule = a2av::schedule_from_name(o.schedule);
  if (sub->count("--transport")) cfg.transport = a2av::transport_from_name(o.transport);
  if (sub->count("--n-ranks")) cfg.n_ranks = o.n_ranks;
  if (sub->count("--stride")) cfg.stride = o.stride;
  if (sub->count("--repeats")) cfg.repeats = o.repeats;
  if (sub->count("--seed")) cfg.seed = o.seed;
  if (sub->count("--best-per-metric")) cfg.best_per_metric = true;
  if (sub->count("--workload"))
    cfg.workload = workload_from_cli(o);
  else if (sub->count("--count") || sub->count("--elem-size") || sub->count("--max-count"))
    throw a2av::ConfigError("workload field options need --workload");
  return cfg;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw a2av::ConfigError("cannot write output file '" + path + "'");
  fn(out);
  if (!out) throw a2av::ConfigError("write to '" + path + "' failed");
}

bool all_ok(const std::vector<a2av::ResultRow>& rows) {
  for (const auto& r : rows)
    if (r.status != "ok") return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark and simulate all-to-all exchange schedules"};
  app.require_subcommand(1);

  Options o;
  auto* run = app.add_subcommand("run", "benchmark one configuration, emit one results row");
  auto* sweep = app.add_subcommand("sweep", "benchmark a schedule/stride grid, emit a results CSV");
  auto* verify = app.add_subcommand("verify", "check delivered buffers against the direct copy");
  auto* trace = app.add_subcommand("trace", "emit the event trace of one simulated run");
  for (auto* sub : {run, sweep, verify, trace}) add_common(sub, o);
  sweep->add_option("--schedules", o.sweep_schedules, "schedules to sweep")->delimiter(',');
  sweep->add_option("--strides", o.sweep_strides, "stride values to sweep")->delimiter(',');
  verify->add_flag("--all-schedules", o.all_schedules, "verify every schedule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      std::vector<a2av::ResultRow> rows{a2av::run_config(build_run_config(run, o))};
      with_output(o.output, [&](std::ostream& os) { a2av::write_results_csv(os, rows); });
      return all_ok(rows) ? 0 : 1;
    }
    if (sweep->parsed()) {
      a2av::SweepConfig sc;
      if (!o.config_path.empty()) sc = a2av::load_sweep_config(o.config_path);
      sc.base = build_run_config(sweep, o);
      if (sweep->count("--schedules")) {
        sc.schedules.clear();
        for (const auto& name : o.sweep_schedules)
          sc.schedules.push_back(a2av::schedule_from_name(name));
      }
      if (sweep->count("--strides")) sc.strides = o.sweep_strides;
      auto rows = a2av::run_sweep(sc);
      with_output(o.output, [&](std::ostream& os) { a2av::write_results_csv(os, rows); });
      return all_ok(rows) ? 0 : 1;
    }
    if (verify->parsed()) {
      auto cfg = build_run_config(verify, o);
      std::vector<a2av::ScheduleKind> kinds{cfg.schedule};
      if (o.all_schedules) kinds.assign(std::begin(a2av::kAllSchedules), std::end(a2av::kAllSchedules));
      int passed = 0;
      with_output(o.output, [&](std::ostream& os) {
        for (a2av::ScheduleKind kind : kinds) {
          cfg.schedule = kind;
          std::string details;
          const bool good = a2av::verify_config(cfg, details);
          passed += good ? 1 : 0;
          os << (good ? "ok: " : "FAIL: ") << details << '\n';
        }
        os << passed << '/' << kinds.size() << " passed\n";
      });
      return passed == static_cast<int>(kinds.size()) ? 0 : 1;
    }
    // trace: the only transport with an event log is the simulator
    auto cfg = build_run_config(trace, o);
    if (!trace->count("--transport") && o.config_path.empty())
      cfg.transport = a2av::TransportKind::simnet;
    with_output(o.output, [&](std::ostream& os) { a2av::write_trace(cfg, os); });
    return 0;
  } catch (const a2av::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
