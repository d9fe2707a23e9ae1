// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
//
// bench: strong-scaling sweeps, oracle verification and backend info.

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "vizdpp/advection.hpp"
#include "vizdpp/bench.hpp"
#include "vizdpp/field_io.hpp"
#include "vizdpp/isocontour.hpp"
#include "vizdpp/perf.hpp"
#include "vizdpp/verify.hpp"

namespace {

using namespace vizdpp;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunArgs {
  std::string preset;
  std::string kernel;
  std::string strategies;
  std::string threads;
  int reps = 1;
  std::string dataset;
  std::string synthetic;
  int radius = 19;
  double sigma = 0.33;
  double isovalue = 15.0;
  bool reclassify = false;
  Index seeds = 500;
  Index steps = 1000;
  double h = 0.0;
  Index chunk_size = 4096;
  std::string out = ".";
  std::string emit = "csv";
  std::uint64_t seed = 1;
  bool write_output = false;
};

void print_summary(const std::vector<bench::BenchRecord>& records) {
  std::map<std::pair<std::string, int>, std::vector<double>> runtimes;
  std::map<std::pair<std::string, int>, double> speedup;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.strategy) == order.end()) order.push_back(r.strategy);
    runtimes[{r.strategy, r.threads}].push_back(r.metrics.runtime_s);
    speedup[{r.strategy, r.threads}] = r.speedup.value_or(0.0);
  }
  std::printf("%-20s %7s %14s %9s\n", "strategy", "threads", "median_s", "speedup");
  for (const auto& s : order) {
    for (const auto& [key, times] : runtimes) {
      if (key.first != s) continue;
      std::printf("%-20s %7d %14.6f %9.3f\n", s.c_str(), key.second, bench::median(times),
                  speedup[key]);
    }
  }
}

void write_kernel_output(const bench::BenchConfig& cfg, const StructuredField& input,
                         const std::string& strategy) {
  const auto out = bench::run_kernel(cfg, input, strategy, 1);
  const std::string stem = std::string(bench::to_string(cfg.kernel)) + "_" + strategy;
  if (const auto* image = std::get_if<StructuredField>(&out)) {
    save_field(*image, cfg.out_dir / (stem + ".json"));
  } else if (const auto* mesh = std::get_if<contour::TriangleMesh>(&out)) {
    contour::write_stl(*mesh, cfg.out_dir / (stem + ".stl"));
  } else {
    advect::write_obj(std::get<std::vector<advect::Streamline>>(out), cfg.out_dir / (stem + ".obj"));
  }
}

int cmd_run(const RunArgs& a, const CLI::App& sub) {
  bench::BenchConfig cfg;
  if (!a.preset.empty()) {
    auto p = bench::preset(a.preset);
    if (!p) throw CLI::ValidationError("--preset", "unknown preset '" + a.preset + "'");
    cfg = *p;
  }
  const auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  if (given("--kernel")) {
    const auto k = bench::parse_kernel(a.kernel);
    if (!k) throw CLI::ValidationError("--kernel", "expected stencil, isocontour or advection");
    if (!a.preset.empty() && *k != cfg.kernel) {
      throw CLI::ValidationError("--kernel", "conflicts with the preset's kernel");
    }
    cfg.kernel = *k;
  } else if (a.preset.empty()) {
    throw CLI::RequiredError("--kernel or --preset");
  }
  if (given("--strategy")) cfg.strategies = split_list(a.strategies);
  if (given("--threads")) {
    cfg.thread_counts.clear();
    for (const auto& t : split_list(a.threads)) cfg.thread_counts.push_back(std::stoi(t));
  }
  if (given("--reps")) cfg.repetitions = a.reps;
  if (given("--dataset")) {
    cfg.dataset = a.dataset;
    cfg.synthetic.reset();
  }
  if (given("--synthetic")) {
    cfg.synthetic = a.synthetic;
    cfg.dataset.reset();
  }
  if (given("--radius")) cfg.kernel_size = a.radius;
  if (given("--sigma")) cfg.sigma = a.sigma;
  if (given("--isovalue")) cfg.isovalue = a.isovalue;
  if (given("--reclassify")) cfg.reclassify = a.reclassify;
  if (given("--seeds")) cfg.n_seeds = a.seeds;
  if (given("--steps")) cfg.max_steps = a.steps;
  if (given("--h")) cfg.step_size = a.h;
  if (given("--chunk-size")) cfg.chunk_size = a.chunk_size;
  if (given("--seed")) cfg.seed = a.seed;
  cfg.out_dir = a.out;
  cfg.validate();

  const auto emit = split_list(a.emit);
  for (const auto& e : emit) {
    if (e != "csv" && e != "json" && e != "svg") {
      throw CLI::ValidationError("--emit", "unknown format '" + e + "'");
    }
  }
  std::filesystem::create_directories(cfg.out_dir);

  std::fprintf(stderr, "bench: %s, strategies", std::string(bench::to_string(cfg.kernel)).c_str());
  for (const auto& s : cfg.resolved_strategies()) std::fprintf(stderr, " %s", s.c_str());
  std::fprintf(stderr, ", backend %s\n", std::string(perf::to_string(perf::backend())).c_str());

  const auto records = bench::compute_speedup(bench::run_suite(cfg));
  print_summary(records);

  const std::string kernel(bench::to_string(cfg.kernel));
  const auto has = [&](const char* f) { return std::find(emit.begin(), emit.end(), f) != emit.end(); };
  if (has("csv")) bench::emit_csv(records, cfg.out_dir / (kernel + ".csv"));
  if (has("json")) bench::emit_json(records, cfg.out_dir / (kernel + ".json"));
  if (has("svg")) {
    std::set<int> threads;
    for (const auto& r : records) threads.insert(r.threads);
    if (threads.size() < 2) {
      std::fprintf(stderr, "bench: skipping plots, need at least two thread counts\n");
    } else {
      bench::emit_plots(records, cfg.out_dir);
    }
  }
  if (a.write_output) {
    write_kernel_output(cfg, bench::make_input(cfg), cfg.resolved_strategies().front());
  }
  return 0;
}

int cmd_verify(bool quick, double threshold) {
  verify::Options opts;
  opts.scaling = !quick;
  opts.scaling_threshold = threshold;
  const auto results = verify::run_all(opts, [](const verify::CheckResult& r) {
    std::cout << verify::format(r) << std::endl;
  });
  return verify::all_hard_passed(results) ? 0 : 1;
}

int cmd_info() {
  const perf::Backend requested = perf::backend_from_env();
  std::cout << "backend requested: " << perf::to_string(requested) << '\n'
            << "backend effective: " << perf::to_string(perf::backend()) << '\n'
            << "hardware counters: " << (perf::hardware_available() ? "available" : "unavailable")
            << '\n'
            << "hardware threads:  " << std::thread::hardware_concurrency() << '\n'
            << "presets:";
  for (const auto& p : bench::preset_names()) std::cout << ' ' << p;
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong-scaling benchmarks for data-parallel visualization kernels"};
  app.require_subcommand(1);

  RunArgs a;
  auto* run = app.add_subcommand("run", "Run a sweep and write reports");
  run->set_help_flag("--help", "Print this help message and exit");  // frees --h for the step size
  run->add_option("--preset", a.preset, "Named configuration")
      ->check(CLI::IsMember(bench::preset_names()));
  run->add_option("--kernel", a.kernel, "stencil | isocontour | advection");
  run->add_option("--strategy", a.strategies, "Comma-separated strategies (default: all)");
  run->add_option("--threads", a.threads, "Comma-separated ascending thread counts");
  run->add_option("--reps", a.reps, "Timed repetitions per cell")->check(CLI::PositiveNumber);
  auto* dataset = run->add_option("--dataset", a.dataset, "JSON descriptor of a raw field");
  auto* synthetic = run->add_option("--synthetic", a.synthetic,
                                    "generator:NXxNY[xNZ][:param], generator in "
                                    "noise|impulse|sphere|rotational");
  dataset->excludes(synthetic);
  run->add_option("--radius", a.radius, "Stencil window width R (odd)");
  run->add_option("--sigma", a.sigma, "Stencil sigma");
  run->add_option("--isovalue", a.isovalue, "Isocontour level");
  run->add_flag("--reclassify", a.reclassify, "Recompute case indices in the generate phase");
  run->add_option("--seeds", a.seeds, "Number of diagonal seeds");
  run->add_option("--steps", a.steps, "Maximum RK4 steps per streamline");
  run->add_option("--h", a.h, "RK4 step size (default: quarter of the smallest spacing)");
  run->add_option("--chunk-size", a.chunk_size, "Indices per scheduling chunk");
  run->add_option("--out", a.out, "Output directory");
  run->add_option("--emit", a.emit, "Comma-separated report formats: csv,json,svg");
  run->add_option("--seed", a.seed, "RNG seed for synthetic noise");
  run->add_flag("--write-output", a.write_output, "Also write the kernel output (raw, STL or OBJ)");

  bool quick = false;
  double threshold = 3.0;
  auto* ver = app.add_subcommand("verify", "Run the oracle-equivalence suites");
  ver->add_flag("--quick", quick, "Skip the strong-scaling sweep");
  ver->add_option("--threshold", threshold, "Speedup required at 4 threads");

  auto* info = app.add_subcommand("info", "Print counter backend availability");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(a, *run);
    if (ver->parsed()) return cmd_verify(quick, threshold);
    if (info->parsed()) return cmd_info();
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bench: %s\n", e.what());
    return 1;
  }
  return 0;
}
