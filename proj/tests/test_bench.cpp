// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vizdpp/bench.hpp"
#include "vizdpp/field_io.hpp"

using namespace vizdpp;
using namespace vizdpp::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vizdpp_bench" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

BenchRecord rec(std::string strategy, int threads, int rep, double runtime) {
  BenchRecord r;
  r.kernel = "stencil";
  r.strategy = std::move(strategy);
  r.threads = threads;
  r.rep = rep;
  r.counters.wall_time_s = runtime;
  r.counters.call_count = 1;
  r.metrics.runtime_s = runtime;
  return r;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("kernels and strategies") {
  CHECK(parse_kernel("stencil") == Kernel::Stencil);
  CHECK_FALSE(parse_kernel("blur").has_value());
  CHECK(strategies_for(Kernel::Stencil) ==
        std::vector<std::string>{"direct", "field-map", "point-neighborhood"});
  CHECK(strategies_for(Kernel::Isocontour) == std::vector<std::string>{"serial", "dpp"});
  CHECK(is_serial_strategy(Kernel::Advection, "serial"));
  CHECK_FALSE(is_serial_strategy(Kernel::Stencil, "direct"));
}

TEST_CASE("synthetic specs") {
  const auto s = SyntheticSpec::parse("sphere:10x12x14:3.5");
  CHECK(s.generator == "sphere");
  CHECK(s.dims == Dims{10, 12, 14});
  CHECK(s.param == 3.5);
  CHECK(SyntheticSpec::parse("noise:8x9").dims == Dims{8, 9, 1});
  CHECK_THROWS_AS(SyntheticSpec::parse("plasma:8x8"), std::invalid_argument);
  CHECK_THROWS_AS(SyntheticSpec::parse("noise:8"), std::invalid_argument);
  CHECK_THROWS_AS(SyntheticSpec::parse("noise:8xq"), std::invalid_argument);
  CHECK_THROWS_AS(SyntheticSpec::parse("noise"), std::invalid_argument);
  const auto img = SyntheticSpec::parse("impulse:9x7").generate(1);
  CHECK(img.at(4, 3, 0) == 1.0f);
}

TEST_CASE("presets") {
  CHECK(preset_names().size() == 3);
  for (const auto& name : preset_names()) {
    const auto p = preset(name);
    REQUIRE(p.has_value());
    CHECK_NOTHROW(p->validate());
    CHECK(p->thread_counts == std::vector<int>{1, 2, 4, 8});
  }
  CHECK(preset("stencil-paper")->kernel_size == 19);
  CHECK(preset("stencil-paper")->sigma == 0.33);
  CHECK(preset("iso-paper")->isovalue == 15.0);
  CHECK(preset("advect-paper")->n_seeds == 500);
  CHECK(preset("advect-paper")->max_steps == 1000);
  CHECK_FALSE(preset("nope").has_value());
}

TEST_CASE("config validation") {
  BenchConfig c;
  c.thread_counts = {};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.thread_counts = {2, 1};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.thread_counts = {1, 2};
  c.repetitions = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.repetitions = 1;
  c.strategies = {"serial"};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.strategies = {};
  c.kernel_size = 4;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.kernel_size = 5;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("sweep produces one record per cell") {
  BenchConfig c;
  c.kernel = Kernel::Stencil;
  c.strategies = {"direct", "point-neighborhood"};
  c.synthetic = "noise:40x30";
  c.kernel_size = 5;
  c.thread_counts = {1, 2, 4};
  c.repetitions = 2;
  const auto records = run_suite(c);
  CHECK(records.size() == 12);
  for (const auto& r : records) {
    CHECK(r.kernel == "stencil");
    CHECK(r.counters.call_count == 1);
    CHECK(r.output_hash == records.front().output_hash);
    CHECK_FALSE(r.serial_only);
  }
  CHECK(perf::markers().regions().empty());
}

TEST_CASE("serial strategies run once per rep") {
  BenchConfig c;
  c.kernel = Kernel::Isocontour;
  c.synthetic = "sphere:12x12x12:4";
  c.isovalue = 0.0;
  c.thread_counts = {1, 2, 4};
  c.repetitions = 2;
  const auto records = run_suite(c);
  std::size_t serial = 0;
  for (const auto& r : records) {
    if (r.strategy == "serial") {
      ++serial;
      CHECK(r.serial_only);
      CHECK(r.threads == 1);
    }
  }
  CHECK(serial == 2);
  CHECK(records.size() == 2 + 3 * 2);
}

TEST_CASE("kernel output hash does not depend on threads or backend") {
  for (Kernel k : {Kernel::Stencil, Kernel::Isocontour, Kernel::Advection}) {
    BenchConfig c;
    c.kernel = k;
    c.thread_counts = {1, 3};
    c.n_seeds = 20;
    c.max_steps = 50;
    c.isovalue = 0.0;
    c.synthetic = k == Kernel::Stencil      ? "noise:33x17"
                  : k == Kernel::Isocontour ? "sphere:14x13x12:4"
                                            : "rotational:12x12x12";
    perf::set_backend(perf::Backend::Auto);
    const auto a = run_suite(c);
    perf::set_backend(perf::Backend::None);
    const auto b = run_suite(c);
    perf::set_backend(perf::backend_from_env());
    CHECK(a.front().output_hash == b.front().output_hash);
    CHECK_FALSE(b.front().counters.flops_scalar.has_value());
  }
}

TEST_CASE("dataset input") {
  const auto dir = scratch_dir("dataset");
  save_field(gen_noise_field({20, 10, 1}, 3), dir / "img.json");
  BenchConfig c;
  c.dataset = dir / "img.json";
  c.kernel_size = 3;
  CHECK(make_input(c).dims() == Dims{20, 10, 1});
  CHECK(run_suite(c).size() == 3);
  c.synthetic = "noise:4x4";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("speedup") {
  SUBCASE("ratio of medians") {
    const auto out = compute_speedup({rec("direct", 1, 0, 8.0), rec("direct", 4, 0, 2.0)});
    CHECK(out[0].speedup == 1.0);
    CHECK(out[1].speedup == 4.0);
  }
  SUBCASE("median over reps") {
    const auto out = compute_speedup({rec("direct", 1, 0, 4.0), rec("direct", 2, 0, 2.0),
                                      rec("direct", 2, 1, 2.2), rec("direct", 2, 2, 9.9)});
    CHECK(out[1].speedup == 4.0 / 2.2);
    CHECK(out[3].speedup == 4.0 / 2.2);
  }
  SUBCASE("threads = 1 is exactly one even with noisy reps") {
    const auto out = compute_speedup({rec("direct", 1, 0, 3.0), rec("direct", 1, 1, 5.0)});
    CHECK(out[0].speedup == 1.0);
    CHECK(out[1].speedup == 1.0);
  }
  SUBCASE("missing baseline") {
    CHECK_THROWS_AS(compute_speedup({rec("direct", 2, 0, 1.0)}), std::invalid_argument);
  }
  CHECK(median({3.0, 1.0, 2.0, 10.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("csv") {
  SUBCASE("header is fixed") {
    CHECK(kCsvHeader ==
          "kernel,strategy,threads,rep,runtime_s,instructions,cycles,cpi,flops_scalar,flops_packed,"
          "vectorization_pct,l3_requests,l3_misses,l3_miss_ratio_pct,speedup");
  }
  SUBCASE("one record, absent counters as N/A") {
    auto r = rec("field-map", 2, 1, 0.125);
    r.counters.flops_scalar = 400;
    r.speedup = 1.5;
    const auto text = to_csv({r});
    CHECK(text == std::string(kCsvHeader) +
                      "\nstencil,field-map,2,1,0.125,N/A,N/A,N/A,400,N/A,N/A,N/A,N/A,N/A,1.5\n");
    const auto dir = scratch_dir("csv");
    emit_csv({r}, dir / "out.csv");
    CHECK(slurp(dir / "out.csv") == text);
  }
  SUBCASE("parse-back reproduces numeric fields") {
    std::vector<BenchRecord> records;
    for (int i = 0; i < 5; ++i) {
      auto r = rec(i % 2 ? "direct" : "field-map", 1 << i, i, 0.1 * (i + 1) / 3.0);
      r.counters.instructions_retired = 1000 + i;
      r.counters.cycles = 3000 + 7 * i;
      r.counters.flops_scalar = 11 * i;
      if (i > 2) {
        r.counters.l3_requests = 50;
        r.counters.l3_misses = i;
      }
      r.metrics = perf::derive_metrics(r.counters);
      r.speedup = 1.0 / 3.0 + i;
      records.push_back(r);
    }
    const auto back = parse_csv(to_csv(records));
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].kernel == records[i].kernel);
      CHECK(back[i].strategy == records[i].strategy);
      CHECK(back[i].threads == records[i].threads);
      CHECK(back[i].rep == records[i].rep);
      CHECK(back[i].metrics.runtime_s == records[i].metrics.runtime_s);
      CHECK(back[i].metrics.cpi == records[i].metrics.cpi);
      CHECK(back[i].metrics.l3_miss_ratio_pct == records[i].metrics.l3_miss_ratio_pct);
      CHECK(back[i].metrics.vectorization_pct == records[i].metrics.vectorization_pct);
      CHECK(back[i].counters.instructions_retired == records[i].counters.instructions_retired);
      CHECK(back[i].counters.l3_misses == records[i].counters.l3_misses);
      CHECK(back[i].counters.flops_packed == records[i].counters.flops_packed);
      CHECK(back[i].speedup == records[i].speedup);
    }
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(parse_csv("a,b\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nstencil,direct,1\n"), std::invalid_argument);
  }
  SUBCASE("empty record list") {
    CHECK_THROWS_AS(emit_csv({}, scratch_dir("empty") / "x.csv"), std::invalid_argument);
  }
}

TEST_CASE("json mirrors the csv fields") {
  auto r = rec("direct", 4, 0, 0.5);
  r.counters.flops_scalar = 12;
  r.output_hash = 77;
  r.speedup = 2.0;
  const auto dir = scratch_dir("json");
  emit_json({r}, dir / "out.json");
  const auto j = nlohmann::json::parse(slurp(dir / "out.json"));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  const auto& o = j[0];
  std::string header(kCsvHeader);
  std::stringstream cols(header);
  std::string col;
  while (std::getline(cols, col, ',')) CHECK_MESSAGE(o.contains(col), col);
  CHECK(o["flops_scalar"] == 12);
  CHECK(o["cycles"].is_null());
  CHECK(o["l3_miss_ratio_pct"].is_null());
  CHECK(o["speedup"] == 2.0);
  CHECK(o["output_hash"] == 77);
}

TEST_CASE("plots") {
  std::vector<BenchRecord> records;
  for (const char* s : {"direct", "field-map", "point-neighborhood"}) {
    for (int t : {1, 2, 4, 8}) {
      for (int rep = 0; rep < 2; ++rep) records.push_back(rec(s, t, rep, 1.0 / t + 0.01 * rep));
    }
  }
  const auto a = scratch_dir("plots_a");
  const auto b = scratch_dir("plots_b");
  const auto files = emit_plots(records, a);
  std::vector<BenchRecord> shuffled(records.rbegin(), records.rend());
  emit_plots(shuffled, b);
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "stencil_runtime.svg");
  CHECK(files[1].filename() == "stencil_speedup.svg");
  for (const auto& f : files) CHECK(slurp(f) == slurp(b / f.filename()));

  const auto speedup = slurp(a / "stencil_speedup.svg");
  CHECK(count_of(speedup, "id=\"ideal\"") == 1);
  CHECK(count_of(speedup, "class=\"series\"") == 3);
  CHECK(count_of(slurp(a / "stencil_runtime.svg"), "class=\"series\"") == 3);
  CHECK(count_of(slurp(a / "stencil_runtime.svg"), "id=\"ideal\"") == 0);

  CHECK_THROWS_AS(emit_plots({rec("direct", 1, 0, 1.0)}, scratch_dir("plots_c")),
                  std::invalid_argument);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("", 0) == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar", 6) == 0x85944171f73967e8ull);
}

}  // TEST_SUITE
