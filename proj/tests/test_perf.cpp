// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <doctest.h>

#include <chrono>
#include <random>
#include <thread>

#include "vizdpp/dpp.hpp"
#include "vizdpp/perf.hpp"

using namespace vizdpp;
using namespace vizdpp::perf;

namespace {

struct UseBackend {
  explicit UseBackend(Backend b) { set_backend(b); }
  ~UseBackend() { set_backend(backend_from_env()); }
};

CounterSample full(std::uint64_t instr, std::uint64_t cycles, std::uint64_t scalar,
                   std::uint64_t packed, std::uint64_t req, std::uint64_t miss) {
  CounterSample s;
  s.instructions_retired = instr;
  s.cycles = cycles;
  s.flops_scalar = scalar;
  s.flops_packed = packed;
  s.l3_requests = req;
  s.l3_misses = miss;
  return s;
}

volatile std::uint64_t sink = 0;

void busy(std::uint64_t n) {
  std::uint64_t x = 1;
  for (std::uint64_t i = 0; i < n; ++i) x = x * 6364136223846793005ull + 1442695040888963407ull;
  sink = x;
}

}  // namespace

TEST_SUITE("perf") {

TEST_CASE("derive_metrics examples") {
  auto s = full(50, 100, 1, 3, 200, 50);
  auto m = derive_metrics(s);
  CHECK(m.cpi == 2.0);
  CHECK(m.vectorization_pct == 75.0);
  CHECK(m.l3_miss_ratio_pct == 25.0);

  s = full(50, 100, 9, 0, 0, 0);
  m = derive_metrics(s);
  CHECK(m.vectorization_pct == 0.0);
  CHECK_FALSE(m.l3_miss_ratio_pct.has_value());

  s = full(0, 100, 0, 0, 10, 1);
  m = derive_metrics(s);
  CHECK_FALSE(m.cpi.has_value());
  CHECK_FALSE(m.vectorization_pct.has_value());

  s = CounterSample{};
  s.wall_time_s = 1.5;
  m = derive_metrics(s);
  CHECK_FALSE(m.cpi.has_value());
  CHECK_FALSE(m.vectorization_pct.has_value());
  CHECK_FALSE(m.l3_miss_ratio_pct.has_value());
  CHECK(m.runtime_s == 1.5);

  // One side of a quotient missing is enough to make it absent.
  s = full(10, 10, 1, 1, 10, 1);
  s.flops_packed.reset();
  s.l3_misses.reset();
  m = derive_metrics(s);
  CHECK_FALSE(m.vectorization_pct.has_value());
  CHECK_FALSE(m.l3_miss_ratio_pct.has_value());
  CHECK(m.cpi == 1.0);
}

TEST_CASE("merge is a commutative, associative field-wise sum") {
  std::mt19937_64 rng(3);
  const auto random_sample = [&] {
    std::uniform_int_distribution<std::uint64_t> d(0, 1000);
    CounterSample s = full(d(rng), d(rng), d(rng), d(rng), d(rng), d(rng));
    if (d(rng) % 4 == 0) s.cycles.reset();
    if (d(rng) % 4 == 0) s.l3_requests.reset();
    s.wall_time_s = static_cast<double>(d(rng)) / 8.0;
    s.call_count = d(rng);
    return s;
  };
  for (int n = 0; n < 100; ++n) {
    const auto a = random_sample(), b = random_sample(), c = random_sample();
    CHECK(merge(a, b) == merge(b, a));
    CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
    const auto ab = merge(a, b);
    CHECK(ab.flops_scalar == *a.flops_scalar + *b.flops_scalar);
    CHECK(ab.cycles.has_value() == (a.cycles.has_value() && b.cycles.has_value()));
    CHECK(ab.call_count == a.call_count + b.call_count);
  }
}

TEST_CASE("backend parsing") {
  CHECK(parse_backend("auto") == Backend::Auto);
  CHECK(parse_backend("HARDWARE") == Backend::Hardware);
  CHECK(parse_backend("Software") == Backend::Software);
  CHECK(parse_backend("NONE") == Backend::None);
  CHECK_FALSE(parse_backend("likwid").has_value());
  CHECK(to_string(Backend::Software) == "SOFTWARE");
}

TEST_CASE("marker contract errors") {
  MarkerRegistry reg;
  CHECK_THROWS_AS(reg.stop("x"), std::logic_error);
  reg.start("x");
  CHECK_THROWS_AS(reg.start("x"), std::logic_error);
  reg.stop("x");
  CHECK_THROWS_AS(reg.stop("x"), std::logic_error);
  CHECK_THROWS_AS((void)reg.report("y"), std::out_of_range);
}

TEST_CASE("single visit around a sleep") {
  const UseBackend use(Backend::Software);
  MarkerRegistry reg;
  reg.start("sleep");
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  reg.stop("sleep");
  const auto rep = reg.report("sleep");
  CHECK(rep.aggregate.call_count == 1);
  CHECK(rep.aggregate.wall_time_s > 0.004);
  CHECK(rep.metrics.runtime_s == rep.aggregate.wall_time_s);
  // Empty region under the software backend: zero flops, no hardware fields.
  CHECK(rep.aggregate.flops_scalar == std::optional<std::uint64_t>(0));
  CHECK_FALSE(rep.aggregate.flops_packed.has_value());
  CHECK_FALSE(rep.aggregate.instructions_retired.has_value());
}

TEST_CASE("visits accumulate") {
  const UseBackend use(Backend::Software);
  MarkerRegistry reg;
  reg.start("r");
  tally_flops(10);
  reg.stop("r");
  tally_flops(1000);  // outside the region
  reg.start("r");
  tally_flops(5);
  reg.stop("r");
  const auto rep = reg.report("r");
  CHECK(rep.aggregate.call_count == 2);
  CHECK(rep.aggregate.flops_scalar == std::optional<std::uint64_t>(15));
}

TEST_CASE("distinct regions nest independently") {
  const UseBackend use(Backend::Software);
  MarkerRegistry reg;
  reg.start("outer");
  tally_flops(3);
  reg.start("inner");
  tally_flops(4);
  reg.stop("inner");
  tally_flops(5);
  reg.stop("outer");
  CHECK(reg.report("outer").aggregate.flops_scalar == std::optional<std::uint64_t>(12));
  CHECK(reg.report("inner").aggregate.flops_scalar == std::optional<std::uint64_t>(4));
  CHECK(reg.regions() == std::vector<std::string>{"inner", "outer"});
  reg.take("inner");
  CHECK(reg.regions() == std::vector<std::string>{"outer"});
}

TEST_CASE("aggregate equals the sum of per-thread samples") {
  const UseBackend use(Backend::Software);
  for (int threads : {1, 2, 4, 8}) {
    MarkerRegistry reg;
    reg.start("w");
    dpp::dispatch_field_map(1000, {threads, 10}, [](Index i) { tally_flops(static_cast<std::uint64_t>(i % 7)); });
    reg.stop("w");
    const auto rep = reg.report("w");
    std::uint64_t sum = 0;
    for (const auto& s : rep.per_thread) sum += s.flops_scalar.value_or(0);
    CHECK(rep.aggregate.flops_scalar == std::optional<std::uint64_t>(sum));
    CHECK(sum == 2997);  // sum over i<1000 of i % 7
  }
}

TEST_CASE("NONE backend records only time and calls") {
  const UseBackend use(Backend::None);
  MarkerRegistry reg;
  reg.start("n");
  tally_flops(9);
  reg.stop("n");
  const auto rep = reg.report("n");
  CHECK_FALSE(rep.aggregate.flops_scalar.has_value());
  CHECK_FALSE(rep.aggregate.cycles.has_value());
  CHECK(rep.aggregate.call_count == 1);
}

TEST_CASE("hardware backend degrades gracefully") {
  set_backend(Backend::Hardware);
  if (!hardware_available()) {
    CHECK(backend() == Backend::Software);
    CHECK_FALSE(HardwareCounters::open(default_counter_set()).has_value());
  } else {
    CHECK(backend() == Backend::Hardware);
  }
  set_backend(backend_from_env());
}

TEST_CASE("hardware counters on a busy loop") {
  if (!hardware_available()) {
    MESSAGE("hardware counters unavailable on this machine; skipped");
    return;
  }
  const UseBackend use(Backend::Hardware);
  MarkerRegistry reg;
  std::vector<std::uint64_t> instr;
  for (int rep = 0; rep < 2; ++rep) {
    const std::string name = "busy" + std::to_string(rep);
    reg.start(name);
    busy(20'000'000);
    reg.stop(name);
    const auto r = reg.report(name);
    REQUIRE(r.aggregate.instructions_retired.has_value());
    CHECK(*r.aggregate.instructions_retired > 0);
    REQUIRE(r.metrics.cpi.has_value());
    CHECK(*r.metrics.cpi > 0.0);
    instr.push_back(*r.aggregate.instructions_retired);
  }
  const double a = static_cast<double>(instr[0]), b = static_cast<double>(instr[1]);
  CHECK(std::abs(a - b) <= 0.1 * std::max(a, b));
}

TEST_CASE("scoped marker stops on scope exit") {
  MarkerRegistry reg;
  { const ScopedMarker m("scoped", reg); }
  CHECK(reg.report("scoped").aggregate.call_count == 1);
}

}  // TEST_SUITE
