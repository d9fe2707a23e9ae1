// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <doctest.h>

#include <cmath>

#include "vizdpp/advection.hpp"
#include "vizdpp/perf.hpp"

using namespace vizdpp;
using namespace vizdpp::advect;

namespace {

StructuredField constant_field(const Dims& d, Vec3 v, Vec3 origin = {0, 0, 0}) {
  StructuredField f(d, 3, origin);
  for (Index n = 0; n < d.points(); ++n) {
    for (int c = 0; c < 3; ++c) f.values()[static_cast<std::size_t>(3 * n + c)] = static_cast<float>(v[c]);
  }
  return f;
}

bool inside(const StructuredField& f, const Vec3& p) {
  const Vec3 lo = f.origin(), hi = f.max_corner();
  for (std::size_t a = 0; a < 3; ++a) {
    if (p[a] < lo[a] - 1e-12 || p[a] > hi[a] + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("advection") {

TEST_CASE("rk4 step") {
  SUBCASE("constant field is integrated exactly") {
    const auto f = constant_field({3, 3, 3}, {1, 0, 0}, {-1, -1, -1});
    const auto p = rk4_step(f, {0, 0, 0}, 0.1);
    REQUIRE(p.has_value());
    CHECK((*p)[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK((*p)[1] == 0.0);
  }
  SUBCASE("zero field leaves the point in place") {
    const auto f = constant_field({3, 3, 3}, {0, 0, 0});
    CHECK(*rk4_step(f, {1, 1, 1}, 0.5) == Vec3{1, 1, 1});
  }
  SUBCASE("rotation against the analytic orbit") {
    const auto f = gen_rotational_field({8, 8, 4});
    const double h = 0.01;
    const auto p = *rk4_step(f, {1, 0, 0}, h);
    CHECK(std::abs(p[0] - std::cos(h)) < 1e-9);
    CHECK(std::abs(p[1] - std::sin(h)) < 1e-9);
    CHECK(std::abs(p[2]) < 1e-9);
  }
  SUBCASE("local error is fifth order") {
    const auto f = gen_rotational_field({8, 8, 4});
    const auto err = [&](double h) {
      const auto p = *rk4_step(f, {1, 0, 0}, h);
      return std::hypot(p[0] - std::cos(h), p[1] - std::sin(h));
    };
    for (double h : {0.2, 0.1}) {
      const double ratio = err(h) / err(h / 2);
      CHECK(ratio > 24.0);
      CHECK(ratio < 40.0);
    }
  }
  SUBCASE("stage outside the domain") {
    const auto f = constant_field({3, 3, 3}, {1, 0, 0});
    CHECK_FALSE(rk4_step(f, {1.9, 1, 1}, 0.5).has_value());
  }
}

TEST_CASE("trace_streamline terminations") {
  SUBCASE("seed outside") {
    const auto f = gen_rotational_field({8, 8, 4});
    const auto l = trace_streamline(f, {3, {100, 0, 0}}, {0.1, 10});
    CHECK(l.points.size() == 1);
    CHECK(l.termination == Termination::OutOfBounds);
    CHECK(l.seed_id == 3);
  }
  SUBCASE("constant field runs into the wall") {
    // Distance 7.5 at speed 2 with h = 0.25: each step advances 0.5.
    const auto f = constant_field({9, 3, 3}, {2, 0, 0});
    const auto l = trace_streamline(f, {0, {0.5, 1, 1}}, {0.25, 1000});
    CHECK(l.termination == Termination::OutOfBounds);
    CHECK(l.points.size() == static_cast<std::size_t>(std::floor(7.5 / (0.25 * 2))) + 1);
  }
  SUBCASE("zero velocity") {
    const auto f = constant_field({3, 3, 3}, {0, 0, 0});
    const auto l = trace_streamline(f, {0, {1, 1, 1}}, {0.1, 50});
    CHECK(l.termination == Termination::ZeroVelocity);
    CHECK(l.points.size() == 1);
  }
  SUBCASE("long orbit keeps its radius") {
    const auto f = gen_rotational_field({32, 32, 32});
    const auto l = trace_streamline(f, {0, {1, 0, 0}}, {0.01, 1000});
    CHECK(l.points.size() == 1001);
    CHECK(l.termination == Termination::MaxSteps);
    CHECK(std::abs(std::hypot(l.points.back()[0], l.points.back()[1]) - 1.0) < 1e-6);
  }
  SUBCASE("bad params") {
    const auto f = gen_rotational_field({4, 4, 4});
    CHECK_THROWS_AS(trace_streamline(f, {0, {0, 0, 0}}, {0.0, 10}), std::invalid_argument);
    CHECK_THROWS_AS(trace_streamline(f, {0, {0, 0, 0}}, {0.1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(trace_streamline(StructuredField({4, 4, 4}, 1), {0, {0, 0, 0}}, {}),
                    std::invalid_argument);
  }
}

TEST_CASE("flop tally per accepted step") {
  perf::set_backend(perf::Backend::Software);
  const auto f = gen_rotational_field({16, 16, 16});
  perf::MarkerRegistry reg;
  reg.start("rk4");
  const auto l = trace_streamline(f, {0, {2, 0, 0}}, {0.05, 123});
  reg.stop("rk4");
  CHECK(l.points.size() == 124);
  CHECK(reg.report("rk4").aggregate.flops_scalar == std::optional<std::uint64_t>(123 * kRk4StepFlops));
  perf::set_backend(perf::backend_from_env());
}

TEST_CASE("diagonal seeds") {
  const auto f = gen_rotational_field({11, 11, 11});
  SUBCASE("n = 2 gives the inset corners") {
    const auto s = make_diagonal_seeds(f, 2);
    CHECK(s[0].position == Vec3{-4.5, -4.5, -4.5});
    CHECK(s[1].position == Vec3{4.5, 4.5, 4.5});
  }
  SUBCASE("n = 3 midpoint is the domain centre") {
    const auto s = make_diagonal_seeds(f, 3);
    for (double x : s[1].position) CHECK(x == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("n = 500 spacing is uniform") {
    const auto s = make_diagonal_seeds(f, 500);
    const double d0 = std::hypot(s[1].position[0] - s[0].position[0], s[1].position[1] - s[0].position[1],
                                 s[1].position[2] - s[0].position[2]);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const auto& a = s[i - 1].position;
      const auto& b = s[i].position;
      CHECK(std::abs(std::hypot(b[0] - a[0], b[1] - a[1], b[2] - a[2]) - d0) <= 1e-6 * d0);
      CHECK(s[i].id == static_cast<Index>(i));
      CHECK(inside(f, b));
    }
  }
  SUBCASE("n < 2") { CHECK_THROWS_AS(make_diagonal_seeds(f, 1), std::invalid_argument); }
}

TEST_CASE("serial and parallel-over-seeds agree bitwise") {
  const auto f = gen_rotational_field({24, 24, 24});
  const auto seeds = make_diagonal_seeds(f, 60);
  const IntegrationParams params{default_step_size(f), 300};
  const auto serial = trace_serial(f, seeds, params);
  for (int t : {1, 2, 4, 8}) {
    for (Index chunk : {Index{1}, Index{4096}}) {
      CHECK(trace_parallel_over_seeds(f, seeds, params, {t, chunk}) == serial);
    }
  }
  CHECK(trace_serial(f, {}, params).empty());
  CHECK(trace_parallel_over_seeds(f, {}, params, {4, 1}).empty());
  CHECK(trace_serial(f, std::span(seeds).first(1), params)[0] == trace_streamline(f, seeds[0], params));
}

TEST_CASE("rotational streamlines stay inside and orbits inside the domain run to the end") {
  const auto f = gen_rotational_field({32, 32, 32});
  const auto seeds = make_diagonal_seeds(f, 100);
  const auto lines = trace_serial(f, seeds, {default_step_size(f), 1000});
  // Orbits with xy-radius below the inscribed radius minus one cell never
  // leave the grid; seeds near the diagonal's ends sweep past the faces.
  const double half = 0.5 * (f.max_corner()[0] - f.origin()[0]);
  const double safe = half - f.spacing()[0];
  int full = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& p = seeds[i].position;
    for (const auto& q : lines[i].points) CHECK(inside(f, q));
    if (std::hypot(p[0], p[1]) < safe) {
      CHECK(lines[i].termination == Termination::MaxSteps);
      CHECK(lines[i].points.size() == 1001);
      ++full;
    } else if (std::hypot(p[0], p[1]) > half) {
      CHECK(lines[i].termination == Termination::OutOfBounds);
    }
  }
  CHECK(full > 50);
}

}  // TEST_SUITE
