// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <doctest.h>

#include <cmath>

#include "vizdpp/perf.hpp"
#include "vizdpp/stencil.hpp"
#include "vizdpp/verify.hpp"

using namespace vizdpp;
using namespace vizdpp::stencil;

namespace {

constexpr Strategy kAll[] = {Strategy::Direct, Strategy::FieldMap, Strategy::PointNeighborhood};

std::vector<float> values(const StructuredField& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

TEST_SUITE("stencil") {

TEST_CASE("gaussian weights") {
  SUBCASE("size 1") {
    const auto k = build_gaussian_weights(1, 0.7);
    CHECK(k.weights == std::vector<double>{1.0});
  }
  SUBCASE("size 19 normalized") {
    const auto k = build_gaussian_weights(19, 0.33);
    double s = 0;
    for (double w : k.weights) s += w;
    CHECK(std::abs(s - 1.0) <= 1e-12);
    CHECK(k.radius == 9);
  }
  SUBCASE("size 3 neighbour ratio") {
    const auto k = build_gaussian_weights(3, 0.33);
    CHECK(k.at(1, 0) / k.at(0, 0) == doctest::Approx(std::exp(-0.5 * (1 / 0.33) * (1 / 0.33))).epsilon(1e-12));
    CHECK(k.at(-1, 0) == k.at(1, 0));
    CHECK(k.at(0, 1) == k.at(1, 0));
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(build_gaussian_weights(4, 0.33), std::invalid_argument);
    CHECK_THROWS_AS(build_gaussian_weights(-1, 0.33), std::invalid_argument);
    CHECK_THROWS_AS(build_gaussian_weights(3, 0.0), std::invalid_argument);
  }
}

TEST_CASE("constant image is preserved") {
  StructuredField img({23, 17, 1}, 1);
  for (float& v : img.values()) v = 3.25f;
  const auto k = build_gaussian_weights(7, 0.33);
  for (auto s : kAll) {
    const auto out = smooth(s, img, k, {3, 50});
    for (float v : out.values()) CHECK(v == doctest::Approx(3.25).epsilon(1e-6));
  }
}

TEST_CASE("interior impulse reproduces the kernel") {
  const auto img = gen_impulse_image({15, 15, 1}, 7, 7);
  const auto k = build_gaussian_weights(5, 0.33);
  for (auto s : kAll) {
    const auto out = smooth(s, img, k, {2, 10});
    for (Index j = 0; j < 15; ++j) {
      for (Index i = 0; i < 15; ++i) {
        const Index di = i - 7, dj = j - 7;
        const double expect = (std::abs(di) <= 2 && std::abs(dj) <= 2)
                                  ? k.at(static_cast<int>(di), static_cast<int>(dj))
                                  : 0.0;
        CHECK(out.at(i, j, 0) == doctest::Approx(expect).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("corner impulse uses the clipped weight sum") {
  const auto img = gen_impulse_image({6, 5, 1}, 0, 0);
  const auto k = build_gaussian_weights(3, 0.33);
  const double in_bounds = k.at(0, 0) + k.at(1, 0) + k.at(0, 1) + k.at(1, 1);
  for (auto s : kAll) {
    const auto out = smooth(s, img, k, {1, 4096});
    CHECK(out.at(0, 0, 0) == doctest::Approx(k.at(0, 0) / in_bounds).epsilon(1e-6));
  }
}

TEST_CASE("strategies are bit-identical and match the oracle") {
  for (int size : {5, 19}) {
    const auto k = build_gaussian_weights(size, 0.33);
    const auto img = gen_noise_field({64, 64, 1}, static_cast<std::uint64_t>(size));
    const auto ref = smooth_direct(img, k, {1, 4096});
    const auto oracle = verify::naive_smooth(img, k);
    for (std::size_t p = 0; p < oracle.size(); ++p) {
      REQUIRE(std::abs(ref.values()[p] - oracle[p]) <= 1e-6 * std::abs(oracle[p]));
    }
    for (auto s : kAll) {
      for (int t : {1, 2, 4}) {
        for (Index chunk : {Index{1}, Index{97}, Index{4096}}) {
          CHECK(values(smooth(s, img, k, {t, chunk})) == values(ref));
        }
      }
    }
  }
}

TEST_CASE("degenerate shapes") {
  const auto k = build_gaussian_weights(9, 1.0);
  for (const Dims d : {Dims{1, 1, 1}, Dims{1, 13, 1}, Dims{13, 1, 1}, Dims{3, 2, 1}}) {
    const auto img = gen_noise_field(d, 5);
    const auto ref = verify::naive_smooth(img, k);
    for (auto s : kAll) {
      const auto out = smooth(s, img, k, {2, 3});
      for (std::size_t p = 0; p < ref.size(); ++p) {
        CHECK(out.values()[p] == doctest::Approx(ref[p]).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("rejects non-image input") {
  const auto k = build_gaussian_weights(3, 0.33);
  CHECK_THROWS_AS(smooth_direct(StructuredField({4, 4, 2}, 1), k, {}), std::invalid_argument);
  CHECK_THROWS_AS(smooth_field_map(StructuredField({4, 4, 1}, 3), k, {}), std::invalid_argument);
  CHECK_THROWS_AS(smooth_point_neighborhood(StructuredField({4, 4, 2}, 1), k, {}),
                  std::invalid_argument);
}

TEST_CASE("software flop tally") {
  perf::set_backend(perf::Backend::Software);
  CHECK(verify::stencil_flops_oracle(4, 4, 3) == 212);
  const auto k = build_gaussian_weights(3, 0.33);
  const auto img = gen_noise_field({4, 4, 1}, 1);
  for (auto s : kAll) {
    for (int t : {1, 2, 4}) {
      perf::MarkerRegistry reg;
      reg.start("s");
      smooth(s, img, k, {t, 3});
      reg.stop("s");
      CHECK(reg.report("s").aggregate.flops_scalar == std::optional<std::uint64_t>(212));
    }
  }
  perf::set_backend(perf::backend_from_env());
}

}  // TEST_SUITE
