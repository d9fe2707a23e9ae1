// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <doctest.h>

#include <bitset>
#include <cmath>
#include <fstream>
#include <set>

#include "vizdpp/isocontour.hpp"
#include "vizdpp/verify.hpp"

using namespace vizdpp;
using namespace vizdpp::contour;

namespace {

StructuredField single_cell(unsigned above) {
  StructuredField f({2, 2, 2}, 1);
  for (unsigned b = 0; b < 8; ++b) {
    const auto& o = kCornerOffsets[b];
    f.at(o[0], o[1], o[2]) = (above >> b) & 1u ? 1.0f : -1.0f;
  }
  return f;
}

std::uint16_t used_edges(int c) {
  std::uint16_t m = 0;
  for (auto e : triangle_edges(c)) m = static_cast<std::uint16_t>(m | (1u << e));
  return m;
}

}  // namespace

TEST_SUITE("isocontour") {

TEST_CASE("case tables") {
  CHECK(triangle_count(0) == 0);
  CHECK(triangle_count(255) == 0);
  CHECK(edge_mask(0) == 0);
  CHECK(edge_mask(255) == 0);
  CHECK(triangle_count(1) == 1);
  CHECK(edge_mask(1) == ((1u << 0) | (1u << 3) | (1u << 8)));
  for (int c = 0; c < 256; ++c) {
    CAPTURE(c);
    CHECK(edge_mask(c) == edge_mask(255 - c));
    CHECK(used_edges(c) == edge_mask(c));
    CHECK(triangle_count(c) <= 5);
    // An edge is cut exactly when its two corners classify differently.
    std::uint16_t expect = 0;
    for (std::size_t e = 0; e < 12; ++e) {
      const int a = kEdgeCorners[e][0], b = kEdgeCorners[e][1];
      if (((c >> a) & 1) != ((c >> b) & 1)) expect = static_cast<std::uint16_t>(expect | (1u << e));
    }
    CHECK(edge_mask(c) == expect);
  }
}

TEST_CASE("classify_cell") {
  std::array<double, 8> v{};
  v.fill(-1.0);
  CHECK(classify_cell(v, 0.0) == 0);
  v.fill(1.0);
  CHECK(classify_cell(v, 0.0) == 255);
  v.fill(-1.0);
  v[0] = 1.0;
  CHECK(classify_cell(v, 0.0) == 1);
  v[0] = 0.0;  // equal counts as below
  CHECK(classify_cell(v, 0.0) == 0);
  v[3] = std::nan("");
  CHECK_THROWS_AS(classify_cell(v, 0.0), std::domain_error);
}

TEST_CASE("interpolate_edge") {
  const Vec3 a{0, 0, 0}, b{2, 4, -2};
  CHECK(interpolate_edge(a, b, 0.0, 1.0, 0.5) == Vec3{1, 2, -1});
  CHECK(interpolate_edge(a, b, 3.0, 5.0, 3.0) == a);
  CHECK(interpolate_edge(a, b, 1.0, 1.0, 1.0) == Vec3{1, 2, -1});
}

TEST_CASE("single cells") {
  CHECK(contour_serial(single_cell(0x00), 0.0).triangle_count() == 0);
  CHECK(contour_serial(single_cell(0xff), 0.0).triangle_count() == 0);
  for (unsigned b = 0; b < 8; ++b) {
    const auto mesh = contour_serial(single_cell(1u << b), 0.0);
    CHECK(mesh.triangle_count() == 1);
    // The triangle's vertices are the midpoints of the three edges at corner b.
    for (const auto& v : mesh.vertices) {
      int halves = 0;
      for (float x : v) halves += x == 0.5f;
      CHECK(halves == 1);
    }
  }
}

TEST_CASE("mesh is well formed") {
  const auto f = gen_noise_field({9, 8, 7}, 3);
  for (const auto& mesh : {contour_serial(f, 0.5), contour_dpp(f, 0.5, {3, 5})}) {
    CHECK(mesh.vertices.size() == 3 * mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
      for (Index i : t) {
        CHECK(i >= 0);
        CHECK(i < static_cast<Index>(mesh.vertices.size()));
      }
    }
    for (const auto& v : mesh.vertices) {
      for (float x : v) CHECK_FALSE(std::isnan(x));
    }
  }
}

TEST_CASE("sphere: counts match the brute-force oracle") {
  const auto f = gen_sphere_field({32, 32, 32}, {15.5, 15.5, 15.5}, 10.0);
  const auto counts = verify::mc_count_oracle(f, 0.0);
  Index total = 0;
  for (Index n : counts) total += n;
  const auto serial = contour_serial(f, 0.0);
  CHECK(static_cast<Index>(serial.triangle_count()) == total);
  CHECK(classify_counts(f, 0.0, {4, 100}) == counts);
  const auto canon = canonical_triangles(serial);
  for (int t : {1, 2, 4, 8}) {
    CHECK(canonical_triangles(contour_dpp(f, 0.0, {t, 1000})) == canon);
    CHECK(canonical_triangles(contour_dpp(f, 0.0, {t, 7}, {true})) == canon);
  }
}

TEST_CASE("dpp output is identical across thread counts") {
  const auto f = gen_noise_field({12, 11, 10}, 9);
  const auto ref = contour_dpp(f, 0.4, {1, 4096});
  for (int t : {2, 4, 8}) {
    const auto m = contour_dpp(f, 0.4, {t, 13});
    CHECK(m.vertices == ref.vertices);
    CHECK(m.triangles == ref.triangles);
  }
}

TEST_CASE("vertices lie on the isosurface") {
  const auto f = gen_noise_field({16, 16, 16}, 4);
  const auto mesh = contour_dpp(f, 0.5, {2, 64});
  const auto [lo, hi] = f.value_range();
  for (const auto& v : mesh.vertices) {
    const auto s = interpolate(f, {v[0], v[1], v[2]});
    REQUIRE(s.has_value());
    CHECK(std::abs((*s)[0] - 0.5) <= 1e-4 * (hi - lo));
  }
}

TEST_CASE("complement symmetry") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = gen_noise_field({10, 10, 10}, seed, -1.0f, 1.0f);
    StructuredField g(f.dims(), 1);
    for (std::size_t i = 0; i < g.values().size(); ++i) g.values()[i] = -f.values()[i];
    CHECK(contour_serial(f, 0.25).triangle_count() == contour_serial(g, -0.25).triangle_count());
  }
}

TEST_CASE("case conservation between phases") {
  const auto f = gen_noise_field({14, 9, 6}, 8);
  Index total = 0;
  for (Index n : classify_counts(f, 0.5, {2, 11})) total += n;
  CHECK(static_cast<Index>(contour_dpp(f, 0.5, {2, 11}).triangle_count()) == total);
}

TEST_CASE("rejects unsuitable input") {
  CHECK_THROWS_AS(contour_serial(StructuredField({4, 4, 1}, 1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(contour_dpp(StructuredField({4, 4, 4}, 3), 0.0, {}), std::invalid_argument);
  StructuredField bad({2, 2, 2}, 1);
  bad.at(1, 1, 1) = std::nanf("");
  CHECK_THROWS_AS(contour_serial(bad, 0.0), std::domain_error);
  CHECK_THROWS_AS(contour_dpp(bad, 0.0, {2, 1}), std::domain_error);
}

TEST_CASE("writers") {
  const auto mesh = contour_serial(single_cell(1), 0.0);
  const auto dir = std::filesystem::temp_directory_path() / "vizdpp_mesh";
  std::filesystem::create_directories(dir);
  write_stl(mesh, dir / "m.stl");
  CHECK(std::filesystem::file_size(dir / "m.stl") == 80 + 4 + 50);
  write_obj(mesh, dir / "m.obj");
  std::ifstream in(dir / "m.obj");
  std::string line;
  int v = 0, f = 0;
  while (std::getline(in, line)) {
    v += line.rfind("v ", 0) == 0;
    f += line.rfind("f ", 0) == 0;
  }
  CHECK(v == 3);
  CHECK(f == 1);
}

}  // TEST_SUITE
