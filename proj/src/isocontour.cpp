// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/isocontour.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mc_tables.hpp"
#include "vizdpp/perf.hpp"

namespace vizdpp::contour {

namespace {

// Software FLOP tally per emitted vertex: t = (iso - v0) / (v1 - v0) is 3
// operations, p0 + t (p1 - p0) is 9.
constexpr std::uint64_t kVertexFlops = 12;

using CaseRow = std::array<std::int8_t, 16>;

// Rows of the reference table, except that a case with more than four corners
// above takes its complement's triangulation with the winding reversed. The
// reference table resolves some complementary pairs differently; reducing by
// complement keeps c and 255 - c at the same triangle count.
const std::array<CaseRow, 256>& case_rows() {
  static const std::array<CaseRow, 256> rows = [] {
    std::array<CaseRow, 256> out = tables::kTriangles;
    for (std::size_t c = 0; c < 256; ++c) {
      if (std::popcount(static_cast<unsigned>(c)) <= 4) continue;
      const CaseRow& src = tables::kTriangles[255 - c];
      CaseRow row;
      row.fill(-1);
      for (std::size_t t = 0; t + 2 < 16 && src[t] >= 0; t += 3) {
        row[t] = src[t];
        row[t + 1] = src[t + 2];
        row[t + 2] = src[t + 1];
      }
      out[c] = row;
    }
    return out;
  }();
  return rows;
}

const std::array<std::uint8_t, 256>& tri_counts() {
  static const std::array<std::uint8_t, 256> counts = [] {
    std::array<std::uint8_t, 256> c{};
    for (std::size_t i = 0; i < 256; ++i) {
      int n = 0;
      while (n < 16 && case_rows()[i][static_cast<std::size_t>(n)] >= 0) ++n;
      c[i] = static_cast<std::uint8_t>(n / 3);
    }
    return c;
  }();
  return counts;
}

void require_volume(const StructuredField& field) {
  const Dims& d = field.dims();
  if (field.components() != 1) throw std::invalid_argument("isocontour input must be scalar");
  if (d.nx < 2 || d.ny < 2 || d.nz < 2) {
    throw std::invalid_argument("isocontour input needs at least 2 nodes per axis");
  }
}

// Reads the 8 corner values of cells on one grid and turns cells into
// triangles. Shared by the serial and dpp paths.
class CellVisitor {
 public:
  CellVisitor(const StructuredField& field, double isovalue)
      : field_(field), iso_(isovalue), cx_(field.dims().nx - 1), cy_(field.dims().ny - 1) {
    const Index nx = field.dims().nx;
    const Index plane = nx * field.dims().ny;
    for (std::size_t c = 0; c < 8; ++c) {
      corner_offsets_[c] = kCornerOffsets[c][0] + kCornerOffsets[c][1] * nx + kCornerOffsets[c][2] * plane;
    }
  }

  [[nodiscard]] IndexTriple cell_ijk(Index cell) const {
    const Index k = cell / (cx_ * cy_);
    const Index rem = cell - k * cx_ * cy_;
    const Index j = rem / cx_;
    return {rem - j * cx_, j, k};
  }

  void corners(const IndexTriple& c, std::array<double, 8>& out) const {
    const float* base = &field_.values()[static_cast<std::size_t>(
        (c.k * field_.dims().ny + c.j) * field_.dims().nx + c.i)];
    for (std::size_t n = 0; n < 8; ++n) out[n] = base[corner_offsets_[n]];
  }

  [[nodiscard]] int classify(Index cell) const {
    std::array<double, 8> v{};
    corners(cell_ijk(cell), v);
    return classify_cell(v, iso_);
  }

  // Writes the triangles of `cell` (case `cs`) into vertex slots starting at
  // 3 * first_triangle.
  void emit(Index cell, int cs, Index first_triangle, TriangleMesh& mesh) const {
    const IndexTriple ijk = cell_ijk(cell);
    std::array<double, 8> v{};
    corners(ijk, v);
    std::array<Vec3, 8> p{};
    for (std::size_t n = 0; n < 8; ++n) {
      p[n] = field_.node_position(ijk.i + kCornerOffsets[n][0], ijk.j + kCornerOffsets[n][1],
                                  ijk.k + kCornerOffsets[n][2]);
    }
    const auto edges = triangle_edges(cs);
    Index t = first_triangle;
    for (std::size_t e = 0; e < edges.size(); e += 3, ++t) {
      for (std::size_t m = 0; m < 3; ++m) {
        const auto& ec = kEdgeCorners[static_cast<std::size_t>(edges[e + m])];
        const auto a = static_cast<std::size_t>(ec[0]);
        const auto b = static_cast<std::size_t>(ec[1]);
        const Vec3 q = interpolate_edge(p[a], p[b], v[a], v[b], iso_);
        mesh.vertices[static_cast<std::size_t>(3 * t) + m] = {
            static_cast<float>(q[0]), static_cast<float>(q[1]), static_cast<float>(q[2])};
      }
      mesh.triangles[static_cast<std::size_t>(t)] = {3 * t, 3 * t + 1, 3 * t + 2};
    }
    perf::tally_flops(kVertexFlops * edges.size());
  }

  [[nodiscard]] Index cells() const { return field_.dims().cells(); }

 private:
  const StructuredField& field_;
  double iso_;
  Index cx_;
  Index cy_;
  std::array<Index, 8> corner_offsets_{};
};

void resize_mesh(TriangleMesh& mesh, Index triangles) {
  mesh.vertices.resize(static_cast<std::size_t>(3 * triangles));
  mesh.triangles.resize(static_cast<std::size_t>(triangles));
}

}  // namespace

std::uint16_t edge_mask(int c) { return tables::kEdgeMask.at(static_cast<std::size_t>(c)); }

std::span<const std::int8_t> triangle_edges(int c) {
  const auto& row = case_rows().at(static_cast<std::size_t>(c));
  return {row.data(), static_cast<std::size_t>(3 * tri_counts()[static_cast<std::size_t>(c)])};
}

int triangle_count(int c) { return tri_counts().at(static_cast<std::size_t>(c)); }

int classify_cell(std::span<const double, 8> corners, double isovalue) {
  int cs = 0;
  for (std::size_t b = 0; b < 8; ++b) {
    if (std::isnan(corners[b])) throw std::domain_error("NaN corner value in isocontour input");
    if (corners[b] > isovalue) cs |= 1 << b;
  }
  return cs;
}

Vec3 interpolate_edge(const Vec3& p0, const Vec3& p1, double v0, double v1, double isovalue) {
  const double dv = v1 - v0;
  if (std::abs(dv) < 1e-12) {
    return {0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1]), 0.5 * (p0[2] + p1[2])};
  }
  const double t = (isovalue - v0) / dv;
  return {p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]), p0[2] + t * (p1[2] - p0[2])};
}

TriangleMesh contour_serial(const StructuredField& field, double isovalue) {
  require_volume(field);
  const CellVisitor visitor(field, isovalue);
  TriangleMesh mesh;
  Index total = 0;
  for (Index cell = 0; cell < visitor.cells(); ++cell) {
    const int cs = visitor.classify(cell);
    const int n = triangle_count(cs);
    if (n == 0) continue;
    resize_mesh(mesh, total + n);
    visitor.emit(cell, cs, total, mesh);
    total += n;
  }
  return mesh;
}

std::vector<Index> classify_counts(const StructuredField& field, double isovalue,
                                   const dpp::ExecConfig& cfg) {
  require_volume(field);
  const CellVisitor visitor(field, isovalue);
  std::vector<Index> counts(static_cast<std::size_t>(visitor.cells()));
  dpp::dispatch_field_map(visitor.cells(), cfg, [&](Index cell) {
    counts[static_cast<std::size_t>(cell)] = triangle_count(visitor.classify(cell));
  });
  return counts;
}

TriangleMesh contour_dpp(const StructuredField& field, double isovalue, const dpp::ExecConfig& cfg,
                         DppOptions options) {
  require_volume(field);
  const CellVisitor visitor(field, isovalue);
  const Index ncells = visitor.cells();

  // Phase 1: classify.
  std::vector<std::uint8_t> cases(static_cast<std::size_t>(ncells));
  std::vector<Index> counts(static_cast<std::size_t>(ncells));
  dpp::dispatch_field_map(ncells, cfg, [&](Index cell) {
    const int cs = visitor.classify(cell);
    cases[static_cast<std::size_t>(cell)] = static_cast<std::uint8_t>(cs);
    counts[static_cast<std::size_t>(cell)] = triangle_count(cs);
  });

  // Phase 2: scatter-count.
  const dpp::ScatterPlan plan = dpp::build_scatter(std::move(counts), cfg);

  // Phase 3: generate at the scattered offsets.
  TriangleMesh mesh;
  resize_mesh(mesh, plan.total);
  dpp::dispatch_field_map(ncells, cfg, [&](Index cell) {
    const auto u = static_cast<std::size_t>(cell);
    if (plan.counts[u] == 0) return;
    const int cs = options.reclassify ? visitor.classify(cell) : cases[u];
    visitor.emit(cell, cs, plan.offsets[u], mesh);
  });
  return mesh;
}

std::vector<CanonicalTriangle> canonical_triangles(const TriangleMesh& mesh) {
  std::vector<CanonicalTriangle> out;
  out.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    CanonicalTriangle c = {mesh.vertices[static_cast<std::size_t>(t[0])],
                           mesh.vertices[static_cast<std::size_t>(t[1])],
                           mesh.vertices[static_cast<std::size_t>(t[2])]};
    std::sort(c.begin(), c.end());
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  char header[80] = {};
  std::strncpy(header, "vizdpp isosurface", sizeof(header) - 1);
  out.write(header, sizeof(header));
  const auto n = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const auto& tri : mesh.triangles) {
    const auto& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const auto& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const auto& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const float ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const float vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    float nrm[3] = {uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx};
    const float len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
    if (len > 0.0f) {
      for (float& x : nrm) x /= len;
    }
    out.write(reinterpret_cast<const char*>(nrm), sizeof(nrm));
    out.write(reinterpret_cast<const char*>(a.data()), 3 * sizeof(float));
    out.write(reinterpret_cast<const char*>(b.data()), 3 * sizeof(float));
    out.write(reinterpret_cast<const char*>(c.data()), 3 * sizeof(float));
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), sizeof(attr));
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(9);
  for (const auto& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace vizdpp::contour
