// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

/**
 * @file isocontour.hpp
 * @brief Marching Cubes isosurface extraction on 3D scalar grids.
 *
 * Cell corners are numbered with bit b of the case index belonging to
 * corner b:
 *
 *        7 ---- 6          corner  offset (di,dj,dk)
 *       /|     /|            0      (0,0,0)     4  (0,0,1)
 *      4 ---- 5 |            1      (1,0,0)     5  (1,0,1)
 *      | 3 ---|-2            2      (1,1,0)     6  (1,1,1)
 *      |/     |/             3      (0,1,0)     7  (0,1,1)
 *      0 ---- 1
 *
 * Edges: 0:(0,1) 1:(1,2) 2:(2,3) 3:(3,0) 4:(4,5) 5:(5,6) 6:(6,7) 7:(7,4)
 *        8:(0,4) 9:(1,5) 10:(2,6) 11:(3,7)
 *
 * A corner counts as "above" when its value is strictly greater than the
 * isovalue. The tables are the classic 256-case lookup without ambiguity
 * resolution; a case with more than four corners above uses the triangulation
 * of its complement with reversed winding, so cases c and 255 - c always give
 * the same triangle count. Vertices are emitted per triangle, without welding.
 */

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "vizdpp/dpp.hpp"
#include "vizdpp/field.hpp"

namespace vizdpp::contour {

inline constexpr std::array<std::array<int, 3>, 8> kCornerOffsets = {{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

inline constexpr std::array<std::array<int, 2>, 12> kEdgeCorners = {{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

/// 12-bit mask of the edges cut in case `c`.
std::uint16_t edge_mask(int c);
/// Edge indices of case `c`, three per triangle (at most 15 entries).
std::span<const std::int8_t> triangle_edges(int c);
int triangle_count(int c);

/// Case index for corner values given in the documented corner order.
/// Throws std::domain_error on a NaN corner value.
int classify_cell(std::span<const double, 8> corners, double isovalue);

/// p0 + t (p1 - p0) with t = (iso - v0) / (v1 - v0); the midpoint when
/// |v1 - v0| < 1e-12.
Vec3 interpolate_edge(const Vec3& p0, const Vec3& p1, double v0, double v1, double isovalue);

struct TriangleMesh {
  std::vector<std::array<float, 3>> vertices;
  std::vector<std::array<Index, 3>> triangles;

  [[nodiscard]] std::size_t triangle_count() const { return triangles.size(); }
};

/// Single-threaded cell sweep. Throws std::invalid_argument for a field that
/// is not a 3D scalar grid with at least 2 nodes per axis.
TriangleMesh contour_serial(const StructuredField& field, double isovalue);

struct DppOptions {
  /// Recompute case indices in the generate phase instead of reusing the
  /// classify phase's results.
  bool reclassify = false;
};

/// Classify -> scatter-count -> generate, each phase a dpp dispatch over cells.
TriangleMesh contour_dpp(const StructuredField& field, double isovalue, const dpp::ExecConfig& cfg,
                         DppOptions options = {});

/// Per-cell triangle counts from the classify phase, exposed for tests.
std::vector<Index> classify_counts(const StructuredField& field, double isovalue,
                                   const dpp::ExecConfig& cfg);

using CanonicalTriangle = std::array<std::array<float, 3>, 3>;

/// Triangles as vertex triples, each sorted lexicographically, the list
/// sorted too. Two meshes are equal as triangle multisets iff these match.
std::vector<CanonicalTriangle> canonical_triangles(const TriangleMesh& mesh);

enum class Strategy { Serial, Dpp };
inline constexpr std::string_view kStrategyNames[] = {"serial", "dpp"};

void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path);
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace vizdpp::contour
