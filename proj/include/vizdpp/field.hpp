// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

/**
 * @file field.hpp
 * @brief Structured-grid containers shared by every kernel.
 *
 * A StructuredField is a uniform rectilinear grid of 32-bit samples. Values
 * are stored row-major with x fastest and vector components interleaved, so
 * the flat offset of component c at node (i,j,k) is
 *
 *     ((k * ny + j) * nx + i) * components + c
 *
 * 2D data is a 3D field with nz == 1. Fields are immutable once built and may
 * be read concurrently from any number of workers.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vizdpp {

using Index = std::int64_t;
using Vec3 = std::array<double, 3>;

struct Dims {
  Index nx = 1;
  Index ny = 1;
  Index nz = 1;

  /// Throws std::invalid_argument when an axis is < 1 or the product
  /// overflows Index.
  void validate() const;

  [[nodiscard]] Index points() const { return nx * ny * nz; }
  [[nodiscard]] Index cells() const;
  [[nodiscard]] bool is_2d() const { return nz == 1; }
  [[nodiscard]] Index axis(int a) const { return a == 0 ? nx : (a == 1 ? ny : nz); }

  friend bool operator==(const Dims&, const Dims&) = default;
};

struct IndexTriple {
  Index i = 0;
  Index j = 0;
  Index k = 0;
  friend bool operator==(const IndexTriple&, const IndexTriple&) = default;
};

/// (k*ny + j)*nx + i. Throws std::out_of_range for an index outside dims.
Index linear_index(Index i, Index j, Index k, const Dims& dims);
/// Inverse of linear_index. Throws std::out_of_range.
IndexTriple unravel_index(Index linear, const Dims& dims);

struct CellLocation {
  bool inside = false;
  IndexTriple cell;
  Vec3 uvw{0.0, 0.0, 0.0};
};

/// Up to three interpolated component values; only the first `components`
/// entries are meaningful.
using Sample = std::array<double, 3>;

class StructuredField {
 public:
  StructuredField(Dims dims, int components, Vec3 origin = {0.0, 0.0, 0.0},
                  Vec3 spacing = {1.0, 1.0, 1.0});
  StructuredField(Dims dims, int components, Vec3 origin, Vec3 spacing,
                  std::vector<float> values);

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] int components() const { return components_; }
  [[nodiscard]] const Vec3& origin() const { return origin_; }
  [[nodiscard]] const Vec3& spacing() const { return spacing_; }

  [[nodiscard]] std::span<const float> values() const { return values_; }
  [[nodiscard]] std::span<float> values() { return values_; }

  [[nodiscard]] float at(Index i, Index j, Index k, int c = 0) const {
    return values_[static_cast<std::size_t>((((k * dims_.ny + j) * dims_.nx + i) * components_) + c)];
  }
  float& at(Index i, Index j, Index k, int c = 0) {
    return values_[static_cast<std::size_t>((((k * dims_.ny + j) * dims_.nx + i) * components_) + c)];
  }

  /// World-space position of node (i,j,k).
  [[nodiscard]] Vec3 node_position(Index i, Index j, Index k) const;
  /// Maximum corner of the domain, origin + spacing * (dims - 1).
  [[nodiscard]] Vec3 max_corner() const;

  /// Minimum and maximum over all stored values (all components).
  [[nodiscard]] std::pair<float, float> value_range() const;

 private:
  Dims dims_;
  int components_;
  Vec3 origin_;
  Vec3 spacing_;
  std::vector<float> values_;
};

/// Locates the cell containing p. Points on the maximum face are assigned to
/// the last cell (u == 1). On an axis with a single node the point must sit
/// on that node's plane; cell index and parametric coordinate are then 0.
CellLocation locate_cell(const StructuredField& field, const Vec3& p);

/// Trilinear (bilinear for 2D) interpolation of every component at p.
/// Returns std::nullopt when p lies outside the domain.
std::optional<Sample> interpolate(const StructuredField& field, const Vec3& p);

/// Same as interpolate() but with a precomputed location. Requires loc.inside.
Sample interpolate_at(const StructuredField& field, const CellLocation& loc);

// Synthetic datasets.

/// Signed distance to a sphere: |node - center| - radius (negative inside).
StructuredField gen_sphere_field(const Dims& dims, const Vec3& center, double radius,
                                 Vec3 origin = {0.0, 0.0, 0.0}, Vec3 spacing = {1.0, 1.0, 1.0});

/// Rigid rotation about the z axis, v = (-y, x, 0), on a grid centred on the
/// world origin with uniform spacing.
StructuredField gen_rotational_field(const Dims& dims, double spacing = 1.0);

/// 2D image that is 1 at (i,j) and 0 elsewhere.
StructuredField gen_impulse_image(const Dims& dims, Index i, Index j);

/// Scalar field of uniform random values in [lo, hi), reproducible from seed.
StructuredField gen_noise_field(const Dims& dims, std::uint64_t seed, float lo = 0.0f,
                                float hi = 1.0f);

}  // namespace vizdpp
