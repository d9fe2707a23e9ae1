// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace vizdpp {

namespace {

constexpr double kFaceTolerance = 1e-12;

bool mul_overflows(Index a, Index b, Index* out) { return __builtin_mul_overflow(a, b, out); }

}  // namespace

void Dims::validate() const {
  if (nx < 1 || ny < 1 || nz < 1) {
    throw std::invalid_argument("dims must be >= 1 on every axis, got " + std::to_string(nx) + "x" +
                                std::to_string(ny) + "x" + std::to_string(nz));
  }
  Index xy = 0;
  Index xyz = 0;
  if (mul_overflows(nx, ny, &xy) || mul_overflows(xy, nz, &xyz) ||
      mul_overflows(xyz, Index{3}, &xyz)) {
    throw std::invalid_argument("dims too large for the index type");
  }
}

Index Dims::cells() const {
  return std::max<Index>(nx - 1, 1) * std::max<Index>(ny - 1, 1) * std::max<Index>(nz - 1, 1);
}

Index linear_index(Index i, Index j, Index k, const Dims& dims) {
  if (i < 0 || i >= dims.nx || j < 0 || j >= dims.ny || k < 0 || k >= dims.nz) {
    throw std::out_of_range("index (" + std::to_string(i) + "," + std::to_string(j) + "," +
                            std::to_string(k) + ") outside dims");
  }
  return (k * dims.ny + j) * dims.nx + i;
}

IndexTriple unravel_index(Index linear, const Dims& dims) {
  if (linear < 0 || linear >= dims.points()) {
    throw std::out_of_range("linear index " + std::to_string(linear) + " outside dims");
  }
  const Index plane = dims.nx * dims.ny;
  const Index k = linear / plane;
  const Index rem = linear - k * plane;
  return {rem % dims.nx, rem / dims.nx, k};
}

StructuredField::StructuredField(Dims dims, int components, Vec3 origin, Vec3 spacing)
    : StructuredField(dims, components, origin, spacing,
                      std::vector<float>(static_cast<std::size_t>(std::max<Index>(dims.points(), 0) *
                                                                  std::max(components, 0)),
                                         0.0f)) {}

StructuredField::StructuredField(Dims dims, int components, Vec3 origin, Vec3 spacing,
                                 std::vector<float> values)
    : dims_(dims), components_(components), origin_(origin), spacing_(spacing),
      values_(std::move(values)) {
  dims_.validate();
  if (components_ != 1 && components_ != 3) {
    throw std::invalid_argument("components must be 1 or 3");
  }
  for (double s : spacing_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("spacing must be positive");
  }
  for (double o : origin_) {
    if (!std::isfinite(o)) throw std::invalid_argument("origin must be finite");
  }
  if (values_.size() != static_cast<std::size_t>(dims_.points() * components_)) {
    throw std::invalid_argument("value count " + std::to_string(values_.size()) +
                                " does not match dims*components");
  }
}

Vec3 StructuredField::node_position(Index i, Index j, Index k) const {
  return {origin_[0] + spacing_[0] * static_cast<double>(i),
          origin_[1] + spacing_[1] * static_cast<double>(j),
          origin_[2] + spacing_[2] * static_cast<double>(k)};
}

Vec3 StructuredField::max_corner() const {
  return node_position(dims_.nx - 1, dims_.ny - 1, dims_.nz - 1);
}

std::pair<float, float> StructuredField::value_range() const {
  if (values_.empty()) return {0.0f, 0.0f};
  auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  return {*lo, *hi};
}

CellLocation locate_cell(const StructuredField& field, const Vec3& p) {
  CellLocation loc;
  Index idx[3] = {0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    const Index n = field.dims().axis(a);
    const double x = (p[a] - field.origin()[a]) / field.spacing()[a];
    if (n == 1) {
      if (!(std::abs(x) <= kFaceTolerance)) return loc;
      continue;
    }
    const double last = static_cast<double>(n - 1);
    if (!(x >= -kFaceTolerance) || !(x <= last * (1.0 + kFaceTolerance) + kFaceTolerance)) {
      return loc;
    }
    Index cell = static_cast<Index>(std::floor(x));
    cell = std::clamp<Index>(cell, 0, n - 2);
    idx[a] = cell;
    loc.uvw[a] = std::clamp(x - static_cast<double>(cell), 0.0, 1.0);
  }
  loc.inside = true;
  loc.cell = {idx[0], idx[1], idx[2]};
  return loc;
}

Sample interpolate_at(const StructuredField& field, const CellLocation& loc) {
  const Dims& d = field.dims();
  const int nc = field.components();
  const Index i0 = loc.cell.i;
  const Index j0 = loc.cell.j;
  const Index k0 = loc.cell.k;
  const Index i1 = std::min(i0 + 1, d.nx - 1);
  const Index j1 = std::min(j0 + 1, d.ny - 1);
  const Index k1 = std::min(k0 + 1, d.nz - 1);
  const double u = loc.uvw[0];
  const double v = loc.uvw[1];
  const double w = loc.uvw[2];

  const Index is[2] = {i0, i1};
  const Index js[2] = {j0, j1};
  const Index ks[2] = {k0, k1};
  const double wu[2] = {1.0 - u, u};
  const double wv[2] = {1.0 - v, v};
  const double ww[2] = {1.0 - w, w};

  Sample out{0.0, 0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        const double weight = wu[a] * wv[b] * ww[c];
        for (int comp = 0; comp < nc; ++comp) {
          out[comp] += weight * static_cast<double>(field.at(is[a], js[b], ks[c], comp));
        }
      }
    }
  }
  return out;
}

std::optional<Sample> interpolate(const StructuredField& field, const Vec3& p) {
  const CellLocation loc = locate_cell(field, p);
  if (!loc.inside) return std::nullopt;
  return interpolate_at(field, loc);
}

StructuredField gen_sphere_field(const Dims& dims, const Vec3& center, double radius, Vec3 origin,
                                 Vec3 spacing) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  StructuredField f(dims, 1, origin, spacing);
  for (Index k = 0; k < dims.nz; ++k) {
    for (Index j = 0; j < dims.ny; ++j) {
      for (Index i = 0; i < dims.nx; ++i) {
        const Vec3 p = f.node_position(i, j, k);
        const double dx = p[0] - center[0];
        const double dy = p[1] - center[1];
        const double dz = p[2] - center[2];
        f.at(i, j, k) = static_cast<float>(std::sqrt(dx * dx + dy * dy + dz * dz) - radius);
      }
    }
  }
  return f;
}

StructuredField gen_rotational_field(const Dims& dims, double spacing) {
  if (dims.nz < 2) throw std::invalid_argument("rotational field requires a 3D grid");
  const Vec3 origin = {-0.5 * spacing * static_cast<double>(dims.nx - 1),
                       -0.5 * spacing * static_cast<double>(dims.ny - 1),
                       -0.5 * spacing * static_cast<double>(dims.nz - 1)};
  StructuredField f(dims, 3, origin, {spacing, spacing, spacing});
  for (Index k = 0; k < dims.nz; ++k) {
    for (Index j = 0; j < dims.ny; ++j) {
      for (Index i = 0; i < dims.nx; ++i) {
        const Vec3 p = f.node_position(i, j, k);
        f.at(i, j, k, 0) = static_cast<float>(-p[1]);
        f.at(i, j, k, 1) = static_cast<float>(p[0]);
        f.at(i, j, k, 2) = 0.0f;
      }
    }
  }
  return f;
}

StructuredField gen_impulse_image(const Dims& dims, Index i, Index j) {
  if (!dims.is_2d()) throw std::invalid_argument("impulse image must be 2D");
  StructuredField f(dims, 1);
  f.values()[static_cast<std::size_t>(linear_index(i, j, 0, dims))] = 1.0f;
  return f;
}

StructuredField gen_noise_field(const Dims& dims, std::uint64_t seed, float lo, float hi) {
  StructuredField f(dims, 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  for (float& v : f.values()) v = dist(rng);
  return f;
}

}  // namespace vizdpp
