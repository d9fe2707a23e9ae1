// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/stencil.hpp"

#include <cmath>
#include <stdexcept>

#include "vizdpp/perf.hpp"

namespace vizdpp::stencil {

namespace {

void require_image(const StructuredField& image) {
  if (!image.dims().is_2d() || image.components() != 1) {
    throw std::invalid_argument("stencil input must be a 2D scalar image");
  }
}

StructuredField like(const StructuredField& image) {
  return StructuredField(image.dims(), 1, image.origin(), image.spacing());
}

std::uint64_t pixel_flops(Index window, bool clipped) {
  return 2 * static_cast<std::uint64_t>(window) + (clipped ? 1 : 0);
}

// Weighted window sum around (i,j). Shared by the direct and field-map
// strategies; the point-neighborhood worklet repeats the same loop through its
// accessor.
float smooth_pixel(const float* img, Index nx, Index ny, Index i, Index j,
                   const GaussianKernel& k) {
  const int r = k.radius;
  const int ilo = static_cast<int>(std::max<Index>(-r, -i));
  const int ihi = static_cast<int>(std::min<Index>(r, nx - 1 - i));
  const int jlo = static_cast<int>(std::max<Index>(-r, -j));
  const int jhi = static_cast<int>(std::min<Index>(r, ny - 1 - j));
  const bool clipped = ilo != -r || ihi != r || jlo != -r || jhi != r;

  double sum = 0.0;
  double wsum = 0.0;
  for (int dj = jlo; dj <= jhi; ++dj) {
    const float* row = img + (j + dj) * nx + i;
    const double* w = k.weights.data() + (dj + r) * k.size + r;
    if (clipped) {
      for (int di = ilo; di <= ihi; ++di) {
        sum += w[di] * static_cast<double>(row[di]);
        wsum += w[di];
      }
    } else {
      for (int di = ilo; di <= ihi; ++di) sum += w[di] * static_cast<double>(row[di]);
    }
  }
  perf::tally_flops(pixel_flops(Index{ihi - ilo + 1} * (jhi - jlo + 1), clipped));
  return static_cast<float>(clipped ? sum / wsum : sum);
}

}  // namespace

GaussianKernel build_gaussian_weights(int size, double sigma) {
  if (size < 1 || size % 2 == 0) {
    throw std::invalid_argument("kernel size must be odd and positive, got " +
                                std::to_string(size));
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

  GaussianKernel k;
  k.size = size;
  k.sigma = sigma;
  k.radius = (size - 1) / 2;
  k.weights.assign(static_cast<std::size_t>(size) * size, 0.0);
  if (size == 1) {
    k.weights[0] = 1.0;
    return k;
  }

  const double r = k.radius;
  double total = 0.0;
  for (int dj = -k.radius; dj <= k.radius; ++dj) {
    for (int di = -k.radius; di <= k.radius; ++di) {
      const double d = std::sqrt(static_cast<double>(di * di + dj * dj)) / r;
      const double w = std::exp(-0.5 * (d / sigma) * (d / sigma));
      k.weights[static_cast<std::size_t>((dj + k.radius) * size + (di + k.radius))] = w;
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;
  return k;
}

StructuredField smooth_direct(const StructuredField& image, const GaussianKernel& kernel,
                              const dpp::ExecConfig& cfg) {
  require_image(image);
  cfg.validate();
  StructuredField out = like(image);
  const Index nx = image.dims().nx;
  const Index ny = image.dims().ny;
  const float* src = image.values().data();
  float* dst = out.values().data();
  dpp::parallel_blocks(ny, cfg.num_threads, [&](Index j0, Index j1) {
    for (Index j = j0; j < j1; ++j) {
      for (Index i = 0; i < nx; ++i) dst[j * nx + i] = smooth_pixel(src, nx, ny, i, j, kernel);
    }
  });
  return out;
}

StructuredField smooth_field_map(const StructuredField& image, const GaussianKernel& kernel,
                                 const dpp::ExecConfig& cfg) {
  require_image(image);
  StructuredField out = like(image);
  const Index nx = image.dims().nx;
  const Index ny = image.dims().ny;
  const float* src = image.values().data();
  float* dst = out.values().data();
  dpp::dispatch_field_map(image.dims().points(), cfg, [&](Index idx) {
    const Index j = idx / nx;
    const Index i = idx - j * nx;
    dst[idx] = smooth_pixel(src, nx, ny, i, j, kernel);
  });
  return out;
}

StructuredField smooth_point_neighborhood(const StructuredField& image,
                                          const GaussianKernel& kernel,
                                          const dpp::ExecConfig& cfg) {
  require_image(image);
  StructuredField out = like(image);
  const int r = kernel.radius;
  dpp::dispatch_point_neighborhood(
      image.values(), image.dims(), out.values(), cfg,
      [&](const auto& field, const dpp::BoundaryState& boundary) {
        const auto lo = boundary.min_neighbor_indices(r);
        const auto hi = boundary.max_neighbor_indices(r);
        const bool clipped = lo[0] != -r || hi[0] != r || lo[1] != -r || hi[1] != r;
        double sum = 0.0;
        double wsum = 0.0;
        for (int j = lo[1]; j <= hi[1]; ++j) {
          const double* w = kernel.weights.data() + (j + r) * kernel.size + r;
          if (clipped) {
            for (int i = lo[0]; i <= hi[0]; ++i) {
              sum += w[i] * static_cast<double>(field.get(i, j));
              wsum += w[i];
            }
          } else {
            for (int i = lo[0]; i <= hi[0]; ++i) sum += w[i] * static_cast<double>(field.get(i, j));
          }
        }
        perf::tally_flops(pixel_flops(Index{hi[0] - lo[0] + 1} * (hi[1] - lo[1] + 1), clipped));
        return static_cast<float>(clipped ? sum / wsum : sum);
      });
  return out;
}

StructuredField smooth(Strategy s, const StructuredField& image, const GaussianKernel& kernel,
                       const dpp::ExecConfig& cfg) {
  switch (s) {
    case Strategy::Direct:
      return smooth_direct(image, kernel, cfg);
    case Strategy::FieldMap:
      return smooth_field_map(image, kernel, cfg);
    case Strategy::PointNeighborhood:
      return smooth_point_neighborhood(image, kernel, cfg);
  }
  throw std::invalid_argument("unknown stencil strategy");
}

}  // namespace vizdpp::stencil
