// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

/**
 * @file stencil.hpp
 * @brief Gaussian smoothing of 2D images in three execution styles.
 *
 *  - direct: coarse-grained, each worker owns a contiguous block of scanlines.
 *  - field map: one worklet invocation per pixel; the worklet recovers (i,j)
 *    from the flat index and indexes the input array itself.
 *  - point neighborhood: one invocation per pixel through a neighborhood
 *    accessor bounded by min/max neighbor indices.
 *
 * Windows are clipped at the image border and the result is divided by the sum
 * of the weights that stayed in bounds. All three strategies evaluate the same
 * sums in the same order and so produce bit-identical images.
 *
 * Each pixel adds 2 * (window size) multiply/adds to the software FLOP tally,
 * plus one divide when its window was clipped.
 */

#include <string_view>
#include <vector>

#include "vizdpp/dpp.hpp"
#include "vizdpp/field.hpp"

namespace vizdpp::stencil {

struct GaussianKernel {
  int size = 1;  ///< odd window width R
  double sigma = 1.0;
  int radius = 0;  ///< (R - 1) / 2
  std::vector<double> weights;  ///< R*R, row-major, sums to 1

  [[nodiscard]] double at(int di, int dj) const {
    return weights[static_cast<std::size_t>((dj + radius) * size + (di + radius))];
  }
};

/// Normalized weights exp(-(d/sigma)^2 / 2), where d is the Euclidean
/// distance to the window centre divided by the radius. Throws
/// std::invalid_argument for an even or non-positive size or sigma <= 0.
GaussianKernel build_gaussian_weights(int size, double sigma);

StructuredField smooth_direct(const StructuredField& image, const GaussianKernel& kernel,
                              const dpp::ExecConfig& cfg);
StructuredField smooth_field_map(const StructuredField& image, const GaussianKernel& kernel,
                                 const dpp::ExecConfig& cfg);
StructuredField smooth_point_neighborhood(const StructuredField& image,
                                          const GaussianKernel& kernel,
                                          const dpp::ExecConfig& cfg);

enum class Strategy { Direct, FieldMap, PointNeighborhood };

inline constexpr std::string_view kStrategyNames[] = {"direct", "field-map", "point-neighborhood"};

StructuredField smooth(Strategy s, const StructuredField& image, const GaussianKernel& kernel,
                       const dpp::ExecConfig& cfg);

}  // namespace vizdpp::stencil
