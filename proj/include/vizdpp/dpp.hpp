// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

/**
 * @file dpp.hpp
 * @brief Data-parallel primitives: field-map and point-neighborhood worklet
 * dispatch, exclusive scan and scatter-counting.
 *
 * Worklets must be pure: they read shared inputs and write only the output
 * slots owned by the index they were invoked for. Under that contract every
 * dispatch produces identical bytes for any (num_threads, chunk_size).
 *
 * Partitioning is static. The index range is cut into contiguous chunks of
 * chunk_size indices and chunk c goes to participant c % num_threads. The
 * calling thread is participant 0; the rest come from a persistent pool.
 * Dispatch blocks until every invocation finished. Worklets must not dispatch
 * recursively, and only one orchestration thread may dispatch at a time.
 */

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vizdpp/field.hpp"

#ifndef VIZDPP_CHECKED_NEIGHBORHOOD
#ifdef NDEBUG
#define VIZDPP_CHECKED_NEIGHBORHOOD 0
#else
#define VIZDPP_CHECKED_NEIGHBORHOOD 1
#endif
#endif

namespace vizdpp::dpp {

inline constexpr Index kDefaultChunkSize = 4096;

struct ExecConfig {
  int num_threads = 1;
  Index chunk_size = kDefaultChunkSize;

  /// Throws std::invalid_argument when either field is < 1.
  void validate() const;
};

/// Runs body(participant) on `participants` threads, the caller being
/// participant 0. Rethrows the first exception raised by any participant.
void run_participants(int participants, const std::function<void(int)>& body);

/// Number of pool threads started so far (excludes the caller).
int pool_size();

/// Invokes worklet(i) exactly once for every i in [0, n).
template <typename Worklet>
void dispatch_field_map(Index n, const ExecConfig& cfg, Worklet&& worklet) {
  cfg.validate();
  if (n < 0) throw std::invalid_argument("dispatch size must be >= 0");
  if (n == 0) return;
  const Index chunks = (n + cfg.chunk_size - 1) / cfg.chunk_size;
  const int participants = static_cast<int>(std::min<Index>(cfg.num_threads, chunks));
  std::atomic<bool> failed{false};
  run_participants(participants, [&](int p) {
    try {
      for (Index c = p; c < chunks && !failed.load(std::memory_order_relaxed); c += participants) {
        const Index begin = c * cfg.chunk_size;
        const Index end = std::min(n, begin + cfg.chunk_size);
        for (Index i = begin; i < end; ++i) worklet(i);
      }
    } catch (...) {
      failed.store(true, std::memory_order_relaxed);
      throw;
    }
  });
}

/// Field map over two arrays: out[i] = fn(in[i]).
template <typename In, typename Out, typename Fn>
void transform(std::span<const In> in, std::span<Out> out, const ExecConfig& cfg, Fn&& fn) {
  if (in.size() != out.size()) throw std::invalid_argument("transform: size mismatch");
  dispatch_field_map(static_cast<Index>(in.size()), cfg,
                     [&](Index i) { out[static_cast<std::size_t>(i)] = fn(in[static_cast<std::size_t>(i)]); });
}

/// Coarse-grained loop: [0, n) split into num_threads contiguous blocks,
/// body(begin, end) called once per non-empty block.
template <typename Body>
void parallel_blocks(Index n, int num_threads, Body&& body) {
  if (num_threads < 1) throw std::invalid_argument("num_threads must be >= 1");
  if (n <= 0) return;
  const int participants = static_cast<int>(std::min<Index>(num_threads, n));
  run_participants(participants, [&](int p) {
    const Index begin = n * p / participants;
    const Index end = n * (p + 1) / participants;
    if (begin < end) body(begin, end);
  });
}

/// Position of a point-neighborhood invocation within the grid.
class BoundaryState {
 public:
  BoundaryState(IndexTriple center, const Dims& dims) : center_(center), dims_(dims) {}

  [[nodiscard]] const IndexTriple& center() const { return center_; }
  [[nodiscard]] const Dims& dims() const { return dims_; }

  /// Smallest offsets (per axis, >= -radius) keeping center+offset in range.
  [[nodiscard]] std::array<int, 3> min_neighbor_indices(int radius) const {
    return {static_cast<int>(std::max<Index>(-radius, -center_.i)),
            static_cast<int>(std::max<Index>(-radius, -center_.j)),
            static_cast<int>(std::max<Index>(-radius, -center_.k))};
  }
  /// Largest offsets (per axis, <= radius) keeping center+offset in range.
  [[nodiscard]] std::array<int, 3> max_neighbor_indices(int radius) const {
    return {static_cast<int>(std::min<Index>(radius, dims_.nx - 1 - center_.i)),
            static_cast<int>(std::min<Index>(radius, dims_.ny - 1 - center_.j)),
            static_cast<int>(std::min<Index>(radius, dims_.nz - 1 - center_.k))};
  }

 private:
  IndexTriple center_;
  Dims dims_;
};

class NeighborhoodError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Read access to the values around one grid point. With Checked, an offset
/// that leaves the grid throws NeighborhoodError.
template <typename T, bool Checked>
class Neighborhood {
 public:
  Neighborhood(const T* center, const BoundaryState& boundary, Index stride_y, Index stride_z)
      : center_(center), boundary_(boundary), stride_y_(stride_y), stride_z_(stride_z) {}

  [[nodiscard]] T get(int di, int dj, int dk = 0) const {
    if constexpr (Checked) check(di, dj, dk);
    return center_[di + dj * stride_y_ + dk * stride_z_];
  }

 private:
  void check(int di, int dj, int dk) const {
    const auto& c = boundary_.center();
    const auto& d = boundary_.dims();
    if (c.i + di < 0 || c.i + di >= d.nx || c.j + dj < 0 || c.j + dj >= d.ny || c.k + dk < 0 ||
        c.k + dk >= d.nz) {
      throw NeighborhoodError("neighborhood access (" + std::to_string(di) + "," +
                              std::to_string(dj) + "," + std::to_string(dk) +
                              ") leaves the grid");
    }
  }

  const T* center_;
  const BoundaryState& boundary_;
  Index stride_y_;
  Index stride_z_;
};

/// Invokes worklet(neighborhood, boundary) once per grid point and stores the
/// result in out at that point's linear index.
template <bool Checked = VIZDPP_CHECKED_NEIGHBORHOOD, typename T, typename Out, typename Worklet>
void dispatch_point_neighborhood(std::span<const T> in, const Dims& dims, std::span<Out> out,
                                 const ExecConfig& cfg, Worklet&& worklet) {
  dims.validate();
  if (static_cast<Index>(in.size()) != dims.points() || out.size() != in.size()) {
    throw std::invalid_argument("point-neighborhood dispatch: array size does not match dims");
  }
  const Index nx = dims.nx;
  const Index plane = dims.nx * dims.ny;
  dispatch_field_map(dims.points(), cfg, [&](Index idx) {
    const Index k = idx / plane;
    const Index rem = idx - k * plane;
    const Index j = rem / nx;
    const Index i = rem - j * nx;
    const BoundaryState boundary({i, j, k}, dims);
    const Neighborhood<T, Checked> hood(in.data() + idx, boundary, nx, plane);
    out[static_cast<std::size_t>(idx)] = worklet(hood, boundary);
  });
}

/// out[0] = 0, out[i] = out[i-1] + xs[i-1]. Throws std::overflow_error when
/// the running sum leaves the index type.
std::vector<Index> exclusive_scan(std::span<const Index> xs);
/// Blocked parallel variant; identical output to the serial scan.
std::vector<Index> exclusive_scan(std::span<const Index> xs, const ExecConfig& cfg);

struct ScatterPlan {
  std::vector<Index> counts;
  std::vector<Index> offsets;
  Index total = 0;

  /// Output range [begin, end) owned by input i.
  [[nodiscard]] std::pair<Index, Index> range(Index i) const {
    const auto u = static_cast<std::size_t>(i);
    return {offsets[u], offsets[u] + counts[u]};
  }
};

/// Throws std::invalid_argument for a negative count, std::overflow_error on
/// overflow.
ScatterPlan build_scatter(std::vector<Index> counts);
ScatterPlan build_scatter(std::vector<Index> counts, const ExecConfig& cfg);

}  // namespace vizdpp::dpp
