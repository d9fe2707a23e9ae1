// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

/**
 * @file bench.hpp
 * @brief Strong-scaling sweeps over the three kernels and their reports.
 *
 * A sweep runs every (strategy, thread count, repetition) cell inside a marker
 * region named "<kernel>/<strategy>", after one untimed warm-up per
 * (strategy, thread count). Serial strategies run only at one thread. Before
 * any timing is returned, the kernel outputs of all cells are hashed and
 * required to be identical.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vizdpp/advection.hpp"
#include "vizdpp/field.hpp"
#include "vizdpp/isocontour.hpp"
#include "vizdpp/perf.hpp"

namespace vizdpp::bench {

enum class Kernel { Stencil, Isocontour, Advection };

std::string_view to_string(Kernel k);
std::optional<Kernel> parse_kernel(std::string_view text);

/// Strategy names accepted for a kernel, in canonical order.
std::vector<std::string> strategies_for(Kernel k);
/// True for strategies that never use more than one thread.
bool is_serial_strategy(Kernel k, std::string_view strategy);

/// "<generator>:<nx>x<ny>[x<nz>][:<param>]" with generator one of
///   noise      uniform [0,1) values (param unused; seeded by BenchConfig::seed)
///   impulse    2D image with a single 1 at the centre
///   sphere     signed distance to a sphere at the domain centre; param = radius
///   rotational (-y, x, 0) on a grid centred at 0; param = spacing
struct SyntheticSpec {
  std::string generator;
  Dims dims;
  std::optional<double> param;

  static SyntheticSpec parse(std::string_view text);
  [[nodiscard]] StructuredField generate(std::uint64_t seed) const;
};

struct BenchConfig {
  Kernel kernel = Kernel::Stencil;
  std::vector<std::string> strategies;  ///< empty = all strategies of the kernel
  std::optional<std::filesystem::path> dataset;
  std::optional<std::string> synthetic;

  int kernel_size = 19;
  double sigma = 0.33;
  double isovalue = 15.0;
  bool reclassify = false;
  Index n_seeds = 500;
  Index max_steps = 1000;
  std::optional<double> step_size;  ///< default: quarter of the smallest spacing

  std::vector<int> thread_counts{1};
  int repetitions = 1;
  Index chunk_size = 4096;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  [[nodiscard]] std::vector<std::string> resolved_strategies() const;
};

/// Named full-size configurations (19x19 stencil, isovalue 15, 500 seeds x 1000 steps) on
/// synthetic data: "stencil-paper", "iso-paper", "advect-paper".
std::optional<BenchConfig> preset(std::string_view name);
std::vector<std::string> preset_names();

struct BenchRecord {
  std::string kernel;
  std::string strategy;
  int threads = 1;
  int rep = 0;
  perf::CounterSample counters;
  perf::DerivedMetrics metrics;
  std::optional<double> speedup;
  std::uint64_t output_hash = 0;
  bool serial_only = false;
};

/// Loads the dataset or generates the synthetic input named by cfg.
StructuredField make_input(const BenchConfig& cfg);

using KernelOutput = std::variant<StructuredField, contour::TriangleMesh,
                                  std::vector<advect::Streamline>>;

/// Runs the kernel once with the given strategy and thread count.
KernelOutput run_kernel(const BenchConfig& cfg, const StructuredField& input,
                        std::string_view strategy, int threads);

/// Order-insensitive for meshes (canonical triangle multiset), bytewise for
/// images and streamlines.
std::uint64_t hash_output(const KernelOutput& out);

/// hash_output(run_kernel(...)).
std::uint64_t run_once(const BenchConfig& cfg, const StructuredField& input,
                       std::string_view strategy, int threads);

/// Full sweep. Throws std::runtime_error when two cells disagree on the
/// output hash.
std::vector<BenchRecord> run_suite(const BenchConfig& cfg);

/// speedup(strategy, P) = median runtime at P=1 / median runtime at P.
/// Throws std::invalid_argument when a strategy lacks a P=1 record.
std::vector<BenchRecord> compute_speedup(std::vector<BenchRecord> records);

double median(std::vector<double> xs);

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 14695981039346656037ull);

// Reports.

inline constexpr std::string_view kCsvHeader =
    "kernel,strategy,threads,rep,runtime_s,instructions,cycles,cpi,flops_scalar,flops_packed,"
    "vectorization_pct,l3_requests,l3_misses,l3_miss_ratio_pct,speedup";

std::string to_csv(const std::vector<BenchRecord>& records);
void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
void emit_json(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
/// Parses a CSV produced by emit_csv back into records (hash and flags are
/// not part of the CSV and stay default).
std::vector<BenchRecord> parse_csv(std::string_view text);

/// Writes <kernel>_runtime.svg and <kernel>_speedup.svg for every kernel in
/// records and returns the written paths. Requires >= 2 distinct thread
/// counts.
std::vector<std::filesystem::path> emit_plots(const std::vector<BenchRecord>& records,
                                              const std::filesystem::path& dir);

}  // namespace vizdpp::bench
