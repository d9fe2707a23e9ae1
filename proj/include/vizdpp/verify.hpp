// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

// Oracle-equivalence checks behind `bench verify` and the acceptance test.
// Each check compares library output against a brute-force reimplementation
// kept in this module and reports one pass/fail line.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vizdpp/field.hpp"
#include "vizdpp/stencil.hpp"

namespace vizdpp::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Soft checks are reported but do not fail the suite.
  bool soft = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  bool scaling = true;  ///< run the 2048x2048 strong-scaling sweep
  Index scaling_extent = 2048;
  int scaling_size = 9;
  int scaling_reps = 3;
  double scaling_threshold = 3.0;
};

std::vector<CheckResult> run_all(const Options& opts = {},
                                 const std::function<void(const CheckResult&)>& on_result = {});

/// "PASS  1  name  [1.23 s]  detail"
std::string format(const CheckResult& r);

/// True when every non-soft check passed.
bool all_hard_passed(const std::vector<CheckResult>& results);

// Individual checks.
CheckResult check_stencil_equivalence();
CheckResult check_gaussian_weights();
CheckResult check_isocontour_equivalence();
CheckResult check_mc_degenerate_cases();
CheckResult check_rk4_order();
CheckResult check_advection_equivalence();
CheckResult check_counter_math();
CheckResult check_stencil_flops();
/// Scaling (soft) and determinism results from one sweep.
std::vector<CheckResult> check_scaling_and_determinism(const Options& opts);

// Oracles.

/// Double-loop clamped convolution, renormalized by the in-bounds weight sum
/// at every pixel.
std::vector<double> naive_smooth(const StructuredField& image, const stencil::GaussianKernel& k);

/// Software FLOP count of one stencil pass by window enumeration.
std::uint64_t stencil_flops_oracle(Index nx, Index ny, int size);

/// Per-cell triangle counts from an independent classification loop.
std::vector<Index> mc_count_oracle(const StructuredField& field, double isovalue);

}  // namespace vizdpp::verify
