// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

// Streamlines through steady 3-component fields with classic fourth-order
// Runge-Kutta. A streamline stops after max_steps, when any RK4 stage samples
// outside the domain, or when the local speed drops below kZeroVelocity.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vizdpp/dpp.hpp"
#include "vizdpp/field.hpp"

namespace vizdpp::advect {

inline constexpr double kZeroVelocity = 1e-12;

/// Software FLOP tally of one accepted RK4 step: the three stage positions
/// (6 each), the weighted update (7 per component) and h/2, h/6.
inline constexpr std::uint64_t kRk4StepFlops = 41;

struct Seed {
  Index id = 0;
  Vec3 position{};
};

struct IntegrationParams {
  double step_size = 0.25;
  Index max_steps = 1000;

  void validate() const;
};

/// Default step: a quarter of the smallest grid spacing.
double default_step_size(const StructuredField& field);

enum class Termination { MaxSteps, OutOfBounds, ZeroVelocity };
std::string_view to_string(Termination t);

struct Streamline {
  Index seed_id = 0;
  std::vector<Vec3> points;
  Termination termination = Termination::MaxSteps;

  friend bool operator==(const Streamline&, const Streamline&) = default;
};

/// One RK4 step from p. std::nullopt when a stage leaves the domain.
std::optional<Vec3> rk4_step(const StructuredField& field, const Vec3& p, double h);

Streamline trace_streamline(const StructuredField& field, const Seed& seed,
                            const IntegrationParams& params);

/// n seeds evenly spaced on the domain diagonal, both ends pulled in by half a
/// cell. Throws std::invalid_argument for n < 2.
std::vector<Seed> make_diagonal_seeds(const StructuredField& field, Index n);

std::vector<Streamline> trace_serial(const StructuredField& field, std::span<const Seed> seeds,
                                     const IntegrationParams& params);

/// Field-map dispatch over seeds; bitwise equal to trace_serial.
std::vector<Streamline> trace_parallel_over_seeds(const StructuredField& field,
                                                  std::span<const Seed> seeds,
                                                  const IntegrationParams& params,
                                                  const dpp::ExecConfig& cfg);

enum class Strategy { Serial, ParallelOverSeeds };
inline constexpr std::string_view kStrategyNames[] = {"serial", "parallel-over-seeds"};

/// One "x y z" line per point, a blank line between streamlines.
void write_polylines(std::span<const Streamline> lines, const std::filesystem::path& path);
/// OBJ vertices plus one "l" element per streamline.
void write_obj(std::span<const Streamline> lines, const std::filesystem::path& path);

}  // namespace vizdpp::advect
