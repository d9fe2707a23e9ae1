// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/advection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "vizdpp/perf.hpp"

namespace vizdpp::advect {

namespace {

std::optional<Vec3> velocity(const StructuredField& field, const Vec3& p) {
  auto s = interpolate(field, p);
  if (!s) return std::nullopt;
  return Vec3{(*s)[0], (*s)[1], (*s)[2]};
}

Vec3 axpy(const Vec3& p, double a, const Vec3& k) {
  return {p[0] + a * k[0], p[1] + a * k[1], p[2] + a * k[2]};
}

// Remaining three stages given k1 = v(p).
std::optional<Vec3> advance(const StructuredField& field, const Vec3& p, const Vec3& k1,
                            double h) {
  const double half = 0.5 * h;
  const auto k2 = velocity(field, axpy(p, half, k1));
  if (!k2) return std::nullopt;
  const auto k3 = velocity(field, axpy(p, half, *k2));
  if (!k3) return std::nullopt;
  const auto k4 = velocity(field, axpy(p, h, *k3));
  if (!k4) return std::nullopt;
  const double sixth = h / 6.0;
  Vec3 out;
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = p[c] + sixth * (k1[c] + 2.0 * (*k2)[c] + 2.0 * (*k3)[c] + (*k4)[c]);
  }
  return out;
}

void require_vector_field(const StructuredField& field) {
  if (field.components() != 3) throw std::invalid_argument("advection needs a 3-component field");
}

}  // namespace

void IntegrationParams::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step size must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

double default_step_size(const StructuredField& field) {
  const auto& s = field.spacing();
  return 0.25 * std::min({s[0], s[1], s[2]});
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::MaxSteps:
      return "max-steps";
    case Termination::OutOfBounds:
      return "out-of-bounds";
    case Termination::ZeroVelocity:
      return "zero-velocity";
  }
  return "?";
}

std::optional<Vec3> rk4_step(const StructuredField& field, const Vec3& p, double h) {
  require_vector_field(field);
  const auto k1 = velocity(field, p);
  if (!k1) return std::nullopt;
  return advance(field, p, *k1, h);
}

Streamline trace_streamline(const StructuredField& field, const Seed& seed,
                            const IntegrationParams& params) {
  require_vector_field(field);
  params.validate();
  Streamline line;
  line.seed_id = seed.id;
  line.points.reserve(static_cast<std::size_t>(std::min<Index>(params.max_steps, 4096) + 1));
  line.points.push_back(seed.position);

  Vec3 p = seed.position;
  std::uint64_t steps = 0;
  line.termination = Termination::MaxSteps;
  for (Index s = 0; s < params.max_steps; ++s) {
    const auto k1 = velocity(field, p);
    if (!k1) {
      line.termination = Termination::OutOfBounds;
      break;
    }
    const double speed = std::sqrt((*k1)[0] * (*k1)[0] + (*k1)[1] * (*k1)[1] + (*k1)[2] * (*k1)[2]);
    if (speed < kZeroVelocity) {
      line.termination = Termination::ZeroVelocity;
      break;
    }
    const auto next = advance(field, p, *k1, params.step_size);
    if (!next) {
      line.termination = Termination::OutOfBounds;
      break;
    }
    p = *next;
    line.points.push_back(p);
    ++steps;
  }
  perf::tally_flops(steps * kRk4StepFlops);
  return line;
}

std::vector<Seed> make_diagonal_seeds(const StructuredField& field, Index n) {
  if (n < 2) throw std::invalid_argument("diagonal seeding needs n >= 2");
  const Vec3 lo_corner = field.origin();
  const Vec3 hi_corner = field.max_corner();
  Vec3 lo{};
  Vec3 hi{};
  for (std::size_t a = 0; a < 3; ++a) {
    const bool flat = field.dims().axis(static_cast<int>(a)) == 1;
    const double inset = flat ? 0.0 : 0.5 * field.spacing()[a];
    lo[a] = lo_corner[a] + inset;
    hi[a] = hi_corner[a] - inset;
  }
  std::vector<Seed> seeds(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    auto& s = seeds[static_cast<std::size_t>(i)];
    s.id = i;
    for (std::size_t a = 0; a < 3; ++a) s.position[a] = lo[a] + t * (hi[a] - lo[a]);
  }
  return seeds;
}

std::vector<Streamline> trace_serial(const StructuredField& field, std::span<const Seed> seeds,
                                     const IntegrationParams& params) {
  std::vector<Streamline> out;
  out.reserve(seeds.size());
  for (const Seed& s : seeds) out.push_back(trace_streamline(field, s, params));
  return out;
}

std::vector<Streamline> trace_parallel_over_seeds(const StructuredField& field,
                                                  std::span<const Seed> seeds,
                                                  const IntegrationParams& params,
                                                  const dpp::ExecConfig& cfg) {
  require_vector_field(field);
  params.validate();
  cfg.validate();
  std::vector<Streamline> out(seeds.size());
  const auto n = static_cast<Index>(seeds.size());
  // A seed is a heavy work item; never let one chunk swallow the whole list.
  dpp::ExecConfig seed_cfg = cfg;
  seed_cfg.chunk_size = std::max<Index>(1, std::min(cfg.chunk_size, (n + cfg.num_threads - 1) / cfg.num_threads));
  dpp::dispatch_field_map(n, seed_cfg, [&](Index i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = trace_streamline(field, seeds[u], params);
  });
  return out;
}

void write_polylines(std::span<const Streamline> lines, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  bool first = true;
  for (const auto& line : lines) {
    if (!first) out << '\n';
    first = false;
    for (const auto& p : line.points) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_obj(std::span<const Streamline> lines, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(9);
  for (const auto& line : lines) {
    for (const auto& p : line.points) out << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  }
  std::size_t next = 1;
  for (const auto& line : lines) {
    if (line.points.size() >= 2) {
      out << 'l';
      for (std::size_t i = 0; i < line.points.size(); ++i) out << ' ' << next + i;
      out << '\n';
    }
    next += line.points.size();
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace vizdpp::advect
