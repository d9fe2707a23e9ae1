// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors
#pragma once

/**
 * @file perf.hpp
 * @brief Marker-region counter collection.
 *
 * Code brackets a region with marker_start(name) / marker_stop(name). At start
 * every registered thread's counters are snapshotted, at stop the deltas are
 * accumulated into the region. Regions may be visited repeatedly; distinct
 * regions may nest.
 *
 * Two counter sources exist:
 *  - software tallies: kernels call tally_flops() with the number of
 *    multiply/add operations they performed. Deterministic and always present.
 *  - hardware counters: per-thread perf_event descriptors for retired
 *    instructions, core cycles and last-level cache references/misses. Opened
 *    only where the OS exposes them.
 *
 * Backend selection comes from the VIZDPP_PERF_BACKEND environment variable
 * (AUTO, HARDWARE, SOFTWARE or NONE; default AUTO) and can be overridden with
 * set_backend(). A missing counter is reported as absent, never as an error.
 *
 * Hardware FLOP and SIMD counters are not read; the software tally reports
 * every operation as scalar.
 */

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vizdpp::perf {

using Count = std::optional<std::uint64_t>;

struct CounterSample {
  Count instructions_retired;
  Count cycles;
  Count flops_scalar;
  Count flops_packed;
  Count l3_requests;
  Count l3_misses;
  double wall_time_s = 0.0;
  std::uint64_t call_count = 0;

  friend bool operator==(const CounterSample&, const CounterSample&) = default;
};

/// Field-wise sum. A counter is present in the result only when present in
/// both inputs, which keeps merge associative and commutative.
CounterSample merge(const CounterSample& a, const CounterSample& b);

struct DerivedMetrics {
  std::optional<double> cpi;
  std::optional<double> vectorization_pct;
  std::optional<double> l3_miss_ratio_pct;
  double runtime_s = 0.0;
};

DerivedMetrics derive_metrics(const CounterSample& s);

struct RegionReport {
  std::string name;
  CounterSample aggregate;
  std::vector<CounterSample> per_thread;
  DerivedMetrics metrics;
};

enum class Backend { Auto, Hardware, Software, None };

std::optional<Backend> parse_backend(std::string_view text);
std::string_view to_string(Backend b);

/// Backend requested through VIZDPP_PERF_BACKEND (Auto when unset or invalid).
Backend backend_from_env();

Backend backend();
void set_backend(Backend b);

enum class HwCounter { Instructions, Cycles, CacheReferences, CacheMisses };

/// Per-thread hardware counters opened through perf_event_open.
class HardwareCounters {
 public:
  /// Opens the requested counters for thread `tid` (0 = calling thread).
  /// Returns std::nullopt when none of them can be opened.
  static std::optional<HardwareCounters> open(std::span<const HwCounter> counters, int tid = 0);

  HardwareCounters(HardwareCounters&&) noexcept;
  HardwareCounters& operator=(HardwareCounters&&) noexcept;
  HardwareCounters(const HardwareCounters&) = delete;
  HardwareCounters& operator=(const HardwareCounters&) = delete;
  ~HardwareCounters();

  [[nodiscard]] bool has(HwCounter c) const;
  [[nodiscard]] std::optional<std::uint64_t> read(HwCounter c) const;

 private:
  HardwareCounters() = default;
  std::array<int, 4> fds_{-1, -1, -1, -1};
};

/// The counter set the harness asks for.
std::span<const HwCounter> default_counter_set();

/// Probes hardware counter support from the calling thread.
bool hardware_available();

/// Registers the calling thread with the tally registry. Called by runtime
/// workers on startup; other threads are attached lazily on first tally.
void attach_current_thread();

/// Adds n to the calling thread's software FLOP tally.
void tally_flops(std::uint64_t n);

class MarkerRegistry {
 public:
  MarkerRegistry() = default;
  MarkerRegistry(const MarkerRegistry&) = delete;
  MarkerRegistry& operator=(const MarkerRegistry&) = delete;

  /// Throws std::logic_error when `name` is already active.
  void start(std::string_view name);
  /// Throws std::logic_error when `name` was not started.
  void stop(std::string_view name);

  /// Accumulated report. Throws std::out_of_range for an unknown region.
  [[nodiscard]] RegionReport report(std::string_view name) const;
  /// Returns the report and forgets the region.
  RegionReport take(std::string_view name);
  [[nodiscard]] std::vector<std::string> regions() const;
  void clear();

 private:
  struct Region;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Region>> regions_;
};

/// Process-wide registry used by marker_start / marker_stop.
MarkerRegistry& markers();

void marker_start(std::string_view name);
void marker_stop(std::string_view name);

/// RAII marker region.
class ScopedMarker {
 public:
  explicit ScopedMarker(std::string name, MarkerRegistry& reg = markers())
      : name_(std::move(name)), reg_(reg) {
    reg_.start(name_);
  }
  ScopedMarker(const ScopedMarker&) = delete;
  ScopedMarker& operator=(const ScopedMarker&) = delete;
  ~ScopedMarker() {
    try {
      reg_.stop(name_);
    } catch (...) {
    }
  }

 private:
  std::string name_;
  MarkerRegistry& reg_;
};

}  // namespace vizdpp::perf
