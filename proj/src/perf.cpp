// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/perf.hpp"

#include <linux/perf_event.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <map>
#include <stdexcept>

namespace vizdpp::perf {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<HwCounter, 4> kDefaultCounters = {
    HwCounter::Instructions, HwCounter::Cycles, HwCounter::CacheReferences,
    HwCounter::CacheMisses};

Count add(const Count& a, const Count& b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

Count sub(const Count& now, const Count& before) {
  if (!now) return std::nullopt;
  const std::uint64_t base = before.value_or(0);
  return *now >= base ? *now - base : 0;
}

std::uint64_t config_for(HwCounter c) {
  switch (c) {
    case HwCounter::Instructions:
      return PERF_COUNT_HW_INSTRUCTIONS;
    case HwCounter::Cycles:
      return PERF_COUNT_HW_CPU_CYCLES;
    case HwCounter::CacheReferences:
      return PERF_COUNT_HW_CACHE_REFERENCES;
    case HwCounter::CacheMisses:
      return PERF_COUNT_HW_CACHE_MISSES;
  }
  return 0;
}

int open_event(std::uint64_t config, int tid) {
  perf_event_attr attr{};
  attr.size = sizeof(attr);
  attr.type = PERF_TYPE_HARDWARE;
  attr.config = config;
  attr.exclude_kernel = 1;
  attr.exclude_hv = 1;
  return static_cast<int>(syscall(SYS_perf_event_open, &attr, tid, -1, -1, 0));
}

int current_tid() { return static_cast<int>(syscall(SYS_gettid)); }

bool wants_hardware(Backend b) { return b == Backend::Auto || b == Backend::Hardware; }
bool wants_software(Backend b) { return b != Backend::None && b != Backend::Hardware; }

// One slot per thread that ever ran instrumented work. Slots are never
// freed; the runtime's worker pool is persistent so the set stays small.
struct ThreadSlot {
  alignas(64) std::atomic<std::uint64_t> flops{0};
  int tid = 0;
  std::size_t id = 0;
  std::mutex hw_mutex;
  bool hw_tried = false;
  std::optional<HardwareCounters> hw;

  const HardwareCounters* hardware() {
    std::lock_guard lock(hw_mutex);
    if (!hw_tried) {
      hw_tried = true;
      if (hardware_available()) hw = HardwareCounters::open(kDefaultCounters, tid);
    }
    return hw ? &*hw : nullptr;
  }
};

class SlotRegistry {
 public:
  ThreadSlot* add(int tid) {
    std::lock_guard lock(mutex_);
    auto& slot = slots_.emplace_back();
    slot.tid = tid;
    slot.id = slots_.size() - 1;
    return &slot;
  }

  std::vector<ThreadSlot*> all() {
    std::lock_guard lock(mutex_);
    std::vector<ThreadSlot*> out;
    out.reserve(slots_.size());
    for (auto& s : slots_) out.push_back(&s);
    return out;
  }

 private:
  std::mutex mutex_;
  std::deque<ThreadSlot> slots_;
};

SlotRegistry& slot_registry() {
  static SlotRegistry registry;
  return registry;
}

thread_local ThreadSlot* tls_slot = nullptr;

ThreadSlot* this_slot() {
  if (tls_slot == nullptr) tls_slot = slot_registry().add(current_tid());
  return tls_slot;
}

std::atomic<Backend>& backend_state() {
  static std::atomic<Backend> state{backend_from_env()};
  return state;
}

struct ThreadReading {
  Count flops;
  std::array<Count, 4> hw;
};

ThreadReading read_slot(ThreadSlot& slot, Backend b) {
  ThreadReading r;
  if (wants_software(b)) r.flops = slot.flops.load(std::memory_order_acquire);
  if (wants_hardware(b)) {
    if (const HardwareCounters* hw = slot.hardware()) {
      for (std::size_t c = 0; c < kDefaultCounters.size(); ++c) {
        r.hw[c] = hw->read(kDefaultCounters[c]);
      }
    }
  }
  return r;
}

}  // namespace

CounterSample merge(const CounterSample& a, const CounterSample& b) {
  CounterSample out;
  out.instructions_retired = add(a.instructions_retired, b.instructions_retired);
  out.cycles = add(a.cycles, b.cycles);
  out.flops_scalar = add(a.flops_scalar, b.flops_scalar);
  out.flops_packed = add(a.flops_packed, b.flops_packed);
  out.l3_requests = add(a.l3_requests, b.l3_requests);
  out.l3_misses = add(a.l3_misses, b.l3_misses);
  out.wall_time_s = a.wall_time_s + b.wall_time_s;
  out.call_count = a.call_count + b.call_count;
  return out;
}

DerivedMetrics derive_metrics(const CounterSample& s) {
  DerivedMetrics m;
  m.runtime_s = s.wall_time_s;
  if (s.cycles && s.instructions_retired && *s.instructions_retired > 0) {
    m.cpi = static_cast<double>(*s.cycles) / static_cast<double>(*s.instructions_retired);
  }
  if (s.flops_packed && s.flops_scalar && (*s.flops_packed + *s.flops_scalar) > 0) {
    m.vectorization_pct = 100.0 * static_cast<double>(*s.flops_packed) /
                          static_cast<double>(*s.flops_packed + *s.flops_scalar);
  }
  if (s.l3_misses && s.l3_requests && *s.l3_requests > 0) {
    m.l3_miss_ratio_pct =
        100.0 * static_cast<double>(*s.l3_misses) / static_cast<double>(*s.l3_requests);
  }
  return m;
}

std::optional<Backend> parse_backend(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "AUTO") return Backend::Auto;
  if (upper == "HARDWARE") return Backend::Hardware;
  if (upper == "SOFTWARE") return Backend::Software;
  if (upper == "NONE") return Backend::None;
  return std::nullopt;
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Auto:
      return "AUTO";
    case Backend::Hardware:
      return "HARDWARE";
    case Backend::Software:
      return "SOFTWARE";
    case Backend::None:
      return "NONE";
  }
  return "?";
}

Backend backend_from_env() {
  const char* env = std::getenv("VIZDPP_PERF_BACKEND");
  if (env == nullptr) return Backend::Auto;
  return parse_backend(env).value_or(Backend::Auto);
}

Backend backend() {
  const Backend b = backend_state().load();
  // A forced hardware backend on a machine without counters degrades to
  // software tallies instead of failing the run.
  if (b == Backend::Hardware && !hardware_available()) return Backend::Software;
  return b;
}

void set_backend(Backend b) { backend_state().store(b); }

std::optional<HardwareCounters> HardwareCounters::open(std::span<const HwCounter> counters,
                                                       int tid) {
  HardwareCounters hc;
  bool any = false;
  for (HwCounter c : counters) {
    const int fd = open_event(config_for(c), tid);
    if (fd >= 0) {
      hc.fds_[static_cast<std::size_t>(c)] = fd;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return hc;
}

HardwareCounters::HardwareCounters(HardwareCounters&& other) noexcept : fds_(other.fds_) {
  other.fds_.fill(-1);
}

HardwareCounters& HardwareCounters::operator=(HardwareCounters&& other) noexcept {
  if (this != &other) {
    for (int fd : fds_) {
      if (fd >= 0) ::close(fd);
    }
    fds_ = other.fds_;
    other.fds_.fill(-1);
  }
  return *this;
}

HardwareCounters::~HardwareCounters() {
  for (int fd : fds_) {
    if (fd >= 0) ::close(fd);
  }
}

bool HardwareCounters::has(HwCounter c) const { return fds_[static_cast<std::size_t>(c)] >= 0; }

std::optional<std::uint64_t> HardwareCounters::read(HwCounter c) const {
  const int fd = fds_[static_cast<std::size_t>(c)];
  if (fd < 0) return std::nullopt;
  std::uint64_t value = 0;
  if (::read(fd, &value, sizeof(value)) != static_cast<ssize_t>(sizeof(value))) {
    return std::nullopt;
  }
  return value;
}

std::span<const HwCounter> default_counter_set() { return kDefaultCounters; }

bool hardware_available() {
  static const bool available = HardwareCounters::open(kDefaultCounters).has_value();
  return available;
}

void attach_current_thread() { (void)this_slot(); }

void tally_flops(std::uint64_t n) {
  // Single writer per slot; relaxed is enough, readers use acquire after the
  // dispatch barrier.
  auto& f = this_slot()->flops;
  f.store(f.load(std::memory_order_relaxed) + n, std::memory_order_release);
}

struct MarkerRegistry::Region {
  bool active = false;
  Backend backend = Backend::None;
  Clock::time_point started;
  std::map<std::size_t, ThreadReading> baseline;
  std::optional<CounterSample> aggregate;
  std::map<std::size_t, CounterSample> per_thread;
};

void MarkerRegistry::start(std::string_view name) {
  std::lock_guard lock(mutex_);
  auto& region = regions_[std::string(name)];
  if (!region) region = std::make_shared<Region>();
  if (region->active) {
    throw std::logic_error("marker region '" + std::string(name) + "' already started");
  }
  region->active = true;
  region->backend = backend();
  region->baseline.clear();
  if (region->backend != Backend::None) {
    attach_current_thread();
    for (ThreadSlot* slot : slot_registry().all()) {
      region->baseline[slot->id] = read_slot(*slot, region->backend);
    }
  }
  region->started = Clock::now();
}

void MarkerRegistry::stop(std::string_view name) {
  const auto stopped = Clock::now();
  std::lock_guard lock(mutex_);
  auto it = regions_.find(std::string(name));
  if (it == regions_.end() || !it->second->active) {
    throw std::logic_error("marker region '" + std::string(name) + "' stopped without start");
  }
  Region& region = *it->second;
  region.active = false;

  CounterSample visit;
  if (region.backend != Backend::None) {
    bool first = true;
    for (ThreadSlot* slot : slot_registry().all()) {
      const ThreadReading now = read_slot(*slot, region.backend);
      const auto base_it = region.baseline.find(slot->id);
      const ThreadReading base = base_it != region.baseline.end() ? base_it->second : ThreadReading{};

      CounterSample delta;
      delta.flops_scalar = sub(now.flops, base.flops);
      delta.instructions_retired = sub(now.hw[0], base.hw[0]);
      delta.cycles = sub(now.hw[1], base.hw[1]);
      delta.l3_requests = sub(now.hw[2], base.hw[2]);
      delta.l3_misses = sub(now.hw[3], base.hw[3]);

      visit = first ? delta : merge(visit, delta);
      first = false;
      auto [pt, inserted] = region.per_thread.try_emplace(slot->id, delta);
      if (!inserted) pt->second = merge(pt->second, delta);
    }
  }
  visit.wall_time_s = std::chrono::duration<double>(stopped - region.started).count();
  visit.call_count = 1;

  region.aggregate = region.aggregate ? merge(*region.aggregate, visit) : visit;
}

RegionReport MarkerRegistry::report(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = regions_.find(std::string(name));
  if (it == regions_.end()) {
    throw std::out_of_range("unknown marker region '" + std::string(name) + "'");
  }
  const Region& region = *it->second;
  RegionReport rep;
  rep.name = std::string(name);
  rep.aggregate = region.aggregate.value_or(CounterSample{});
  for (const auto& [id, sample] : region.per_thread) rep.per_thread.push_back(sample);
  rep.metrics = derive_metrics(rep.aggregate);
  return rep;
}

RegionReport MarkerRegistry::take(std::string_view name) {
  RegionReport rep = report(name);
  std::lock_guard lock(mutex_);
  regions_.erase(std::string(name));
  return rep;
}

std::vector<std::string> MarkerRegistry::regions() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> names;
  for (const auto& [name, region] : regions_) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

void MarkerRegistry::clear() {
  std::lock_guard lock(mutex_);
  regions_.clear();
}

MarkerRegistry& markers() {
  static MarkerRegistry registry;
  return registry;
}

void marker_start(std::string_view name) { markers().start(name); }
void marker_stop(std::string_view name) { markers().stop(name); }

}  // namespace vizdpp::perf
