// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/dpp.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

#include "vizdpp/perf.hpp"

namespace vizdpp::dpp {

namespace {

class WorkerPool {
 public:
  static WorkerPool& instance() {
    static WorkerPool pool;
    return pool;
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(int participants, const std::function<void(int)>& body) {
    std::lock_guard dispatch(dispatch_mutex_);
    grow(participants - 1);

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(participants));
    {
      std::lock_guard lock(mutex_);
      job_ = &body;
      errors_ = &errors;
      active_ = participants - 1;
      pending_ = active_;
      ++generation_;
    }
    start_cv_.notify_all();

    try {
      body(0);
    } catch (...) {
      errors[0] = std::current_exception();
    }

    {
      std::unique_lock lock(mutex_);
      done_cv_.wait(lock, [&] { return pending_ == 0; });
      job_ = nullptr;
      errors_ = nullptr;
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  int size() {
    std::lock_guard lock(mutex_);
    return static_cast<int>(threads_.size());
  }

 private:
  WorkerPool() = default;

  void grow(int workers) {
    std::lock_guard lock(mutex_);
    while (static_cast<int>(threads_.size()) < workers) {
      const int id = static_cast<int>(threads_.size());
      threads_.emplace_back([this, id, seen = generation_] { worker_main(id, seen); });
    }
  }

  void worker_main(int id, std::uint64_t seen) {
    perf::attach_current_thread();
    for (;;) {
      const std::function<void(int)>* job = nullptr;
      std::vector<std::exception_ptr>* errors = nullptr;
      {
        std::unique_lock lock(mutex_);
        start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        if (id >= active_) continue;
        job = job_;
        errors = errors_;
      }
      try {
        (*job)(id + 1);
      } catch (...) {
        (*errors)[static_cast<std::size_t>(id + 1)] = std::current_exception();
      }
      {
        std::lock_guard lock(mutex_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  std::mutex dispatch_mutex_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  std::vector<std::thread> threads_;
  const std::function<void(int)>* job_ = nullptr;
  std::vector<std::exception_ptr>* errors_ = nullptr;
  int active_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

Index checked_add(Index a, Index b) {
  Index out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("exclusive scan overflows the index type");
  }
  return out;
}

}  // namespace

void ExecConfig::validate() const {
  if (num_threads < 1) throw std::invalid_argument("num_threads must be >= 1");
  if (chunk_size < 1) throw std::invalid_argument("chunk_size must be >= 1");
}

void run_participants(int participants, const std::function<void(int)>& body) {
  if (participants < 1) throw std::invalid_argument("participants must be >= 1");
  if (participants == 1) {
    body(0);
    return;
  }
  WorkerPool::instance().run(participants, body);
}

int pool_size() { return WorkerPool::instance().size(); }

std::vector<Index> exclusive_scan(std::span<const Index> xs) {
  std::vector<Index> out(xs.size());
  Index running = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = running;
    running = checked_add(running, xs[i]);
  }
  return out;
}

std::vector<Index> exclusive_scan(std::span<const Index> xs, const ExecConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Index>(xs.size());
  if (cfg.num_threads == 1 || n < 2 * cfg.chunk_size) return exclusive_scan(xs);

  // Reduce each block, scan the block sums, then rescan each block from its
  // offset. Integer addition makes this identical to the serial scan.
  const int blocks = static_cast<int>(std::min<Index>(cfg.num_threads, n));
  auto block_begin = [&](int b) { return n * b / blocks; };

  std::vector<Index> sums(static_cast<std::size_t>(blocks), 0);
  run_participants(blocks, [&](int b) {
    Index s = 0;
    for (Index i = block_begin(b); i < block_begin(b + 1); ++i) {
      s = checked_add(s, xs[static_cast<std::size_t>(i)]);
    }
    sums[static_cast<std::size_t>(b)] = s;
  });
  const std::vector<Index> block_offsets = exclusive_scan(sums);
  checked_add(block_offsets.back(), sums.back());

  std::vector<Index> out(xs.size());
  run_participants(blocks, [&](int b) {
    Index running = block_offsets[static_cast<std::size_t>(b)];
    for (Index i = block_begin(b); i < block_begin(b + 1); ++i) {
      out[static_cast<std::size_t>(i)] = running;
      running += xs[static_cast<std::size_t>(i)];
    }
  });
  return out;
}

namespace {

ScatterPlan finish_plan(std::vector<Index> counts, std::vector<Index> offsets) {
  ScatterPlan plan;
  plan.total = counts.empty() ? 0 : checked_add(offsets.back(), counts.back());
  plan.counts = std::move(counts);
  plan.offsets = std::move(offsets);
  return plan;
}

void check_counts(std::span<const Index> counts) {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      throw std::invalid_argument("scatter count at " + std::to_string(i) + " is negative");
    }
  }
}

}  // namespace

ScatterPlan build_scatter(std::vector<Index> counts) {
  check_counts(counts);
  auto offsets = exclusive_scan(counts);
  return finish_plan(std::move(counts), std::move(offsets));
}

ScatterPlan build_scatter(std::vector<Index> counts, const ExecConfig& cfg) {
  check_counts(counts);
  auto offsets = exclusive_scan(counts, cfg);
  return finish_plan(std::move(counts), std::move(offsets));
}

}  // namespace vizdpp::dpp
