// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include "vizdpp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <stdexcept>
#include <type_traits>

#include "vizdpp/advection.hpp"
#include "vizdpp/dpp.hpp"
#include "vizdpp/field_io.hpp"
#include "vizdpp/isocontour.hpp"
#include "vizdpp/stencil.hpp"

namespace vizdpp::bench {

namespace {

template <typename Names>
std::vector<std::string> names_of(const Names& names) {
  return {std::begin(names), std::end(names)};
}

template <typename Enum, typename Names>
Enum strategy_enum(const Names& names, std::string_view s) {
  for (std::size_t i = 0; i < std::size(names); ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Index parse_index(std::string_view s) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t hash_image(const StructuredField& f) {
  return fnv1a(f.values().data(), f.values().size_bytes());
}

std::uint64_t hash_mesh(const contour::TriangleMesh& mesh) {
  const auto tris = contour::canonical_triangles(mesh);
  return fnv1a(tris.data(), tris.size() * sizeof(contour::CanonicalTriangle));
}

std::uint64_t hash_streamlines(const std::vector<advect::Streamline>& lines) {
  std::uint64_t h = fnv1a(nullptr, 0);
  for (const auto& l : lines) {
    const auto term = static_cast<int>(l.termination);
    h = fnv1a(&l.seed_id, sizeof(l.seed_id), h);
    h = fnv1a(&term, sizeof(term), h);
    h = fnv1a(l.points.data(), l.points.size() * sizeof(Vec3), h);
  }
  return h;
}

}  // namespace

std::string_view to_string(Kernel k) {
  switch (k) {
    case Kernel::Stencil:
      return "stencil";
    case Kernel::Isocontour:
      return "isocontour";
    case Kernel::Advection:
      return "advection";
  }
  return "?";
}

std::optional<Kernel> parse_kernel(std::string_view text) {
  if (text == "stencil") return Kernel::Stencil;
  if (text == "isocontour") return Kernel::Isocontour;
  if (text == "advection") return Kernel::Advection;
  return std::nullopt;
}

std::vector<std::string> strategies_for(Kernel k) {
  switch (k) {
    case Kernel::Stencil:
      return names_of(stencil::kStrategyNames);
    case Kernel::Isocontour:
      return names_of(contour::kStrategyNames);
    case Kernel::Advection:
      return names_of(advect::kStrategyNames);
  }
  return {};
}

bool is_serial_strategy(Kernel k, std::string_view strategy) {
  return (k == Kernel::Isocontour || k == Kernel::Advection) && strategy == "serial";
}

SyntheticSpec SyntheticSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 3) {
    throw std::invalid_argument("synthetic spec must be <generator>:<dims>[:<param>], got '" +
                                std::string(text) + "'");
  }
  SyntheticSpec spec;
  spec.generator = parts[0];
  if (spec.generator != "noise" && spec.generator != "impulse" && spec.generator != "sphere" &&
      spec.generator != "rotational") {
    throw std::invalid_argument("unknown synthetic generator '" + spec.generator + "'");
  }
  const auto d = split(parts[1], 'x');
  if (d.size() < 2 || d.size() > 3) throw std::invalid_argument("dims must be NXxNY[xNZ]");
  spec.dims = {parse_index(d[0]), parse_index(d[1]), d.size() == 3 ? parse_index(d[2]) : 1};
  spec.dims.validate();
  if (parts.size() == 3) spec.param = parse_double(parts[2]);
  return spec;
}

StructuredField SyntheticSpec::generate(std::uint64_t seed) const {
  if (generator == "noise") return gen_noise_field(dims, seed);
  if (generator == "impulse") return gen_impulse_image(dims, dims.nx / 2, dims.ny / 2);
  if (generator == "sphere") {
    const Vec3 center = {0.5 * static_cast<double>(dims.nx - 1), 0.5 * static_cast<double>(dims.ny - 1),
                         0.5 * static_cast<double>(dims.nz - 1)};
    const double radius =
        param.value_or(0.25 * static_cast<double>(std::min({dims.nx, dims.ny, dims.nz}) - 1));
    return gen_sphere_field(dims, center, radius);
  }
  return gen_rotational_field(dims, param.value_or(1.0));
}

void BenchConfig::validate() const {
  if (dataset && synthetic) throw std::invalid_argument("give either a dataset or a synthetic spec");
  if (thread_counts.empty()) throw std::invalid_argument("thread_counts must not be empty");
  for (std::size_t i = 0; i < thread_counts.size(); ++i) {
    if (thread_counts[i] < 1) throw std::invalid_argument("thread counts must be >= 1");
    if (i > 0 && thread_counts[i] <= thread_counts[i - 1]) {
      throw std::invalid_argument("thread counts must be strictly ascending");
    }
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (chunk_size < 1) throw std::invalid_argument("chunk_size must be >= 1");
  const auto known = strategies_for(kernel);
  for (const auto& s : strategies) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw std::invalid_argument("strategy '" + s + "' does not exist for kernel " +
                                  std::string(to_string(kernel)));
    }
  }
  switch (kernel) {
    case Kernel::Stencil:
      if (kernel_size < 1 || kernel_size % 2 == 0) throw std::invalid_argument("kernel size must be odd");
      if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
      break;
    case Kernel::Isocontour:
      break;
    case Kernel::Advection:
      if (n_seeds < 2) throw std::invalid_argument("need at least 2 seeds");
      if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
      if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("step size must be positive");
      break;
  }
}

std::vector<std::string> BenchConfig::resolved_strategies() const {
  return strategies.empty() ? strategies_for(kernel) : strategies;
}

std::optional<BenchConfig> preset(std::string_view name) {
  BenchConfig cfg;
  cfg.thread_counts = {1, 2, 4, 8};
  cfg.repetitions = 3;
  if (name == "stencil-paper") {
    cfg.kernel = Kernel::Stencil;
    cfg.kernel_size = 19;
    cfg.sigma = 0.33;
    cfg.synthetic = "noise:5160x5220";
  } else if (name == "iso-paper") {
    cfg.kernel = Kernel::Isocontour;
    cfg.isovalue = 15.0;
    cfg.synthetic = "sphere:400x400x400:100";
  } else if (name == "advect-paper") {
    cfg.kernel = Kernel::Advection;
    cfg.n_seeds = 500;
    cfg.max_steps = 1000;
    cfg.synthetic = "rotational:64x64x64";
  } else {
    return std::nullopt;
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"stencil-paper", "iso-paper", "advect-paper"}; }

StructuredField make_input(const BenchConfig& cfg) {
  if (cfg.dataset) return load_field(*cfg.dataset);
  if (cfg.synthetic) return SyntheticSpec::parse(*cfg.synthetic).generate(cfg.seed);
  switch (cfg.kernel) {
    case Kernel::Stencil:
      return SyntheticSpec::parse("noise:512x512").generate(cfg.seed);
    case Kernel::Isocontour:
      return SyntheticSpec::parse("sphere:64x64x64:10").generate(cfg.seed);
    case Kernel::Advection:
      return SyntheticSpec::parse("rotational:32x32x32").generate(cfg.seed);
  }
  throw std::invalid_argument("unknown kernel");
}

KernelOutput run_kernel(const BenchConfig& cfg, const StructuredField& input,
                        std::string_view strategy, int threads) {
  const dpp::ExecConfig exec{threads, cfg.chunk_size};
  switch (cfg.kernel) {
    case Kernel::Stencil: {
      const auto kernel = stencil::build_gaussian_weights(cfg.kernel_size, cfg.sigma);
      const auto s = strategy_enum<stencil::Strategy>(stencil::kStrategyNames, strategy);
      return stencil::smooth(s, input, kernel, exec);
    }
    case Kernel::Isocontour: {
      const auto s = strategy_enum<contour::Strategy>(contour::kStrategyNames, strategy);
      if (s == contour::Strategy::Serial) return contour::contour_serial(input, cfg.isovalue);
      return contour::contour_dpp(input, cfg.isovalue, exec, {cfg.reclassify});
    }
    case Kernel::Advection: {
      const auto s = strategy_enum<advect::Strategy>(advect::kStrategyNames, strategy);
      const auto seeds = advect::make_diagonal_seeds(input, cfg.n_seeds);
      const advect::IntegrationParams params{
          cfg.step_size.value_or(advect::default_step_size(input)), cfg.max_steps};
      if (s == advect::Strategy::Serial) return advect::trace_serial(input, seeds, params);
      return advect::trace_parallel_over_seeds(input, seeds, params, exec);
    }
  }
  throw std::invalid_argument("unknown kernel");
}

std::uint64_t hash_output(const KernelOutput& out) {
  return std::visit(
      [](const auto& v) -> std::uint64_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StructuredField>) {
          return hash_image(v);
        } else if constexpr (std::is_same_v<T, contour::TriangleMesh>) {
          return hash_mesh(v);
        } else {
          return hash_streamlines(v);
        }
      },
      out);
}

std::uint64_t run_once(const BenchConfig& cfg, const StructuredField& input,
                       std::string_view strategy, int threads) {
  return hash_output(run_kernel(cfg, input, strategy, threads));
}

std::vector<BenchRecord> run_suite(const BenchConfig& cfg) {
  cfg.validate();
  const StructuredField input = make_input(cfg);
  const std::string kernel(to_string(cfg.kernel));

  std::vector<BenchRecord> records;
  for (const auto& strategy : cfg.resolved_strategies()) {
    const bool serial = is_serial_strategy(cfg.kernel, strategy);
    const std::vector<int> threads = serial ? std::vector<int>{1} : cfg.thread_counts;
    const std::string region = kernel + "/" + strategy;
    for (int p : threads) {
      run_once(cfg, input, strategy, p);  // warm-up
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        perf::markers().start(region);
        std::optional<KernelOutput> out;
        try {
          out = run_kernel(cfg, input, strategy, p);
        } catch (...) {
          perf::markers().stop(region);
          perf::markers().take(region);
          throw;
        }
        perf::markers().stop(region);
        const std::uint64_t hash = hash_output(*out);
        const perf::RegionReport report = perf::markers().take(region);

        BenchRecord r;
        r.kernel = kernel;
        r.strategy = strategy;
        r.threads = p;
        r.rep = rep;
        r.counters = report.aggregate;
        r.metrics = report.metrics;
        r.output_hash = hash;
        r.serial_only = serial;
        records.push_back(std::move(r));
      }
    }
  }

  for (const auto& r : records) {
    if (r.output_hash != records.front().output_hash) {
      throw std::runtime_error("sweep outputs differ: " + r.strategy + " at " +
                               std::to_string(r.threads) + " threads does not match " +
                               records.front().strategy + " at " +
                               std::to_string(records.front().threads) + " threads");
    }
  }
  return records;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::vector<BenchRecord> compute_speedup(std::vector<BenchRecord> records) {
  std::map<std::pair<std::string, std::string>, std::map<int, std::vector<double>>> runtimes;
  for (const auto& r : records) {
    runtimes[{r.kernel, r.strategy}][r.threads].push_back(r.metrics.runtime_s);
  }
  for (auto& r : records) {
    const auto& by_threads = runtimes.at({r.kernel, r.strategy});
    const auto base = by_threads.find(1);
    if (base == by_threads.end()) {
      throw std::invalid_argument("no single-thread baseline for " + r.kernel + "/" + r.strategy);
    }
    if (r.threads == 1) {
      r.speedup = 1.0;
    } else {
      r.speedup = median(base->second) / median(by_threads.at(r.threads));
    }
  }
  return records;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace vizdpp::bench
