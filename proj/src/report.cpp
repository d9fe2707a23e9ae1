// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The vizdpp Authors

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vizdpp/bench.hpp"

namespace vizdpp::bench {

namespace {

constexpr std::string_view kNA = "N/A";

std::string fmt_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string fmt(const perf::Count& c) { return c ? std::to_string(*c) : std::string(kNA); }
std::string fmt(const std::optional<double>& d) { return d ? fmt_double(*d) : std::string(kNA); }

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view s, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad number '" +
                                std::string(s) + "'");
  }
  return v;
}

perf::Count parse_count(std::string_view s, std::size_t line_no) {
  if (s == kNA) return std::nullopt;
  return parse_num<std::uint64_t>(s, line_no);
}

std::optional<double> parse_opt(std::string_view s, std::size_t line_no) {
  if (s == kNA) return std::nullopt;
  return parse_num<double>(s, line_no);
}

nlohmann::json to_json(const perf::Count& c) { return c ? nlohmann::json(*c) : nlohmann::json(nullptr); }
nlohmann::json to_json(const std::optional<double>& d) {
  return d ? nlohmann::json(*d) : nlohmann::json(nullptr);
}

// ---- SVG ------------------------------------------------------------------

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

constexpr std::array<std::string_view, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                     "#ff7f0e", "#9467bd", "#8c564b"};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (threads, value)
};

std::string num(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

std::string render_chart(const std::string& title, const std::string& ylabel,
                         const std::vector<Series>& series, double x_max, double y_max,
                         bool ideal) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x_max > 1 ? (x - 1) / (x_max - 1) : 0.0) * pw; };
  const auto sy = [&](double y) { return kTop + ph - (y_max > 0 ? y / y_max : 0.0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << title << "</text>\n";
  o << "<g id=\"axes\" stroke=\"black\">\n";
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw)
    << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
    << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  o << "</g>\n";

  std::set<double> xs;
  for (const auto& s : series) {
    for (const auto& p : s.points) xs.insert(p.first);
  }
  o << "<g id=\"ticks\" font-size=\"11\">\n";
  for (double x : xs) {
    o << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = y_max * i / 4.0;
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">"
      << tick_label(y) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
    << "\" text-anchor=\"middle\" font-size=\"12\">threads</text>\n";
  o << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\""
    << " transform=\"rotate(-90 16 " << num(kTop + ph / 2) << ")\">" << ylabel << "</text>\n";

  if (ideal) {
    const double top = std::min(x_max, y_max);
    o << "<line id=\"ideal\" x1=\"" << num(sx(1)) << "\" y1=\"" << num(sy(1)) << "\" x2=\""
      << num(sx(top)) << "\" y2=\"" << num(sy(top))
      << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const auto color = kColors[i % kColors.size()];
    o << "<g class=\"series\" data-strategy=\"" << s.name << "\">\n<polyline fill=\"none\" stroke=\""
      << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      if (k) o << ' ';
      o << num(sx(s.points[k].first)) << ',' << num(sy(s.points[k].second));
    }
    o << "\"/>\n";
    for (const auto& p : s.points) {
      o << "<circle cx=\"" << num(sx(p.first)) << "\" cy=\"" << num(sy(p.second))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    o << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(kLeft + pw + 32) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(kLeft + pw + 36) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">"
      << s.name << "</text>\n</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string to_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    const auto& c = r.counters;
    const auto& m = r.metrics;
    out += r.kernel + ',' + r.strategy + ',' + std::to_string(r.threads) + ',' +
           std::to_string(r.rep) + ',' + fmt_double(m.runtime_s) + ',' + fmt(c.instructions_retired) +
           ',' + fmt(c.cycles) + ',' + fmt(m.cpi) + ',' + fmt(c.flops_scalar) + ',' +
           fmt(c.flops_packed) + ',' + fmt(m.vectorization_pct) + ',' + fmt(c.l3_requests) + ',' +
           fmt(c.l3_misses) + ',' + fmt(m.l3_miss_ratio_pct) + ',' + fmt(r.speedup) + '\n';
  }
  return out;
}

void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  write_text(path, to_csv(records));
}

void emit_json(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    const auto& c = r.counters;
    const auto& m = r.metrics;
    arr.push_back({
        {"kernel", r.kernel},
        {"strategy", r.strategy},
        {"threads", r.threads},
        {"rep", r.rep},
        {"runtime_s", m.runtime_s},
        {"instructions", to_json(c.instructions_retired)},
        {"cycles", to_json(c.cycles)},
        {"cpi", to_json(m.cpi)},
        {"flops_scalar", to_json(c.flops_scalar)},
        {"flops_packed", to_json(c.flops_packed)},
        {"vectorization_pct", to_json(m.vectorization_pct)},
        {"l3_requests", to_json(c.l3_requests)},
        {"l3_misses", to_json(c.l3_misses)},
        {"l3_miss_ratio_pct", to_json(m.l3_miss_ratio_pct)},
        {"speedup", to_json(r.speedup)},
        {"call_count", c.call_count},
        {"output_hash", r.output_hash},
        {"serial_only", r.serial_only},
    });
  }
  write_text(path, arr.dump(2) + "\n");
}

std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kCsvHeader) throw std::invalid_argument("csv header mismatch");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 15) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 15 fields");
    }
    BenchRecord r;
    r.kernel = std::string(f[0]);
    r.strategy = std::string(f[1]);
    r.threads = parse_num<int>(f[2], line_no);
    r.rep = parse_num<int>(f[3], line_no);
    r.metrics.runtime_s = parse_num<double>(f[4], line_no);
    r.counters.wall_time_s = r.metrics.runtime_s;
    r.counters.instructions_retired = parse_count(f[5], line_no);
    r.counters.cycles = parse_count(f[6], line_no);
    r.metrics.cpi = parse_opt(f[7], line_no);
    r.counters.flops_scalar = parse_count(f[8], line_no);
    r.counters.flops_packed = parse_count(f[9], line_no);
    r.metrics.vectorization_pct = parse_opt(f[10], line_no);
    r.counters.l3_requests = parse_count(f[11], line_no);
    r.counters.l3_misses = parse_count(f[12], line_no);
    r.metrics.l3_miss_ratio_pct = parse_opt(f[13], line_no);
    r.speedup = parse_opt(f[14], line_no);
    out.push_back(std::move(r));
  }
  if (line_no == 0) throw std::invalid_argument("empty csv");
  return out;
}

std::vector<std::filesystem::path> emit_plots(const std::vector<BenchRecord>& records,
                                              const std::filesystem::path& dir) {
  std::set<int> all_threads;
  for (const auto& r : records) all_threads.insert(r.threads);
  if (all_threads.size() < 2) {
    throw std::invalid_argument("plots need at least two distinct thread counts");
  }
  const auto with_speedup = compute_speedup(records);

  // kernel -> strategy -> threads -> (runtimes, speedups); std::map keeps the
  // output order independent of record order.
  std::map<std::string, std::map<std::string, std::map<int, std::pair<std::vector<double>, double>>>>
      grouped;
  for (const auto& r : with_speedup) {
    auto& cell = grouped[r.kernel][r.strategy][r.threads];
    cell.first.push_back(r.metrics.runtime_s);
    cell.second = r.speedup.value_or(0.0);
  }

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const double x_max = *all_threads.rbegin();
  for (const auto& [kernel, strategies] : grouped) {
    std::vector<Series> runtime;
    std::vector<Series> speedup;
    double t_max = 0.0;
    double s_max = x_max;
    for (const auto& [strategy, by_threads] : strategies) {
      Series rt{strategy, {}};
      Series sp{strategy, {}};
      for (const auto& [p, cell] : by_threads) {
        const double t = median(cell.first);
        rt.points.emplace_back(p, t);
        sp.points.emplace_back(p, cell.second);
        t_max = std::max(t_max, t);
        s_max = std::max(s_max, cell.second);
      }
      runtime.push_back(std::move(rt));
      speedup.push_back(std::move(sp));
    }
    const auto rt_path = dir / (kernel + "_runtime.svg");
    const auto sp_path = dir / (kernel + "_speedup.svg");
    write_text(rt_path, render_chart(kernel + ": median runtime", "runtime [s]", runtime, x_max,
                                     t_max > 0 ? 1.1 * t_max : 1.0, false));
    write_text(sp_path, render_chart(kernel + ": speedup", "speedup", speedup, x_max, s_max, true));
    written.push_back(rt_path);
    written.push_back(sp_path);
  }
  return written;
}

}  // namespace vizdpp::bench
