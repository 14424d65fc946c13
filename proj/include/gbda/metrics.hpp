#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gbda {

struct EvalReport {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
  /// Per-query latencies in seconds.
  std::vector<double> latencies;

  /// Recomputes precision, recall and F1 from the counts. Precision of an
  /// empty result set is 1 when nothing was to be found, else 0; recall with
  /// an empty truth set is 1.
  void finalize() {
    precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : (fn == 0 ? 1.0 : 0.0);
    recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
    f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  }
};

inline EvalReport evaluate(const std::set<std::string>& results, const std::set<std::string>& truth) {
  EvalReport r;
  for (const auto& id : results) (truth.count(id) ? r.tp : r.fp) += 1;
  for (const auto& id : truth) r.fn += !results.count(id);
  r.finalize();
  return r;
}

/// Micro-averaged report over several queries: counts are summed and the
/// rates recomputed; latencies are concatenated.
inline EvalReport merge_reports(const std::vector<EvalReport>& reports) {
  EvalReport out;
  for (const auto& r : reports) {
    out.tp += r.tp;
    out.fp += r.fp;
    out.fn += r.fn;
    out.latencies.insert(out.latencies.end(), r.latencies.begin(), r.latencies.end());
  }
  out.finalize();
  return out;
}

inline double mean_latency(const EvalReport& r) {
  if (r.latencies.empty()) return 0;
  double s = 0;
  for (double l : r.latencies) s += l;
  return s / static_cast<double>(r.latencies.size());
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  return {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
          {"tp", r.tp},               {"fp", r.fp},         {"fn", r.fn},
          {"queries", r.latencies.size()}, {"mean_latency_s", mean_latency(r)}};
}

/// Aligned plain-text table, one row per named report.
inline std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t width = 6;
  for (const auto& [name, r] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %7s %7s %7s %12s\n", static_cast<int>(width), "method", "precision",
                "recall", "f1", "tp", "fp", "fn", "latency_ms");
  out += buf;
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %9.4f %9.4f %9.4f %7zu %7zu %7zu %12.4f\n", static_cast<int>(width),
                  name.c_str(), r.precision, r.recall, r.f1, r.tp, r.fp, r.fn, 1e3 * mean_latency(r));
    out += buf;
  }
  return out;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  void reset() { start_ = std::chrono::steady_clock::now(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace gbda
