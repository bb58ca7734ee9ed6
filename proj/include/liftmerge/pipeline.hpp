#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "liftmerge/evaluator.hpp"
#include "liftmerge/generator.hpp"
#include "liftmerge/merge.hpp"
#include "liftmerge/reduce.hpp"
#include "liftmerge/solution.hpp"

namespace liftmerge {

/// The compiled evaluator disagrees with the sequential oracle.
class OracleMismatch : public std::runtime_error {
 public:
  OracleMismatch(const std::string& what, Eigen::VectorXd witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const Eigen::VectorXd& witness() const { return witness_; }

 private:
  Eigen::VectorXd witness_;
};

struct CompileOptions {
  std::optional<int> sweeps;  // nullopt: merge everything into one partition
  bool reduce = true;
  int greedy_permutations = 0;
  std::uint64_t seed = 0;
};

struct StageLog {
  std::string stage;
  std::size_t regions = 0;
  int partitions = 0;
  double ms = 0.0;
};

struct CompileLog {
  std::vector<StageLog> stages;

  double ms(const std::string& stage) const {
    for (const auto& s : stages) {
      if (s.stage == stage) return s.ms;
    }
    return 0.0;
  }

  std::string text() const {
    std::ostringstream out;
    for (const auto& s : stages) {
      char line[160];
      std::snprintf(line, sizeof line, "%-8s regions=%zu partitions=%d time_ms=%.3f\n", s.stage.c_str(), s.regions,
                    s.partitions, s.ms);
      out << line;
    }
    return out.str();
  }
};

namespace detail {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Throws InputError when two regions of one declared partition overlap.
inline void check_partitions_disjoint(const PwqSolution& s) {
  std::vector<std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>> boxes(s.regions.size());
  for (std::size_t i = 0; i < s.regions.size(); ++i) boxes[i] = coordinate_bounds(s.regions[i], s.n);
  const double feas = tolerances().feas;
  for (std::size_t i = 0; i < s.regions.size(); ++i) {
    for (std::size_t j = i + 1; j < s.regions.size(); ++j) {
      if (s.partition[i] != s.partition[j] || !boxes[i] || !boxes[j]) continue;
      if (detail::boxes_disjoint(*boxes[i], *boxes[j], feas)) continue;
      if (overlaps(s.regions[i], s.regions[j])) {
        throw InputError("regions[" + std::to_string(i) + "] and regions[" + std::to_string(j) +
                         "] overlap but share partition " + std::to_string(s.partition[i]));
      }
    }
  }
}

/// Reduce, lift, merge (fully or `sweeps` pairwise rounds), then one tree per partition.
inline CompiledEvaluator compile(const PwqSolution& input, const CompileOptions& opt, CompileLog* log = nullptr) {
  input.validate();
  CompileLog local;
  CompileLog& lg = log != nullptr ? *log : local;
  lg.stages.clear();
  lg.stages.push_back({"input", input.regions.size(), input.partition.count(), 0.0});

  detail::Stopwatch validate_clock;
  check_partitions_disjoint(input);
  lg.stages.push_back({"validate", input.regions.size(), input.partition.count(), validate_clock.ms()});

  std::vector<std::size_t> kept(input.regions.size());
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = i;
  PwqSolution reduced;
  if (opt.reduce) {
    detail::Stopwatch clock;
    reduced = reduce(input, &kept);
    lg.stages.push_back({"reduce", reduced.regions.size(), reduced.partition.count(), clock.ms()});
  } else {
    reduced = input;
  }

  detail::Stopwatch lift_clock;
  MergedSolution lifted = MergedSolution::from_lifted(lift_solution(reduced));
  for (auto& p : lifted.provenance) p = kept[p];
  lg.stages.push_back({"lift", lifted.regions.size(), lifted.partition.count(), lift_clock.ms()});

  detail::Stopwatch merge_clock;
  MergedSolution merged;
  if (!opt.sweeps) {
    merged = merge(lifted);
  } else if (opt.greedy_permutations > 0) {
    merged = merge_pairwise_greedy(lifted, *opt.sweeps, opt.greedy_permutations, opt.seed);
  } else {
    merged = lifted;
    for (int sweep = 1; sweep <= *opt.sweeps; ++sweep) {
      detail::Stopwatch sweep_clock;
      merged = merge_pairwise(merged, 1);
      lg.stages.push_back({"sweep" + std::to_string(sweep), merged.regions.size(), merged.partition.count(),
                           sweep_clock.ms()});
    }
  }
  if (merged.regions.empty()) throw NumericalError("merging produced no full-dimensional regions");
  lg.stages.push_back({"merge", merged.regions.size(), merged.partition.count(), merge_clock.ms()});

  detail::Stopwatch tree_clock;
  CompiledEvaluator e = multi_tree(merged);
  e.control_laws = input.control_laws;
  lg.stages.push_back({"tree", e.regions.size(), static_cast<int>(e.n_t()), tree_clock.ms()});
  return e;
}

// ---------------------------------------------------------------------------
// Benchmarking

struct BenchConfig {
  std::vector<std::optional<int>> sweeps{0, std::nullopt};  // nullopt = full merge
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  bool reduce = true;
  int greedy_permutations = 0;
  double value_tolerance = 1e-8;
};

struct BenchRow {
  std::string n_m;  // sweep count or "full"
  std::size_t n_t = 0;
  std::size_t n_p = 0;
  long n_store = 0;
  std::vector<int> depths;
  long predicted_worst_ops = 0;
  long measured_max_ops = 0;
  double measured_mean_ops = 0.0;
  double merge_ms = 0.0;  // informational, kept out of the deterministic report files
  double tree_ms = 0.0;
};

struct BenchReport {
  Eigen::Index n = 0;
  int n_part = 0;
  std::size_t input_regions = 0;
  std::size_t queries = 0;
  std::uint64_t seed = 0;
  std::vector<BenchRow> rows;

  static constexpr const char* kCsvHeader =
      "# liftmerge-bench v1\n"
      "n_m,n_t,n_p,n_store,depths,predicted_worst_ops,measured_max_ops,measured_mean_ops\n";

  std::string csv() const {
    std::ostringstream out;
    out << kCsvHeader;
    for (const auto& r : rows) {
      std::string depths;
      for (std::size_t i = 0; i < r.depths.size(); ++i) depths += (i ? ";" : "") + std::to_string(r.depths[i]);
      char mean[64];
      std::snprintf(mean, sizeof mean, "%.4f", r.measured_mean_ops);
      out << r.n_m << ',' << r.n_t << ',' << r.n_p << ',' << r.n_store << ',' << depths << ','
          << r.predicted_worst_ops << ',' << r.measured_max_ops << ',' << mean << '\n';
    }
    return out.str();
  }

  nlohmann::json json() const {
    nlohmann::json doc;
    doc["format"] = "liftmerge-bench";
    doc["version"] = 1;
    doc["n"] = n;
    doc["n_part"] = n_part;
    doc["input_regions"] = input_regions;
    doc["queries"] = queries;
    doc["seed"] = seed;
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      char mean[64];
      std::snprintf(mean, sizeof mean, "%.4f", r.measured_mean_ops);
      doc["rows"].push_back({{"n_m", r.n_m},
                             {"n_t", r.n_t},
                             {"n_p", r.n_p},
                             {"n_store", r.n_store},
                             {"depths", r.depths},
                             {"predicted_worst_ops", r.predicted_worst_ops},
                             {"measured_max_ops", r.measured_max_ops},
                             {"measured_mean_ops", std::stod(mean)}});
    }
    return doc;
  }

  std::string timing_csv() const {
    std::ostringstream out;
    out << "n_m,merge_ms,tree_ms\n";
    for (const auto& r : rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%s,%.3f,%.3f\n", r.n_m.c_str(), r.merge_ms, r.tree_ms);
      out << line;
    }
    return out.str();
  }
};

/// Per-dimension interval hull of all regions of a solution.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const PwqSolution& s) {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(s.n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& p : s.regions) {
    const auto b = coordinate_bounds(p, s.n);
    if (!b) continue;
    lo = lo.cwiseMin(b->first);
    hi = hi.cwiseMax(b->second);
  }
  if (!lo.allFinite() || !hi.allFinite()) throw InputError("solution domain is unbounded; cannot sample queries");
  return {lo, hi};
}

/// Uniform samples from the bounding box, rejected unless some region covers them.
inline std::vector<Eigen::VectorXd> sample_covered_points(const PwqSolution& s, std::size_t count,
                                                          std::uint64_t seed) {
  const auto [lo, hi] = bounding_box(s);
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  const std::size_t max_draws = 1000 * count + 1000;
  for (std::size_t draw = 0; out.size() < count; ++draw) {
    if (draw >= max_draws) throw InputError("could not sample covered query points (domain too sparse)");
    Eigen::VectorXd x(s.n);
    for (Eigen::Index d = 0; d < s.n; ++d) x(d) = uniform(rng, lo(d), hi(d));
    if (evaluate_sequential(s, x)) out.push_back(std::move(x));
  }
  return out;
}

inline std::string sweep_label(const std::optional<int>& sweeps) {
  return sweeps ? std::to_string(*sweeps) : std::string("full");
}

/// Compiles once per sweep setting and replays the same oracle-checked query set.
inline BenchReport bench(const PwqSolution& s, const BenchConfig& cfg,
                         std::vector<CompiledEvaluator>* evaluators = nullptr) {
  s.validate();
  BenchReport report;
  report.n = s.n;
  report.n_part = s.partition.count();
  report.input_regions = s.regions.size();
  report.queries = cfg.queries;
  report.seed = cfg.seed;

  const auto points = sample_covered_points(s, cfg.queries, cfg.seed);
  std::vector<double> expected;
  expected.reserve(points.size());
  for (const auto& x : points) expected.push_back(evaluate_sequential(s, x)->value);

  for (const auto& sweeps : cfg.sweeps) {
    CompileLog log;
    CompileOptions opt{sweeps, cfg.reduce, cfg.greedy_permutations, cfg.seed};
    CompiledEvaluator e = compile(s, opt, &log);

    BenchRow row;
    row.n_m = sweep_label(sweeps);
    row.n_t = e.n_t();
    row.n_p = e.regions.size();
    row.n_store = storage_count(e);
    for (const auto& t : e.trees) row.depths.push_back(t.depth);
    row.predicted_worst_ops = predict_ops(e).worst_case;
    row.merge_ms = log.ms("merge");
    row.tree_ms = log.ms("tree");

    long total = 0;
    for (std::size_t q = 0; q < points.size(); ++q) {
      const auto ev = evaluate(e, points[q]);
      if (!ev.covered || std::abs(ev.value - expected[q]) > cfg.value_tolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "n_m=" << row.n_m << ": evaluator returned "
            << (ev.covered ? std::to_string(ev.value) : std::string("not covered")) << ", oracle " << expected[q]
            << " at x = [" << points[q].transpose() << "]";
        throw OracleMismatch(msg.str(), points[q]);
      }
      row.measured_max_ops = std::max(row.measured_max_ops, ev.ops);
      total += ev.ops;
    }
    row.measured_mean_ops = points.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(points.size());
    report.rows.push_back(std::move(row));
    if (evaluators != nullptr) evaluators->push_back(std::move(e));
  }
  return report;
}

}  // namespace liftmerge
