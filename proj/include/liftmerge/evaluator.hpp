#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "liftmerge/merge.hpp"
#include "liftmerge/parallel.hpp"
#include "liftmerge/solution.hpp"
#include "liftmerge/tree.hpp"

namespace liftmerge {

/// Search trees (one per partition) plus everything needed to answer queries.
struct CompiledEvaluator {
  Eigen::Index n = 0;
  Eigen::Index l = 0;
  PolyhedralSet regions;  // lifted, dimension l
  std::vector<AffineFunction> functions;
  PartitionIndex partition;
  std::vector<std::size_t> provenance;  // index of the input region each region came from
  std::vector<SearchTree> trees;        // trees[k] covers partition value k + 1
  OpCountModel op_model;
  std::optional<std::vector<ControlLaw>> control_laws;  // indexed by provenance

  std::size_t n_t() const { return trees.size(); }
};

/// One tree per partition value, in index order.
inline CompiledEvaluator multi_tree(const MergedSolution& s) {
  s.validate();
  CompiledEvaluator out;
  out.n = s.n;
  out.l = s.l;
  out.regions = s.regions;
  out.functions = s.functions;
  out.partition = s.partition;
  out.provenance = s.provenance;
  out.op_model = {s.n, s.l};
  out.trees.resize(static_cast<std::size_t>(s.partition.count()));
  parallel_for(out.trees.size(), [&](std::size_t k) {
    out.trees[k] = build_tree(out.regions, s.partition.members(static_cast<int>(k) + 1));
  });
  return out;
}

struct Evaluation {
  bool covered = false;
  int partition = 0;       // 1-based partition value of the winner
  std::size_t region = 0;  // index into CompiledEvaluator::regions
  double value = 0.0;
  long ops = 0;
  std::vector<long> tree_ops;
  std::vector<std::optional<std::size_t>> tree_regions;
};

/// Lift once, locate in every tree, keep the smallest value (lowest partition on ties).
///
/// ops = lift + sum of tree ops + (function evaluation + comparison) for every
/// tree that located a region.
inline Evaluation evaluate(const CompiledEvaluator& e, const Eigen::VectorXd& x) {
  if (x.size() != e.n) {
    throw InputError("query point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(e.n));
  }
  if (!x.allFinite()) throw InputError("query point must be finite");
  Evaluation out;
  const Eigen::VectorXd y = lift_point(x);
  out.ops = e.op_model.lift_cost();
  out.tree_ops.reserve(e.trees.size());
  out.tree_regions.reserve(e.trees.size());
  for (std::size_t k = 0; k < e.trees.size(); ++k) {
    const auto found = evaluate_tree(e.trees[k], y, e.regions, e.op_model);
    out.ops += found.ops;
    out.tree_ops.push_back(found.ops);
    out.tree_regions.push_back(found.region);
    if (!found.region) continue;
    out.ops += e.op_model.function_eval_cost() + e.op_model.compare_cost();
    const double v = e.functions[*found.region](y);
    if (!out.covered || v < out.value) {
      out.covered = true;
      out.partition = static_cast<int>(k) + 1;
      out.region = *found.region;
      out.value = v;
    }
  }
  return out;
}

/// Control action of the winning region, when the evaluator carries control laws.
inline std::optional<Eigen::VectorXd> control_action(const CompiledEvaluator& e, const Evaluation& ev,
                                                     const Eigen::VectorXd& x) {
  if (!ev.covered || !e.control_laws) return std::nullopt;
  const auto& law = (*e.control_laws)[e.provenance[ev.region]];
  return Eigen::VectorXd(law.F * x + law.g);
}

struct OpsPrediction {
  long worst_case = 0;
  std::vector<long> per_tree;
  // Order-of-magnitude estimates: n_part * K1 * log2(m) without merging and
  // K2 * log2(|P|) for a single tree, with K1 = n + 1 and K2 = l + 1.
  double estimate_separate_trees = 0.0;
  double estimate_single_tree = 0.0;
};

inline OpsPrediction predict_ops(const CompiledEvaluator& e) {
  OpsPrediction out;
  out.worst_case = e.op_model.lift_cost();
  for (const auto& t : e.trees) {
    const long w = worst_case_tree_ops(t, e.regions, e.op_model);
    out.per_tree.push_back(w);
    out.worst_case += w + e.op_model.function_eval_cost() + e.op_model.compare_cost();
  }
  const double k1 = static_cast<double>(e.op_model.node_cost(static_cast<int>(e.n)));
  const double k2 = static_cast<double>(e.op_model.node_cost(static_cast<int>(e.l)));
  const double parts = static_cast<double>(e.trees.size());
  if (!e.regions.empty() && parts > 0) {
    const double m = static_cast<double>(e.regions.size()) / parts;
    out.estimate_separate_trees = parts * k1 * std::log2(std::max(m, 1.0));
    out.estimate_single_tree = k2 * std::log2(static_cast<double>(e.regions.size()));
  }
  return out;
}

/// Stored reals: per internal node the nonzero plane coefficients plus the
/// offset, per leaf candidate the residual rows (nonzeros plus offset), and
/// per region the nonzero function coefficients plus the constant.
inline long storage_count(const CompiledEvaluator& e) {
  long total = 0;
  for (const auto& t : e.trees) {
    for (const auto& node : t.nodes) {
      if (!node.leaf()) {
        total += t.planes[static_cast<std::size_t>(node.plane)].support() + 1;
        continue;
      }
      for (std::size_t c = 0; c < node.candidates.size(); ++c) {
        const auto& p = e.regions[node.candidates[c]];
        for (auto r : node.residual_rows[c]) total += row_support(p.H().row(r).transpose()) + 1;
      }
    }
  }
  for (const auto& f : e.functions) total += row_support(f.D) + 1;
  return total;
}

}  // namespace liftmerge
