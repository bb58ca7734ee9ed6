#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace liftmerge;
using testing_helpers::interval;
using testing_helpers::mat;
using testing_helpers::vec;

namespace {

Hyperplane plane(std::initializer_list<double> a, double b) { return {vec(a), b}; }

MergedSolution merged_example() { return merge(MergedSolution::from_lifted(lift_solution(example_1d()))); }

// Depth of the deepest leaf, found by walking the node table.
int walk_depth(const SearchTree& t, int node = 0) {
  const auto& nd = t.nodes[static_cast<std::size_t>(node)];
  if (nd.leaf()) return 0;
  return 1 + std::max(walk_depth(t, nd.low), walk_depth(t, nd.high));
}

}  // namespace

TEST(Classify, IntervalCases) {
  EXPECT_EQ(classify(interval(0, 1), plane({1}, 2)), Side::Low);
  EXPECT_EQ(classify(interval(0, 1), plane({1}, 0.5)), Side::Both);
  EXPECT_EQ(classify(interval(0, 1), plane({1}, 0)), Side::High);
  EXPECT_EQ(classify(interval(0, 1), plane({1}, 1)), Side::Low);
}

TEST(Classify, UnboundedRegion) {
  const Polyhedron half(mat({{1, 0}}), vec({0}));
  EXPECT_EQ(classify(half, plane({1, 0}, 1)), Side::Low);
  EXPECT_EQ(classify(half, plane({0, 1}, 0)), Side::Both);
}

TEST(BuildTree, SingleRegionIsLeaf) {
  const auto t = build_tree({interval(0, 1)});
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_TRUE(t.nodes[0].leaf());
  EXPECT_EQ(t.depth, 0);
  EXPECT_EQ(t.nodes[0].candidates, (std::vector<std::size_t>{0}));
}

TEST(BuildTree, TwoIntervalsSplitAtSharedFacet) {
  const auto t = build_tree({interval(0, 1), interval(1, 2)});
  EXPECT_EQ(t.depth, 1);
  ASSERT_EQ(t.nodes.size(), 3u);
  const auto& root = t.nodes[0];
  ASSERT_FALSE(root.leaf());
  const auto& h = t.planes[static_cast<std::size_t>(root.plane)];
  EXPECT_NEAR(h.b / h.a(0), 1.0, 1e-12);
  EXPECT_EQ(t.nodes[static_cast<std::size_t>(root.low)].candidates, (std::vector<std::size_t>{0}));
  EXPECT_EQ(t.nodes[static_cast<std::size_t>(root.high)].candidates, (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.n_h(), 3u);
}

TEST(BuildTree, MergedExampleDepthBound) {
  const auto m = merged_example();
  const auto t = build_tree(m.regions);
  EXPECT_EQ(t.depth, walk_depth(t));
  EXPECT_LE(static_cast<std::size_t>(t.depth), t.n_h());
  const int bound = static_cast<int>(std::ceil(std::log2(static_cast<double>(m.regions.size())))) + 1;
  EXPECT_LE(t.depth, bound);
  // Every region appears in some leaf.
  std::vector<bool> seen(m.regions.size(), false);
  for (const auto& node : t.nodes) {
    for (auto c : node.candidates) seen[c] = true;
    if (node.leaf()) {
      EXPECT_EQ(node.candidates.size(), node.residual_rows.size());
    }
  }
  for (bool s : seen) EXPECT_TRUE(s);
}

TEST(EvaluateTree, MergedExample) {
  const auto m = merged_example();
  const auto t = build_tree(m.regions);
  const OpCountModel model{1, 2};
  const auto r = evaluate_tree(t, vec({0.5, 0.25}), m.regions, model);
  ASSERT_TRUE(r.region);
  EXPECT_EQ(m.functions[*r.region].D, vec({0, 2}));
  EXPECT_EQ(m.functions[*r.region].E, 0.0);
  EXPECT_DOUBLE_EQ(m.functions[*r.region](vec({0.5, 0.25})), 0.5);
  EXPECT_GT(r.ops, 0);
  EXPECT_FALSE(evaluate_tree(t, vec({4, 16}), m.regions, model).region);
}

TEST(EvaluateTree, SingleLeafFindsItsRegion) {
  const PolyhedralSet ps{interval(0, 1)};
  const auto t = build_tree(ps);
  const auto r = evaluate_tree(t, vec({0.3}), ps, OpCountModel{1, 1});
  ASSERT_TRUE(r.region);
  EXPECT_EQ(*r.region, 0u);
  EXPECT_EQ(r.ops, 4);  // two residual rows, support 1 each
}

TEST(EvaluateTree, AgreesWithLinearScanOnRandomPartitions) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    GeneratorSpec spec;
    spec.n = 2;
    spec.n_part = 2;
    spec.grid = 3;
    spec.shift = 0.5;
    spec.seed = seed;
    const auto m = merge(MergedSolution::from_lifted(lift_solution(generate(spec))));
    const auto t = build_tree(m.regions);
    const OpCountModel model{2, 5};
    const long worst = worst_case_tree_ops(t, m.regions, model);
    for (int k = 0; k < 2000; ++k) {
      const Eigen::VectorXd y = lift_point(testing_helpers::sample_box(rng, vec({-1.1, -1.1}), vec({1.1, 1.1})));
      const auto got = evaluate_tree(t, y, m.regions, model);
      EXPECT_LE(got.ops, worst);
      const auto containing = index_set(m.regions, y);
      if (containing.empty()) {
        EXPECT_FALSE(got.region);
      } else {
        ASSERT_TRUE(got.region) << y.transpose();
        EXPECT_TRUE(m.regions[*got.region].contains(y, 1e-9));
      }
    }
  }
}

TEST(OpCountModel, Costs) {
  const OpCountModel model{3, 9};
  EXPECT_EQ(model.lift_cost(), 6);
  EXPECT_EQ(model.function_eval_cost(), 10);
  EXPECT_EQ(model.node_cost(4), 5);
  EXPECT_EQ(model.compare_cost(), 1);
}
