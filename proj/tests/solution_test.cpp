#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace liftmerge;
using testing_helpers::interval;
using testing_helpers::mat;
using testing_helpers::vec;

TEST(LiftPoint, ExpansionOrder) {
  EXPECT_EQ(lift_point(vec({2})), vec({2, 4}));
  EXPECT_EQ(lift_point(vec({1, 2})), vec({1, 2, 1, 2, 4}));
  EXPECT_EQ(lift_point(vec({1, 0, -1})), vec({1, 0, -1, 1, 0, -1, 0, 0, 1}));
}

TEST(LiftedDim, Formula) {
  EXPECT_EQ(lifted_dim(1), 2);
  EXPECT_EQ(lifted_dim(2), 5);
  EXPECT_EQ(lifted_dim(5), 20);
}

TEST(LiftRegions, PadsWithZeroColumns) {
  const auto lifted = lift_regions({interval(-2, 2)});
  ASSERT_EQ(lifted.size(), 1u);
  EXPECT_EQ(lifted[0].dim(), 2);
  EXPECT_EQ(lifted[0].H(), mat({{-1, 0}, {1, 0}}));
  EXPECT_EQ(lifted[0].K(), vec({2, 2}));
}

TEST(LiftRegions, WholeSpaceStaysWholeSpace) {
  const auto lifted = lift_regions({Polyhedron::universe(3)});
  EXPECT_EQ(lifted[0].dim(), 9);
  EXPECT_EQ(lifted[0].rows(), 0);
}

TEST(LiftFunction, OneDimensional) {
  const auto f = lift_function(QuadraticFunction(mat({{1}}), vec({0}), 1));
  EXPECT_EQ(f.D, vec({0, 1}));
  EXPECT_EQ(f.E, 1.0);
  const auto g = lift_function(QuadraticFunction(mat({{2}}), vec({0}), 0));
  EXPECT_EQ(g.D, vec({0, 2}));
  EXPECT_EQ(g.E, 0.0);
}

TEST(LiftFunction, CrossTermsDoubled) {
  const auto f = lift_function(QuadraticFunction(mat({{1, 2}, {2, 3}}), vec({4, 5}), 6));
  EXPECT_EQ(f.D, vec({4, 5, 1, 4, 3}));
  EXPECT_EQ(f.E, 6.0);
}

TEST(QuadraticFunction, AsymmetricInputIsSymmetrized) {
  const QuadraticFunction f(mat({{1, 4}, {0, 3}}), vec({0, 0}), 0);
  EXPECT_EQ(f.A, mat({{1, 2}, {2, 3}}));
}

TEST(LiftSolution, ExampleDimensions) {
  const auto lifted = lift_solution(example_1d());
  EXPECT_EQ(lifted.l, 2);
  EXPECT_EQ(lifted.regions.size(), 2u);
  EXPECT_EQ(lifted.functions[0].D, vec({0, 1}));
  EXPECT_EQ(lifted.functions[1].D, vec({0, 2}));
  EXPECT_EQ(lifted.partition.values(), (std::vector<int>{1, 2}));

  GeneratorSpec spec;
  spec.n = 2;
  EXPECT_EQ(lift_solution(generate(spec)).l, 5);
  spec.n = 5;
  spec.grid = 1;
  EXPECT_EQ(lift_solution(generate(spec)).l, 20);
}

TEST(EvaluateSequential, ExamplePoints) {
  const auto s = example_1d();
  auto r = evaluate_sequential(s, vec({0.5}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->index, 1u);
  EXPECT_DOUBLE_EQ(r->value, 0.5);
  r = evaluate_sequential(s, vec({1.5}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->index, 0u);
  EXPECT_DOUBLE_EQ(r->value, 3.25);
  r = evaluate_sequential(s, vec({2.5}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->index, 1u);
  EXPECT_DOUBLE_EQ(r->value, 12.5);
  EXPECT_FALSE(evaluate_sequential(s, vec({4.0})));
}

TEST(EvaluateSequential, TieGoesToLowerIndex) {
  const auto r = evaluate_sequential(example_1d(), vec({1.0}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->index, 0u);
  EXPECT_DOUBLE_EQ(r->value, 2.0);
}

TEST(EvaluateSequential, RejectsWrongDimension) {
  EXPECT_THROW(evaluate_sequential(example_1d(), vec({1.0, 2.0})), InputError);
}

// Index sets and values agree between x and L(x) on random instances.
TEST(LiftingProperties, IndexSetAndValuePreserved) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 4; ++n) {
    GeneratorSpec spec;
    spec.n = n;
    spec.n_part = 3;
    spec.grid = 2;
    spec.seed = static_cast<std::uint64_t>(n);
    const auto s = generate(spec);
    const auto lifted = lift_solution(s);
    for (int k = 0; k < 200; ++k) {
      const Eigen::VectorXd x = testing_helpers::sample_box(rng, Eigen::VectorXd::Constant(n, -1.2),
                                                            Eigen::VectorXd::Constant(n, 1.2));
      const Eigen::VectorXd y = lift_point(x);
      EXPECT_EQ(index_set(s.regions, x), index_set(lifted.regions, y));
      for (std::size_t i = 0; i < s.functions.size(); ++i) {
        const double a = s.functions[i](x), b = lifted.functions[i](y);
        EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
      }
      const auto ra = evaluate_sequential(s, x);
      const auto rb = evaluate_sequential(lifted, y);
      ASSERT_EQ(ra.has_value(), rb.has_value());
      if (ra) {
        EXPECT_EQ(ra->index, rb->index);
        EXPECT_NEAR(ra->value, rb->value, 1e-12 * std::max(1.0, std::abs(ra->value)));
      }
    }
  }
}

TEST(PartitionIndex, RejectsGapsAndNonPositive) {
  EXPECT_THROW(PartitionIndex({1, 3}), InputError);
  EXPECT_THROW(PartitionIndex({0, 1}), InputError);
  const PartitionIndex p({2, 1, 2});
  EXPECT_EQ(p.count(), 2);
  EXPECT_EQ(p.members(2), (std::vector<std::size_t>{0, 2}));
}

TEST(PwqSolution, ValidateChecksShapes) {
  auto s = example_1d();
  EXPECT_NO_THROW(s.validate());
  s.partition = PartitionIndex({1});
  EXPECT_THROW(s.validate(), InputError);
}

TEST(Generator, CountsAndDeterminism) {
  GeneratorSpec spec;
  spec.n = 1;
  spec.n_part = 2;
  spec.grid = 2;
  const auto s = generate(spec);
  EXPECT_EQ(s.regions.size(), 4u);
  EXPECT_EQ(s.partition.count(), 2);
  const auto t = generate(spec);
  for (std::size_t i = 0; i < s.regions.size(); ++i) {
    EXPECT_EQ(s.regions[i].H(), t.regions[i].H());
    EXPECT_EQ(s.regions[i].K(), t.regions[i].K());
    EXPECT_EQ(s.functions[i].A, t.functions[i].A);
    EXPECT_EQ(s.functions[i].B, t.functions[i].B);
    EXPECT_EQ(s.functions[i].C, t.functions[i].C);
  }
  spec.seed = 2;
  EXPECT_NE(generate(spec).functions[0].C, s.functions[0].C);
}

TEST(Generator, PartitionsAreDisjointAndCover) {
  GeneratorSpec spec;
  spec.n = 2;
  spec.n_part = 3;
  spec.grid = 3;
  spec.shift = 0.5;
  const auto s = generate(spec);
  EXPECT_NO_THROW(check_partitions_disjoint(s));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    const Eigen::VectorXd x = testing_helpers::sample_box(rng, vec({-1, -1}), vec({1, 1}));
    std::vector<int> hits(3, 0);
    for (std::size_t i = 0; i < s.regions.size(); ++i) {
      if (s.regions[i].contains(x, 1e-12)) ++hits[static_cast<std::size_t>(s.partition[i] - 1)];
    }
    for (int h : hits) EXPECT_GE(h, 1);
  }
}

TEST(Generator, RejectsBadSpecs) {
  GeneratorSpec spec;
  spec.shift = 1.0;
  EXPECT_THROW(generate(spec), InputError);
  spec.shift = 0.0;
  spec.grid = 0;
  EXPECT_THROW(generate(spec), InputError);
}

TEST(Example1d, Data) {
  const auto s = example_1d();
  ASSERT_EQ(s.regions.size(), 2u);
  EXPECT_EQ(s.functions[0].A(0, 0), 1.0);
  EXPECT_EQ(s.functions[1].A(0, 0), 2.0);
  EXPECT_EQ(s.functions[0].B(0), 0.0);
  EXPECT_EQ(s.functions[1].B(0), 0.0);
  EXPECT_EQ(s.functions[0].C, 1.0);
  EXPECT_EQ(s.functions[1].C, 0.0);
  const auto a = coordinate_bounds(s.regions[0], 1);
  EXPECT_NEAR(a->first(0), -2, 1e-12);
  EXPECT_NEAR(a->second(0), 2, 1e-12);
  const auto b = coordinate_bounds(s.regions[1], 1);
  EXPECT_NEAR(b->first(0), -3, 1e-12);
  EXPECT_NEAR(b->second(0), 3, 1e-12);
}
