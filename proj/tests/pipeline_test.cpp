#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "helpers.hpp"

using namespace liftmerge;
using testing_helpers::interval;
using testing_helpers::vec;

TEST(Compile, ExampleFullMergeGivesOneTree) {
  CompileLog log;
  const auto e = compile(example_1d(), {std::nullopt, true, 0, 0}, &log);
  EXPECT_EQ(e.n_t(), 1u);
  for (double x : {-2.5, -1.5, 0.0, 1.5, 2.5}) {
    const double want = std::abs(x) <= 2 ? std::min(x * x + 1, 2 * x * x) : 2 * x * x;
    const auto r = evaluate(e, vec({x}));
    ASSERT_TRUE(r.covered);
    EXPECT_NEAR(r.value, want, 1e-12);
  }
  const auto tie = evaluate(e, vec({1.0}));
  EXPECT_DOUBLE_EQ(tie.value, 2.0);
  EXPECT_EQ(evaluate(e, vec({1.0})).region, tie.region);

  std::vector<std::string> stages;
  for (const auto& s : log.stages) stages.push_back(s.stage);
  EXPECT_EQ(stages, (std::vector<std::string>{"input", "validate", "reduce", "lift", "merge", "tree"}));
  EXPECT_NE(log.text().find("merge    regions="), std::string::npos);
}

TEST(Compile, ZeroSweepsKeepsPartitions) {
  GeneratorSpec spec;
  spec.n = 2;
  spec.n_part = 4;
  spec.grid = 2;
  const auto s = generate(spec);
  EXPECT_EQ(compile(s, {0, true, 0, 0}).n_t(), 4u);
  CompileLog log;
  EXPECT_EQ(compile(s, {1, true, 0, 0}, &log).n_t(), 2u);
  EXPECT_EQ(log.stages.back().partitions, 2);
  EXPECT_EQ(compile(s, {2, false, 0, 0}, &log).n_t(), 1u);
  // Per-sweep log entries halve the partition count.
  std::vector<int> parts;
  for (const auto& st : log.stages) {
    if (st.stage.rfind("sweep", 0) == 0) parts.push_back(st.partitions);
  }
  EXPECT_EQ(parts, (std::vector<int>{2, 1}));
}

TEST(Compile, ReduceCountsNeverGrow) {
  GeneratorSpec spec;
  spec.n = 2;
  spec.n_part = 4;
  spec.grid = 2;
  spec.shift = 0.0;
  spec.offset = 3.0;
  spec.curvature = 0.2;
  CompileLog log;
  compile(generate(spec), {0, true, 0, 0}, &log);
  EXPECT_LE(log.stages[2].regions, log.stages[1].regions);
}

TEST(Compile, OverlapInsidePartitionIsInputError) {
  PwqSolution s;
  s.n = 1;
  s.regions = {interval(0, 2), interval(1, 3)};
  s.functions = {QuadraticFunction(Eigen::MatrixXd::Ones(1, 1), vec({0}), 0),
                 QuadraticFunction(Eigen::MatrixXd::Ones(1, 1), vec({0}), 1)};
  s.partition = PartitionIndex({1, 1});
  EXPECT_THROW(compile(s, {}), InputError);
  s.regions[1] = interval(2, 3);  // touching is fine
  EXPECT_NO_THROW(compile(s, {}));
}

TEST(Bench, ReportRowsAndDeterminism) {
  GeneratorSpec spec;
  spec.n = 2;
  spec.n_part = 2;
  spec.grid = 3;
  spec.shift = 0.0;
  const auto s = generate(spec);
  BenchConfig cfg;
  cfg.sweeps = {0, 1, std::nullopt};
  cfg.queries = 500;
  cfg.seed = 4;
  const auto a = bench(s, cfg);
  const auto b = bench(s, cfg);
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.json().dump(), b.json().dump());
  ASSERT_EQ(a.rows.size(), 3u);
  EXPECT_EQ(a.rows[0].n_m, "0");
  EXPECT_EQ(a.rows[0].n_t, 2u);
  EXPECT_EQ(a.rows[2].n_m, "full");
  EXPECT_EQ(a.rows[2].n_t, 1u);
  for (const auto& r : a.rows) {
    EXPECT_LE(r.measured_max_ops, r.predicted_worst_ops);
    EXPECT_LE(r.measured_mean_ops, static_cast<double>(r.measured_max_ops));
    EXPECT_EQ(r.depths.size(), r.n_t);
  }
  EXPECT_LT(a.rows[2].measured_max_ops, a.rows[0].measured_max_ops);
  EXPECT_EQ(a.csv().rfind(BenchReport::kCsvHeader, 0), 0u);
}

TEST(Bench, MismatchReportsWitness) {
  BenchConfig cfg;
  cfg.queries = 10;
  cfg.value_tolerance = -1.0;  // nothing can match
  try {
    bench(example_1d(), cfg);
    FAIL() << "expected OracleMismatch";
  } catch (const OracleMismatch& e) {
    EXPECT_EQ(e.witness().size(), 1);
    EXPECT_LE(std::abs(e.witness()(0)), 3.0);
  }
}

TEST(Bench, SamplesOnlyCoveredPoints) {
  const auto pts = sample_covered_points(example_1d(), 200, 1);
  ASSERT_EQ(pts.size(), 200u);
  for (const auto& x : pts) EXPECT_LE(std::abs(x(0)), 3.0);
  PwqSolution open;
  open.n = 1;
  open.regions = {Polyhedron(Eigen::MatrixXd::Ones(1, 1), vec({0}))};
  open.functions = {QuadraticFunction(Eigen::MatrixXd::Ones(1, 1), vec({0}), 0)};
  open.partition = PartitionIndex({1});
  EXPECT_THROW(sample_covered_points(open, 10, 1), InputError);
}

TEST(Tolerances, OverridesApply) {
  const Tolerances saved = tolerances();
  set_tolerances({1e-6, 1e-5, 1e-4});
  EXPECT_EQ(tolerances().feas, 1e-6);
  set_tolerances(saved);
  EXPECT_EQ(tolerances().feas, saved.feas);
}

TEST(Tolerances, EnvironmentValuesParsed) {
  ::setenv("LIFTMERGE_TEST_TOLERANCE", "2.5e-7", 1);
  EXPECT_EQ(detail::env_or("LIFTMERGE_TEST_TOLERANCE", 1.0), 2.5e-7);
  ::setenv("LIFTMERGE_TEST_TOLERANCE", "abc", 1);
  EXPECT_THROW(detail::env_or("LIFTMERGE_TEST_TOLERANCE", 1.0), InputError);
  ::setenv("LIFTMERGE_TEST_TOLERANCE", "-1", 1);
  EXPECT_THROW(detail::env_or("LIFTMERGE_TEST_TOLERANCE", 1.0), InputError);
  ::unsetenv("LIFTMERGE_TEST_TOLERANCE");
  EXPECT_EQ(detail::env_or("LIFTMERGE_TEST_TOLERANCE", 1.0), 1.0);
}
