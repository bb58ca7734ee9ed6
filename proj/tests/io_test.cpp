#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "helpers.hpp"

using namespace liftmerge;
using nlohmann::json;
using testing_helpers::vec;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("liftmerge_io_test_" + name);
}

}  // namespace

TEST(SolutionJson, RoundTrip) {
  auto s = example_1d();
  s.control_laws = std::vector<ControlLaw>{{Eigen::MatrixXd::Ones(1, 1), vec({0})}, {Eigen::MatrixXd::Ones(1, 1), vec({1})}};
  const auto t = io::solution_from_json(io::solution_to_json(s));
  ASSERT_EQ(t.regions.size(), 2u);
  EXPECT_EQ(t.regions[1].H(), s.regions[1].H());
  EXPECT_EQ(t.regions[1].K(), s.regions[1].K());
  EXPECT_EQ(t.functions[0].A, s.functions[0].A);
  EXPECT_EQ(t.partition.values(), s.partition.values());
  ASSERT_TRUE(t.control_laws);
  EXPECT_EQ((*t.control_laws)[1].g, vec({1}));
}

TEST(SolutionJson, AffineFunctionsMayOmitA) {
  const auto doc = json::parse(R"({"n":1,"regions":[{"H":[[1],[-1]],"K":[1,1]}],
                                   "functions":[{"B":[2],"C":3}],"partition":[1]})");
  const auto s = io::solution_from_json(doc);
  EXPECT_EQ(s.functions[0].A(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s.functions[0](vec({1.0})), 5.0);
}

TEST(SolutionJson, ErrorsNameTheField) {
  auto doc = io::solution_to_json(example_1d());
  doc["regions"][1]["H"][0] = json::array({1, 2});
  EXPECT_NE(error_of([&] { io::solution_from_json(doc); }).find("regions[1].H[0]"), std::string::npos);

  doc = io::solution_to_json(example_1d());
  doc["functions"][0].erase("C");
  EXPECT_NE(error_of([&] { io::solution_from_json(doc); }).find("functions[0]: missing field 'C'"), std::string::npos);

  doc = io::solution_to_json(example_1d());
  doc["partition"] = json::array({1, 3});
  EXPECT_FALSE(error_of([&] { io::solution_from_json(doc); }).empty());
}

TEST(SolutionJson, AsymmetricMatrixRejected) {
  const auto doc = json::parse(R"({"n":2,"regions":[{"H":[[1,0]],"K":[1]}],
      "functions":[{"A":[[1,2],[0,1]],"B":[0,0],"C":0}],"partition":[1]})");
  EXPECT_NE(error_of([&] { io::solution_from_json(doc); }).find("symmetric"), std::string::npos);
}

TEST(SolutionJson, SyntaxErrorReportsLine) {
  const std::string text = "{\n  \"n\": 1,\n  \"regions\": [,\n}";
  EXPECT_NE(error_of([&] { io::detail::parse_text(text, "in.json"); }).find("in.json:3:"), std::string::npos);
}

TEST(EvaluatorJson, FileRoundTripEvaluatesBitIdentically) {
  GeneratorSpec spec;
  spec.n = 2;
  spec.n_part = 4;
  spec.grid = 2;
  spec.shift = 0.5;
  auto s = generate(spec);
  s.control_laws.emplace();
  for (std::size_t i = 0; i < s.regions.size(); ++i) {
    s.control_laws->push_back({Eigen::MatrixXd::Identity(2, 2) * static_cast<double>(i), vec({0.1, 0.2})});
  }
  for (auto sweeps : {std::optional<int>(0), std::optional<int>(1), std::optional<int>()}) {
    const auto e = compile(s, {sweeps, true, 0, 0});
    const auto path = temp_file("evaluator.json");
    io::save_evaluator(e, path.string());
    const auto f = io::load_evaluator(path.string());
    std::filesystem::remove(path);
    ASSERT_EQ(f.n_t(), e.n_t());
    ASSERT_TRUE(f.control_laws);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 2000; ++k) {
      const Eigen::VectorXd x = testing_helpers::sample_box(rng, vec({-1.2, -1.2}), vec({1.2, 1.2}));
      const auto a = evaluate(e, x);
      const auto b = evaluate(f, x);
      ASSERT_EQ(a.covered, b.covered);
      EXPECT_EQ(a.value, b.value);
      EXPECT_EQ(a.region, b.region);
      EXPECT_EQ(a.ops, b.ops);
      if (a.covered) {
        EXPECT_EQ(*control_action(e, a, x), *control_action(f, b, x));
      }
    }
    EXPECT_EQ(io::evaluator_to_json(e).dump(), io::evaluator_to_json(f).dump());
  }
}

TEST(EvaluatorJson, RejectsCorruptReferences) {
  const auto e = compile(example_1d(), {std::nullopt, true, 0, 0});
  auto doc = io::evaluator_to_json(e);
  doc["version"] = 99;
  EXPECT_THROW(io::evaluator_from_json(doc), InputError);

  doc = io::evaluator_to_json(e);
  doc["trees"][0]["nodes"][0]["low"] = 1000;
  EXPECT_THROW(io::evaluator_from_json(doc), InputError);

  doc = io::evaluator_to_json(e);
  doc["format"] = "something-else";
  EXPECT_THROW(io::evaluator_from_json(doc), InputError);
}

TEST(MergedJson, WritesLiftedSchema) {
  const auto m = merge(MergedSolution::from_lifted(lift_solution(example_1d())));
  const auto doc = io::merged_to_json(m);
  EXPECT_EQ(doc["n"], 2);
  EXPECT_EQ(doc["lifted_from"], 1);
  EXPECT_EQ(doc["regions"].size(), m.regions.size());
  // Readable back as an affine solution in the lifted space.
  const auto back = io::solution_from_json(doc);
  EXPECT_EQ(back.n, 2);
  EXPECT_EQ(back.functions.size(), m.functions.size());
}
