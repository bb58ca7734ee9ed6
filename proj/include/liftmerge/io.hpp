#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "liftmerge/evaluator.hpp"
#include "liftmerge/merge.hpp"
#include "liftmerge/solution.hpp"

// Solution interchange file:
//   { "n": int,
//     "regions":   [ {"H": [[..],..], "K": [..]} ],
//     "functions": [ {"A": [[..],..], "B": [..], "C": num} ],   // "A" may be omitted (affine)
//     "partition": [ 1-based ints ],
//     "control_laws": [ {"F": [[..],..], "g": [..]} ]          // optional
//   }
// Matrices are row-major lists of rows.

namespace liftmerge::io {

using nlohmann::json;

namespace detail {

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + ": expected a number");
  return v.get<double>();
}

inline Eigen::VectorXd vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

inline Eigen::MatrixXd matrix(const json& v, Eigen::Index cols, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), cols);
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::string at = where + "[" + std::to_string(r) + "]";
    const Eigen::VectorXd row = vector(v[r], at);
    if (row.size() != cols) {
      throw InputError(at + ": expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    }
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

inline json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return out;
}

inline std::vector<int> int_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) throw InputError(where + "[" + std::to_string(i) + "]: expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i) line += text[i] == '\n' ? 1 : 0;
    throw InputError(source + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

inline json region_json(const Polyhedron& p) {
  json r{{"H", to_json(p.H())}, {"K", to_json(p.K())}};
  if (p.is_empty_marker()) r["empty"] = true;
  return r;
}

inline json control_laws_json(const std::vector<ControlLaw>& laws) {
  json out = json::array();
  for (const auto& law : laws) out.push_back({{"F", to_json(law.F)}, {"g", to_json(law.g)}});
  return out;
}

inline std::vector<ControlLaw> parse_control_laws(const json& v, Eigen::Index n) {
  if (!v.is_array()) throw InputError("control_laws: expected an array");
  std::vector<ControlLaw> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string where = "control_laws[" + std::to_string(i) + "]";
    ControlLaw law;
    law.F = matrix(field(v[i], "F", where), n, where + ".F");
    law.g = vector(field(v[i], "g", where), where + ".g");
    if (law.g.size() != law.F.rows()) throw InputError(where + ": g length must equal the row count of F");
    out.push_back(std::move(law));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Solutions

inline PwqSolution solution_from_json(const json& doc) {
  using namespace detail;
  PwqSolution s;
  const json& nj = field(doc, "n", "solution");
  if (!nj.is_number_integer() || nj.get<long>() < 1) throw InputError("solution.n: expected a positive integer");
  s.n = nj.get<Eigen::Index>();

  const json& regions = field(doc, "regions", "solution");
  if (!regions.is_array()) throw InputError("regions: expected an array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    const Eigen::MatrixXd h = matrix(field(regions[i], "H", where), s.n, where + ".H");
    const Eigen::VectorXd k = vector(field(regions[i], "K", where), where + ".K");
    if (k.size() != h.rows()) throw InputError(where + ": K length must equal the row count of H");
    s.regions.emplace_back(h, k);
  }

  const json& functions = field(doc, "functions", "solution");
  if (!functions.is_array()) throw InputError("functions: expected an array");
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::string where = "functions[" + std::to_string(i) + "]";
    const auto& f = functions[i];
    const Eigen::MatrixXd a = f.contains("A") ? matrix(f["A"], s.n, where + ".A") : Eigen::MatrixXd::Zero(s.n, s.n);
    if (a.rows() != s.n) throw InputError(where + ".A: expected " + std::to_string(s.n) + " rows");
    const Eigen::VectorXd b = vector(field(f, "B", where), where + ".B");
    if (b.size() != s.n) throw InputError(where + ".B: expected " + std::to_string(s.n) + " entries");
    const double c = number(field(f, "C", where), where + ".C");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + a.cwiseAbs().maxCoeff())) {
      throw InputError(where + ".A: matrix must be symmetric");
    }
    s.functions.emplace_back(a, b, c);
  }

  s.partition = PartitionIndex(int_list(field(doc, "partition", "solution"), "partition"));
  if (doc.contains("control_laws") && !doc["control_laws"].is_null()) {
    s.control_laws = parse_control_laws(doc["control_laws"], s.n);
  }
  s.validate();
  return s;
}

inline json solution_to_json(const PwqSolution& s) {
  using namespace detail;
  json doc;
  doc["n"] = s.n;
  doc["regions"] = json::array();
  for (const auto& p : s.regions) doc["regions"].push_back({{"H", to_json(p.H())}, {"K", to_json(p.K())}});
  doc["functions"] = json::array();
  for (const auto& f : s.functions) {
    doc["functions"].push_back({{"A", to_json(f.A)}, {"B", to_json(f.B)}, {"C", f.C}});
  }
  doc["partition"] = s.partition.values();
  if (s.control_laws) doc["control_laws"] = control_laws_json(*s.control_laws);
  return doc;
}

inline PwqSolution load_solution(const std::string& path) {
  return solution_from_json(detail::parse_text(detail::read_file(path), path));
}

inline void save_solution(const PwqSolution& s, const std::string& path) {
  detail::write_file(path, solution_to_json(s).dump(1) + "\n");
}

/// Merged (lifted, affine) solution in the same schema: n is the lifted
/// dimension and every function is written as {"B": D, "C": E}.
inline json merged_to_json(const MergedSolution& s) {
  using namespace detail;
  json doc;
  doc["n"] = s.l;
  doc["lifted_from"] = s.n;
  doc["regions"] = json::array();
  for (const auto& p : s.regions) doc["regions"].push_back({{"H", to_json(p.H())}, {"K", to_json(p.K())}});
  doc["functions"] = json::array();
  for (const auto& f : s.functions) doc["functions"].push_back({{"B", to_json(f.D)}, {"C", f.E}});
  doc["partition"] = s.partition.values();
  doc["provenance"] = s.provenance;
  return doc;
}

// ---------------------------------------------------------------------------
// Compiled evaluators

inline constexpr int kEvaluatorVersion = 1;

inline json evaluator_to_json(const CompiledEvaluator& e) {
  using namespace detail;
  json doc;
  doc["format"] = "liftmerge-evaluator";
  doc["version"] = kEvaluatorVersion;
  doc["n"] = e.n;
  doc["l"] = e.l;
  doc["op_model"] = {{"node", "support+1"},
                     {"function_eval", e.op_model.function_eval_cost()},
                     {"compare", e.op_model.compare_cost()},
                     {"lift", e.op_model.lift_cost()}};
  doc["regions"] = json::array();
  for (const auto& p : e.regions) doc["regions"].push_back(region_json(p));
  doc["functions"] = json::array();
  for (const auto& f : e.functions) doc["functions"].push_back({{"D", to_json(f.D)}, {"E", f.E}});
  doc["partition"] = e.partition.values();
  doc["provenance"] = e.provenance;
  if (e.control_laws) doc["control_laws"] = control_laws_json(*e.control_laws);
  doc["trees"] = json::array();
  for (const auto& t : e.trees) {
    json tj;
    tj["depth"] = t.depth;
    tj["planes"] = json::array();
    for (const auto& h : t.planes) tj["planes"].push_back({{"a", to_json(h.a)}, {"b", h.b}});
    tj["nodes"] = json::array();
    for (const auto& node : t.nodes) {
      if (node.leaf()) {
        json residual = json::array();
        for (const auto& rows : node.residual_rows) residual.push_back(rows);
        tj["nodes"].push_back({{"candidates", node.candidates}, {"residual_rows", residual}});
      } else {
        tj["nodes"].push_back({{"plane", node.plane}, {"low", node.low}, {"high", node.high}});
      }
    }
    doc["trees"].push_back(std::move(tj));
  }
  return doc;
}

inline CompiledEvaluator evaluator_from_json(const json& doc) {
  using namespace detail;
  if (!doc.is_object() || doc.value("format", "") != "liftmerge-evaluator") {
    throw InputError("not a liftmerge evaluator file");
  }
  if (doc.value("version", 0) != kEvaluatorVersion) {
    throw InputError("unsupported evaluator version " + std::to_string(doc.value("version", 0)));
  }
  CompiledEvaluator e;
  e.n = field(doc, "n", "evaluator").get<Eigen::Index>();
  e.l = field(doc, "l", "evaluator").get<Eigen::Index>();
  if (e.n < 1 || e.l != lifted_dim(e.n)) throw InputError("evaluator: inconsistent n and l");
  e.op_model = {e.n, e.l};

  const json& regions = field(doc, "regions", "evaluator");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    if (regions[i].value("empty", false)) {
      e.regions.push_back(Polyhedron::empty(e.l));
      continue;
    }
    Eigen::MatrixXd h = matrix(field(regions[i], "H", where), e.l, where + ".H");
    Eigen::VectorXd k = vector(field(regions[i], "K", where), where + ".K");
    e.regions.push_back(Polyhedron::from_normalized(std::move(h), std::move(k)));
  }
  const json& functions = field(doc, "functions", "evaluator");
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::string where = "functions[" + std::to_string(i) + "]";
    AffineFunction f{vector(field(functions[i], "D", where), where + ".D"),
                     number(field(functions[i], "E", where), where + ".E")};
    if (f.D.size() != e.l) throw InputError(where + ".D: wrong length");
    e.functions.push_back(std::move(f));
  }
  e.partition = PartitionIndex(int_list(field(doc, "partition", "evaluator"), "partition"));
  for (int v : int_list(field(doc, "provenance", "evaluator"), "provenance")) {
    if (v < 0) throw InputError("provenance: negative index");
    e.provenance.push_back(static_cast<std::size_t>(v));
  }
  if (doc.contains("control_laws")) e.control_laws = parse_control_laws(doc["control_laws"], e.n);
  if (e.functions.size() != e.regions.size() || e.partition.size() != e.regions.size() ||
      e.provenance.size() != e.regions.size()) {
    throw InputError("evaluator: regions, functions, partition and provenance differ in length");
  }

  const json& trees = field(doc, "trees", "evaluator");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const std::string where = "trees[" + std::to_string(t) + "]";
    SearchTree tree;
    tree.depth = field(trees[t], "depth", where).get<int>();
    for (const auto& h : field(trees[t], "planes", where)) {
      tree.planes.push_back({vector(field(h, "a", where + ".planes"), where + ".planes.a"),
                             number(field(h, "b", where + ".planes"), where + ".planes.b")});
    }
    const json& nodes = field(trees[t], "nodes", where);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string at = where + ".nodes[" + std::to_string(i) + "]";
      SearchTree::Node node;
      if (nodes[i].contains("plane")) {
        node.plane = nodes[i]["plane"].get<int>();
        node.low = field(nodes[i], "low", at).get<int>();
        node.high = field(nodes[i], "high", at).get<int>();
        const auto count = static_cast<int>(nodes.size());
        if (node.plane < 0 || node.plane >= static_cast<int>(tree.planes.size()) || node.low <= 0 ||
            node.high <= 0 || node.low >= count || node.high >= count) {
          throw InputError(at + ": child or plane reference out of range");
        }
      } else {
        for (const auto& c : field(nodes[i], "candidates", at)) {
          const auto idx = c.get<std::size_t>();
          if (idx >= e.regions.size()) throw InputError(at + ": candidate out of range");
          node.candidates.push_back(idx);
        }
        for (const auto& rows : field(nodes[i], "residual_rows", at)) {
          node.residual_rows.push_back(rows.get<std::vector<Eigen::Index>>());
        }
        if (node.residual_rows.size() != node.candidates.size()) {
          throw InputError(at + ": residual_rows must match candidates");
        }
        for (std::size_t c = 0; c < node.candidates.size(); ++c) {
          for (auto r : node.residual_rows[c]) {
            if (r < 0 || r >= e.regions[node.candidates[c]].rows()) throw InputError(at + ": residual row out of range");
          }
        }
      }
      tree.nodes.push_back(std::move(node));
    }
    if (tree.nodes.empty()) throw InputError(where + ": tree has no nodes");
    e.trees.push_back(std::move(tree));
  }
  if (static_cast<int>(e.trees.size()) != e.partition.count()) {
    throw InputError("evaluator: tree count must equal the partition count");
  }
  return e;
}

inline CompiledEvaluator load_evaluator(const std::string& path) {
  return evaluator_from_json(detail::parse_text(detail::read_file(path), path));
}

inline void save_evaluator(const CompiledEvaluator& e, const std::string& path) {
  detail::write_file(path, evaluator_to_json(e).dump() + "\n");
}

}  // namespace liftmerge::io
