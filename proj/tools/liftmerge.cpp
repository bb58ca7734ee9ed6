// Command-line front end: compile, eval, bench, gen, example-1d.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "liftmerge.hpp"

namespace lm = liftmerge;

namespace {

enum ExitCode { kOk = 0, kInput = 2, kNotCovered = 3, kNumerical = 4, kOracle = 5 };

std::optional<int> parse_nm(const std::string& text) {
  if (text == "full") return std::nullopt;
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 0) throw lm::InputError("n_m must be a nonnegative integer or 'full', got '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
  }
  return out;
}

Eigen::VectorXd parse_point(const std::string& text) {
  const auto items = split(text, ',');
  Eigen::VectorXd x(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::size_t used = 0;
    try {
      x(static_cast<Eigen::Index>(i)) = std::stod(items[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (items[i].empty() || used != items[i].size()) {
      throw lm::InputError("malformed point component " + std::to_string(i + 1) + ": '" + items[i] + "'");
    }
  }
  return x;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v(i));
    out += (i ? ", " : "") + std::string(buf);
  }
  return out + "]";
}

std::string strip_suffix(const std::string& path, const std::string& suffix) {
  if (path.size() > suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

lm::GeneratorSpec spec_from_json(const nlohmann::json& doc, lm::GeneratorSpec spec) {
  if (!doc.is_object()) throw lm::InputError("generator spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "n") spec.n = value.get<int>();
    else if (key == "n_part") spec.n_part = value.get<int>();
    else if (key == "grid") spec.grid = value.get<int>();
    else if (key == "seed") spec.seed = value.get<std::uint64_t>();
    else if (key == "shift") spec.shift = value.get<double>();
    else if (key == "curvature") spec.curvature = value.get<double>();
    else if (key == "linear") spec.linear = value.get<double>();
    else if (key == "offset") spec.offset = value.get<double>();
    else if (key == "half_width") spec.half_width = value.get<double>();
    else throw lm::InputError("generator spec: unknown field '" + key + "'");
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lift-and-merge evaluation of piecewise quadratic value functions"};
  app.require_subcommand(1);

  std::string in_path, out_path, nm_text = "full", point_text, nm_list = "0,full", spec_path;
  bool no_reduce = false;
  int greedy = 0;
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  lm::GeneratorSpec gen_spec;

  auto* compile_cmd = app.add_subcommand("compile", "Reduce, lift, merge and build search trees");
  compile_cmd->add_option("input", in_path, "Solution file")->required();
  compile_cmd->add_option("--nm", nm_text, "Pairwise merge sweeps, or 'full'")->capture_default_str();
  compile_cmd->add_flag("--no-reduce", no_reduce, "Skip the reduction stage");
  compile_cmd->add_option("--greedy-permutations", greedy, "Random partition pairings to try per merge");
  compile_cmd->add_option("--seed", seed, "Seed for the greedy pairing search");
  compile_cmd->add_option("-o,--output", out_path, "Evaluator file")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a compiled evaluator at one point");
  eval_cmd->add_option("evaluator", in_path, "Evaluator file")->required();
  eval_cmd->add_option("--point", point_text, "Comma-separated coordinates")->required()->allow_extra_args(false);

  auto* bench_cmd = app.add_subcommand("bench", "Oracle-checked operation counts over an n_m sweep");
  bench_cmd->add_option("input", in_path, "Solution file")->required();
  bench_cmd->add_option("--nm-list", nm_list, "Comma-separated sweep counts and/or 'full'")->capture_default_str();
  bench_cmd->add_option("--queries", queries, "Number of covered query points")->capture_default_str();
  bench_cmd->add_option("--seed", seed, "Query sampling seed")->capture_default_str();
  bench_cmd->add_flag("--no-reduce", no_reduce, "Skip the reduction stage");
  bench_cmd->add_option("--greedy-permutations", greedy, "Random partition pairings to try per merge");
  bench_cmd->add_option("-o,--output", out_path, "Report path; writes <out>.csv, <out>.json, <out>.timing.csv")
      ->required();

  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic shifted-grid instance");
  gen_cmd->add_option("--spec", spec_path, "JSON generator spec (flags override its fields)");
  gen_cmd->add_option("--n", gen_spec.n, "Dimension");
  gen_cmd->add_option("--n-part", gen_spec.n_part, "Number of partitions");
  gen_cmd->add_option("--grid", gen_spec.grid, "Cells per axis");
  gen_cmd->add_option("--seed", gen_spec.seed, "Random seed");
  gen_cmd->add_option("--shift", gen_spec.shift, "Grid shift spread across partitions, in cell widths [0, 1)");
  gen_cmd->add_option("--curvature", gen_spec.curvature, "A entries in [-c, c]");
  gen_cmd->add_option("--linear", gen_spec.linear, "B entries in [-b, b]");
  gen_cmd->add_option("--offset", gen_spec.offset, "C in [-c, c]");
  gen_cmd->add_option("--half-width", gen_spec.half_width, "Box half width");
  gen_cmd->add_option("-o,--output", out_path, "Solution file")->required();

  auto* example_cmd = app.add_subcommand("example-1d", "Write the two-region one-dimensional instance");
  example_cmd->add_option("-o,--output", out_path, "Solution file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*compile_cmd) {
      const auto solution = lm::io::load_solution(in_path);
      lm::CompileLog log;
      const auto e = lm::compile(solution, {parse_nm(nm_text), !no_reduce, greedy, seed}, &log);
      lm::io::save_evaluator(e, out_path);
      const std::string text = log.text();
      lm::io::detail::write_file(out_path + ".log", text);
      std::cout << text << "n_t = " << e.n_t() << "\n";
    } else if (*eval_cmd) {
      const auto e = lm::io::load_evaluator(in_path);
      const Eigen::VectorXd x = parse_point(point_text);
      const auto ev = lm::evaluate(e, x);
      if (!ev.covered) {
        std::cout << "NotCovered\nops_used = " << ev.ops << "\n";
        return kNotCovered;
      }
      char value[40];
      std::snprintf(value, sizeof value, "%.17g", ev.value);
      std::cout << "i* = " << ev.partition << "\n"
                << "j* = " << ev.region << " (input region " << e.provenance[ev.region] << ")\n"
                << "J* = " << value << "\n";
      if (const auto u = lm::control_action(e, ev, x)) std::cout << "u = " << format_vector(*u) << "\n";
      std::cout << "ops_used = " << ev.ops << "\n";
    } else if (*bench_cmd) {
      const auto solution = lm::io::load_solution(in_path);
      lm::BenchConfig cfg;
      cfg.sweeps.clear();
      for (const auto& item : split(nm_list, ',')) cfg.sweeps.push_back(parse_nm(item));
      if (cfg.sweeps.empty()) throw lm::InputError("--nm-list is empty");
      cfg.queries = queries;
      cfg.seed = seed;
      cfg.reduce = !no_reduce;
      cfg.greedy_permutations = greedy;
      const auto report = lm::bench(solution, cfg);
      const std::string base = strip_suffix(strip_suffix(out_path, ".csv"), ".json");
      lm::io::detail::write_file(base + ".csv", report.csv());
      lm::io::detail::write_file(base + ".json", report.json().dump(2) + "\n");
      lm::io::detail::write_file(base + ".timing.csv", report.timing_csv());
      std::cout << report.csv();
    } else if (*gen_cmd) {
      lm::GeneratorSpec spec;
      if (!spec_path.empty()) {
        spec = spec_from_json(lm::io::detail::parse_text(lm::io::detail::read_file(spec_path), spec_path), spec);
      }
      // Flags given on the command line take precedence over the spec file.
      if (gen_cmd->count("--n")) spec.n = gen_spec.n;
      if (gen_cmd->count("--n-part")) spec.n_part = gen_spec.n_part;
      if (gen_cmd->count("--grid")) spec.grid = gen_spec.grid;
      if (gen_cmd->count("--seed")) spec.seed = gen_spec.seed;
      if (gen_cmd->count("--shift")) spec.shift = gen_spec.shift;
      if (gen_cmd->count("--curvature")) spec.curvature = gen_spec.curvature;
      if (gen_cmd->count("--linear")) spec.linear = gen_spec.linear;
      if (gen_cmd->count("--offset")) spec.offset = gen_spec.offset;
      if (gen_cmd->count("--half-width")) spec.half_width = gen_spec.half_width;
      lm::io::save_solution(lm::generate(spec), out_path);
    } else if (*example_cmd) {
      lm::io::save_solution(lm::example_1d(), out_path);
    }
  } catch (const lm::OracleMismatch& e) {
    std::cerr << "oracle mismatch: " << e.what() << "\nwitness: " << format_vector(e.witness()) << "\n";
    return kOracle;
  } catch (const lm::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const lm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
