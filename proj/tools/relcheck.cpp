#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "relcheck/frontend.hpp"

using namespace relcheck;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kUnknown = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_bindings(const Bindings& bs) {
  for (const auto& b : bs) std::cout << "  " << b.name << " = " << render_entity(b.value) << "\n";
}

int cmd_parse(const Corpus& corpus, const std::string& path, int expand) {
  FormulaPtr f;
  if (const CorpusEntry* e = corpus.find(path)) {
    f = e->formula;
  } else if (corpus.defs.contains(path)) {
    f = corpus.defs.at(path).body;
  } else {
    ParseOptions opts;
    opts.defs = &corpus.defs;
    f = parse_formula(read_file(path), opts);
  }
  if (expand > 0) {
    std::cout << render_formula(expand_defined(f, corpus.defs, expand)) << "\n";
  } else {
    std::cout << dump_ast(*f);
  }
  return kPass;
}

int cmd_eval(const Corpus& corpus, const std::string& scenario, const std::string& query,
             const Budget& budget) {
  Scenario s = load_scenario_file(scenario);
  QueryResult r = evaluate_query(s, query, corpus, budget);
  std::cout << to_string(r.verdict.truth) << "\n";
  print_bindings(r.verdict.bindings);
  if (!r.verdict.reason.empty()) std::cout << "reason: " << r.verdict.reason << "\n";
  switch (r.verdict.truth) {
    case Truth::True: return kPass;
    case Truth::False: return kFail;
    case Truth::Unknown: return kUnknown;
  }
  return kUnknown;
}

int cmd_verify(const Corpus& corpus, const std::string& system, const std::string& model,
               const std::string& suite, std::size_t cases, const Budget& budget,
               const std::string& report_path, const std::vector<std::string>& only) {
  const ModelKind mk = model == "ftl" ? ModelKind::Ftl : ModelKind::StlOnly;
  Report r;
  if (suite == "lemmas") {
    r = run_lemma_suite(corpus, mk, budget, cases, only);
  } else {
    const System sys = system == "simplerelftl" ? System::SimpleRelFtl : System::SimpleRel;
    r = run_axiom_suite(corpus, sys, mk, budget, cases, only);
  }
  std::cout << summary_table(r);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write " + report_path);
    out << report_json(r);
  }
  std::size_t fails = 0, unknowns = 0;
  for (const auto& e : r.entries) {
    fails += e.count(Truth::False);
    unknowns += e.count(Truth::Unknown);
  }
  if (fails > 0) {
    for (const auto& e : r.entries)
      for (const auto& c : e.cases) {
        if (c.truth != Truth::False) continue;
        std::cout << "counterexample " << e.name << " #" << c.index << "\n";
        print_bindings(c.bindings);
        break;
      }
    return kFail;
  }
  return unknowns > 0 ? kUnknown : kPass;
}

int cmd_diagram(const std::string& scenario, const std::string& plane, const std::string& out) {
  const int axis = parse_plane(plane);
  Scenario s = load_scenario_file(scenario);
  const std::string svg = render_diagram(s, axis);
  if (out.empty() || out == "-") {
    std::cout << svg;
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << svg;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact model checking of relativity axioms in Minkowski spacetime"};
  app.require_subcommand(1);
  std::string corpus_dir;
  app.add_option("--corpus", corpus_dir, "Corpus directory (default: RELCHECK_CORPUS or built-in)");

  Budget budget;
  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--seed", budget.seed, "Random seed")->capture_default_str();
    sub->add_option("--max-witnesses", budget.max_witness_candidates,
                    "Witness candidates per quantifier")
        ->capture_default_str();
    sub->add_option("--max-samples", budget.max_sample_points, "Sample points per quantifier")
        ->capture_default_str();
    sub->add_option("--bound", budget.coordinate_bound, "Coordinate magnitude bound")
        ->capture_default_str();
  };

  auto* parse = app.add_subcommand("parse", "Print the syntax tree or an expansion of a formula");
  std::string parse_path;
  int expand = 0;
  parse->add_option("file", parse_path, "Formula file or corpus entry name")->required();
  parse->add_option("--expand", expand, "Expand defined predicates N levels deep");

  auto* eval = app.add_subcommand("eval", "Evaluate a formula over a scenario");
  std::string eval_scenario, eval_query;
  eval->add_option("scenario", eval_scenario, "Scenario JSON file")->required();
  eval->add_option("query", eval_query, "Formula; unknown free variables are existential")
      ->required();
  add_budget(eval);

  auto* verify = app.add_subcommand("verify", "Run an axiom or lemma suite");
  std::string system = "simplerel", model = "stl", suite = "axioms", report;
  std::size_t cases = 500;
  std::vector<std::string> only;
  verify->add_option("--system", system, "simplerel or simplerelftl")
      ->check(CLI::IsMember({"simplerel", "simplerelftl"}))
      ->capture_default_str();
  verify->add_option("--model", model, "stl or ftl")
      ->check(CLI::IsMember({"stl", "ftl"}))
      ->capture_default_str();
  verify->add_option("--suite", suite, "axioms or lemmas")
      ->check(CLI::IsMember({"axioms", "lemmas"}))
      ->capture_default_str();
  verify->add_option("--cases", cases, "Cases per entry")->capture_default_str();
  verify->add_option("--report", report, "Write the JSON report here");
  verify->add_option("--only", only, "Restrict to these entries");
  add_budget(verify);

  auto* diagram = app.add_subcommand("diagram", "Write a Minkowski diagram as SVG");
  std::string diagram_scenario, plane = "t-x1", out;
  diagram->add_option("scenario", diagram_scenario, "Scenario JSON file")->required();
  diagram->add_option("--plane", plane, "t-x1, t-x2 or t-x3")->capture_default_str();
  diagram->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*diagram) return cmd_diagram(diagram_scenario, plane, out);
    validate_budget(budget);
    Corpus corpus = load_corpus(corpus_dir.empty() ? default_corpus_dir() : corpus_dir);
    if (*parse) return cmd_parse(corpus, parse_path, expand);
    if (*eval) return cmd_eval(corpus, eval_scenario, eval_query, budget);
    if (*verify) return cmd_verify(corpus, system, model, suite, cases, budget, report, only);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
