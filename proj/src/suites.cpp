#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "relcheck/verifier.hpp"

namespace relcheck {

const char* to_string(System s) {
  return s == System::SimpleRel ? "simplerel" : "simplerelftl";
}

std::size_t EntryReport::count(Truth t) const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [&](const CaseResult& c) { return c.truth == t; }));
}

std::map<const Formula*, Entity> instantiate_universals(const Formula& f, const Assignment& a) {
  std::map<const Formula*, Entity> out;
  const Formula* node = &f;
  while (node->kind == Kind::Forall) {
    auto it = a.find(node->var);
    if (it == a.end()) break;
    out.emplace(node, it->second);
    node = node->lhs.get();
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Bindings to_bindings(const Assignment& a) {
  Bindings b;
  for (auto& [n, e] : a) b.push_back(Binding{n, e});
  return b;
}

bool in_system(const CorpusEntry& e, const std::string& sys) {
  return std::find(e.systems.begin(), e.systems.end(), sys) != e.systems.end();
}

bool selected(const std::string& name, const std::vector<std::string>& only) {
  return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
}

Report make_report(const std::string& suite, const std::string& system, ModelKind model,
                   const Corpus* corpus, const Budget& budget, std::size_t cases) {
  Report r;
  r.suite = suite;
  r.system = system;
  r.model = to_string(model);
  r.corpus_version = corpus ? corpus->version : "";
  r.budget = budget;
  r.cases = cases;
  return r;
}

CaseResult run_case(const CorpusEntry& e, ModelKind model, const Budget& budget,
                    const DefinitionTable& defs, std::size_t index) {
  CaseResult c;
  c.index = index;
  Rng rng(case_seed(budget.seed, e.name, index));
  Assignment a;
  try {
    a = generate_instance(e.name, model, budget, rng);
  } catch (const GenerationError& err) {
    c.reason = err.what();
    return c;
  }
  Budget b = budget;
  b.seed = rng.next() | 1;
  EvalContext ctx;
  ctx.entry = e.name;
  ctx.instantiated = instantiate_universals(*e.formula, a);
  Verdict v = evaluate_bounded(e.formula, model, {}, b, &defs, ctx);
  c.truth = v.truth;
  c.reason = v.reason;
  if (v.truth == Truth::False && !v.bindings.empty())
    c.bindings = v.bindings;
  else if (v.truth != Truth::True)
    c.bindings = to_bindings(a);
  return c;
}

Report run_entries(const std::string& suite, const Corpus& corpus,
                   const std::vector<CorpusEntry>& entries, const std::string& sys,
                   ModelKind model, const Budget& budget, std::size_t cases,
                   const std::vector<std::string>& only) {
  validate_budget(budget);
  auto t0 = Clock::now();
  Report r = make_report(suite, sys, model, &corpus, budget, cases);
  for (auto& e : entries) {
    if (!in_system(e, sys) || !selected(e.name, only)) continue;
    EntryReport er;
    er.name = e.name;
    for (std::size_t i = 0; i < cases; ++i) er.cases.push_back(run_case(e, model, budget, corpus.defs, i));
    r.entries.push_back(std::move(er));
  }
  r.wall_seconds = seconds_since(t0);
  return r;
}

std::vector<const Entity*> arg_ptrs(const Definition& d, const Assignment& a) {
  std::vector<const Entity*> out;
  for (auto& p : d.params) out.push_back(&a.at(p));
  return out;
}

Assignment map_all(const PoincareMap& t, const Assignment& a) {
  Assignment out;
  for (auto& [n, e] : a) {
    if (const Observer* o = std::get_if<Observer>(&e))
      out.emplace(n, Observer{apply_poincare(t, o->line)});
    else {
      const Signal& s = std::get<Signal>(e);
      out.emplace(n, Signal{apply_poincare(t, s.beg), apply_poincare(t, s.end)});
    }
  }
  return out;
}

// 1 true, 0 false, -1 evaluator undefined.
int geometric(const std::string& pred, const Definition& d, const Assignment& a) {
  try {
    return evaluate_registered(pred, arg_ptrs(d, a)) ? 1 : 0;
  } catch (const Unsupported&) {
    return -1;
  } catch (const ScalarError&) {
    return -1;
  }
}

nlohmann::ordered_json vec_json(const Vec4& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (int i = 0; i < 4; ++i) a.push_back(render_scalar(v(i)));
  return a;
}

// Bindings in the scenario file format, so a case can be replayed with eval.
nlohmann::ordered_json replay_json(const Bindings& b, const std::string& model) {
  nlohmann::ordered_json j;
  j["kind"] = model;
  j["observers"] = nlohmann::ordered_json::object();
  j["signals"] = nlohmann::ordered_json::object();
  for (auto& x : b) {
    if (const Observer* o = std::get_if<Observer>(&x.value))
      j["observers"][x.name] = {{"base", vec_json(o->line.base)}, {"dir", vec_json(o->line.dir)}};
    else {
      const Signal& s = std::get<Signal>(x.value);
      j["signals"][x.name] = {{"beg", vec_json(s.beg)}, {"end", vec_json(s.end)}};
    }
  }
  return j;
}

char verdict_char(Truth t) { return t == Truth::True ? 'T' : t == Truth::False ? 'F' : 'U'; }

}  // namespace

Report run_axiom_suite(const Corpus& corpus, System system, ModelKind model, const Budget& budget,
                       std::size_t cases, const std::vector<std::string>& only) {
  return run_entries("axioms", corpus, corpus.axioms, to_string(system), model, budget, cases,
                     only);
}

Report run_lemma_suite(const Corpus& corpus, ModelKind model, const Budget& budget,
                       std::size_t cases, const std::vector<std::string>& only) {
  const std::string sys = model == ModelKind::Ftl ? "simplerelftl" : "simplerel";
  return run_entries("lemmas", corpus, corpus.lemmas, sys, model, budget, cases, only);
}

Report check_definitional_equivalence(const Corpus& corpus, const std::vector<std::string>& preds,
                                      ModelKind model, const Budget& budget, std::size_t cases) {
  validate_budget(budget);
  auto t0 = Clock::now();
  Report r = make_report("definitions", "", model, &corpus, budget, cases);
  for (auto& pred : preds) {
    const Definition& d = corpus.defs.at(pred);
    FormulaPtr full = expand_defined(mk_defined(pred, d.params), corpus.defs, kExpandAll);
    EntryReport er;
    er.name = pred;
    for (std::size_t i = 0; i < cases; ++i) {
      CaseResult c;
      c.index = i;
      Rng rng(case_seed(budget.seed, "def:" + pred, i));
      Assignment a;
      try {
        a = generate_arguments(pred, d, model, budget, rng);
      } catch (const GenerationError& e) {
        c.reason = e.what();
        er.cases.push_back(c);
        continue;
      }
      const int geo = geometric(pred, d, a);
      Budget b = budget;
      b.seed = rng.next() | 1;
      EvalContext ctx;
      ctx.entry = "def:" + pred;
      ctx.structural_root = true;
      Verdict v = evaluate_bounded(full, model, a, b, &corpus.defs, ctx);
      if (geo < 0) {
        c.reason = "geometric evaluator undefined for these arguments";
      } else if (v.truth == Truth::Unknown) {
        c.reason = v.reason;
      } else if ((v.truth == Truth::True) == (geo == 1)) {
        c.truth = Truth::True;
      } else {
        c.truth = Truth::False;
        c.reason = std::string("geometric ") + (geo ? "true" : "false") + ", definition " +
                   to_string(v.truth);
      }
      if (c.truth != Truth::True) {
        c.bindings = to_bindings(a);
        for (auto& w : v.bindings) c.bindings.push_back(w);
      }
      er.cases.push_back(std::move(c));
    }
    r.entries.push_back(std::move(er));
  }
  r.wall_seconds = seconds_since(t0);
  return r;
}

Report invariance_suite(const Corpus& corpus, ModelKind model, const Budget& budget,
                        std::size_t maps) {
  validate_budget(budget);
  auto t0 = Clock::now();
  Report r = make_report("invariance", "", model, &corpus, budget, maps);
  for (auto& pred : registered_predicates()) {
    const Definition& d = corpus.defs.at(pred);
    EntryReport er;
    er.name = pred;
    for (std::size_t i = 0; i < maps; ++i) {
      CaseResult c;
      c.index = i;
      Rng rng(case_seed(budget.seed, "iso:" + pred, i));
      Assignment a = generate_arguments(pred, d, model, budget, rng);
      PoincareMap t = random_isometry(rng, static_cast<long>(budget.coordinate_bound));
      if (!validate_isometry(t)) {
        c.truth = Truth::False;
        c.reason = "generated map is not an isometry";
      } else {
        Assignment b = map_all(t, a);
        const int before = geometric(pred, d, a), after = geometric(pred, d, b);
        c.truth = before == after ? Truth::True : Truth::False;
        if (c.truth == Truth::False) {
          c.reason = "verdict changed under isometry";
          c.bindings = to_bindings(a);
        }
      }
      er.cases.push_back(std::move(c));
    }
    r.entries.push_back(std::move(er));
  }
  r.wall_seconds = seconds_since(t0);
  return r;
}

Report iso_control_suite(const Corpus& corpus, const Budget& budget, std::size_t observers) {
  validate_budget(budget);
  auto t0 = Clock::now();
  Report r = make_report("iso-control", "simplerel", ModelKind::Ftl, &corpus, budget, observers);
  const CorpusEntry* ax = corpus.find("AxIso");
  EntryReport events{"zero-and-two-signal events", {}}, iso{"AxIso", {}};
  for (std::size_t i = 0; i < observers; ++i) {
    Rng rng(case_seed(budget.seed, "iso-control", i));
    Observer a = std::get<Observer>(
        generate_configuration("spacelike observer", ModelKind::Ftl, budget, rng).at("a"));
    CaseResult ce, ci;
    ce.index = ci.index = i;
    auto cx = iso_counterexample(a);
    if (!cx) {
      ce.reason = "no certified events";
    } else {
      auto count = [&](const Signal& e) {
        std::size_t n = 0;
        for (auto& x : null_targets_on(a.line, e.beg))
          if (!vec_equal(x, e.beg)) ++n;
        return n;
      };
      const bool ok = count(cx->no_signal) == 0 && count(cx->two_signals) == 2;
      ce.truth = ok ? Truth::True : Truth::False;
      if (!ok) ce.reason = "event signal counts do not match";
      ce.bindings = {{"a", a}, {"zero", cx->no_signal}, {"two", cx->two_signals}};
      if (ax) {
        Assignment inst{{"a", a}, {"be", cx->no_signal}};
        EvalContext ctx;
        ctx.entry = "AxIso";
        ctx.instantiated = instantiate_universals(*ax->formula, inst);
        Verdict v = evaluate_bounded(ax->formula, ModelKind::Ftl, {}, budget, &corpus.defs, ctx);
        ci.truth = v.truth;
        ci.reason = v.reason;
        ci.bindings = v.bindings.empty() ? to_bindings(inst) : v.bindings;
      }
    }
    events.cases.push_back(std::move(ce));
    iso.cases.push_back(std::move(ci));
  }
  r.entries.push_back(std::move(events));
  if (ax) r.entries.push_back(std::move(iso));
  r.wall_seconds = seconds_since(t0);
  return r;
}

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["system"] = r.system;
  j["model"] = r.model;
  j["corpus_version"] = r.corpus_version;
  j["seed"] = std::to_string(r.budget.seed);
  j["budget"] = {{"max_witness_candidates", r.budget.max_witness_candidates},
                 {"max_sample_points", r.budget.max_sample_points},
                 {"coordinate_bound", r.budget.coordinate_bound},
                 {"seed", std::to_string(r.budget.seed)}};
  j["cases_per_entry"] = r.cases;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  std::size_t pass = 0, fail = 0, unknown = 0;
  for (auto& e : r.entries) {
    nlohmann::ordered_json je;
    je["name"] = e.name;
    je["pass"] = e.count(Truth::True);
    je["fail"] = e.count(Truth::False);
    je["unknown"] = e.count(Truth::Unknown);
    pass += e.count(Truth::True);
    fail += e.count(Truth::False);
    unknown += e.count(Truth::Unknown);
    std::string verdicts;
    for (auto& c : e.cases) verdicts += verdict_char(c.truth);
    je["verdicts"] = verdicts;
    nlohmann::ordered_json cases = nlohmann::ordered_json::array();
    for (auto& c : e.cases) {
      if (c.truth == Truth::True) continue;
      nlohmann::ordered_json jc;
      jc["index"] = c.index;
      jc["verdict"] = to_string(c.truth);
      jc["reason"] = c.reason;
      jc["replay"] = replay_json(c.bindings, r.model);
      cases.push_back(std::move(jc));
    }
    je["cases"] = std::move(cases);
    entries.push_back(std::move(je));
  }
  j["totals"] = {{"pass", pass}, {"fail", fail}, {"unknown", unknown}};
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

std::string summary_table(const Report& r) {
  std::size_t w = 5;
  for (auto& e : r.entries) w = std::max(w, e.name.size());
  std::ostringstream os;
  auto row = [&](const std::string& a, const std::string& p, const std::string& f,
                 const std::string& u) {
    os << std::left << std::setw(static_cast<int>(w)) << a << "  " << std::right << std::setw(6)
       << p << "  " << std::setw(6) << f << "  " << std::setw(7) << u << "\n";
  };
  row("axiom", "pass", "fail", "unknown");
  std::size_t tp = 0, tf = 0, tu = 0;
  for (auto& e : r.entries) {
    const std::size_t p = e.count(Truth::True), f = e.count(Truth::False),
                      u = e.count(Truth::Unknown);
    tp += p;
    tf += f;
    tu += u;
    row(e.name, std::to_string(p), std::to_string(f), std::to_string(u));
  }
  row("total", std::to_string(tp), std::to_string(tf), std::to_string(tu));
  return os.str();
}

}  // namespace relcheck
