// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relcheck/verifier.hpp"

using namespace relcheck;

namespace {

struct Tally {
  std::size_t pass = 0, fail = 0, unknown = 0;
  std::size_t total() const { return pass + fail + unknown; }
  double decided() const { return total() ? double(pass + fail) / double(total()) : 1.0; }
};

Tally tally(const EntryReport& e) {
  return {e.count(Truth::True), e.count(Truth::False), e.count(Truth::Unknown)};
}

Tally tally(const Report& r, const std::set<std::string>& skip = {}) {
  Tally t;
  for (const auto& e : r.entries) {
    if (skip.count(e.name)) continue;
    Tally x = tally(e);
    t.pass += x.pass;
    t.fail += x.fail;
    t.unknown += x.unknown;
  }
  return t;
}

std::string failing_entries(const Report& r, const std::set<std::string>& skip = {}) {
  std::string out;
  for (const auto& e : r.entries) {
    if (skip.count(e.name) || e.count(Truth::False) == 0) continue;
    out += (out.empty() ? "" : ", ") + e.name + " " + std::to_string(e.count(Truth::False)) +
           "/" + std::to_string(e.cases.size());
  }
  return out;
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string counts(const Tally& t) {
  std::ostringstream s;
  s << t.pass << " true, " << t.fail << " false, " << t.unknown << " unknown";
  return s.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * x);
  return buf;
}

// Criterion 1 and the determinism half of criterion 9 share this report.
std::string stl_axiom_json;

void axioms_stl(const Corpus& c) {
  Budget b;
  auto t0 = std::chrono::steady_clock::now();
  Report r = run_axiom_suite(c, System::SimpleRel, ModelKind::StlOnly, b, 500);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stl_axiom_json = report_json(r);
  Tally t = tally(r);
  bool rates = true;
  for (const auto& e : r.entries)
    if (tally(e).decided() < 0.95) rates = false;
  std::ostringstream d;
  d << r.entries.size() << " entries x 500 cases: " << counts(t) << "; min decided rate "
    << (rates ? ">= 95%" : "< 95%") << "; " << static_cast<int>(secs) << " s";
  report(1, t.fail == 0 && rates && secs < 300 && r.entries.size() >= 30, d.str());
}

void axioms_ftl(const Corpus& c) {
  Budget b;
  Report r = run_axiom_suite(c, System::SimpleRelFtl, ModelKind::Ftl, b, 500);
  Tally t = tally(r);
  std::string d = std::to_string(r.entries.size()) + " entries x 500 cases: " + counts(t);
  if (t.fail) d += "; false in " + failing_entries(r);
  report(2, t.fail == 0, d);
}

void iso_control(const Corpus& c) {
  Budget b;
  Report r = iso_control_suite(c, b, 100);
  bool events_ok = false, iso_false = false;
  for (const auto& e : r.entries) {
    if (e.name == "AxIso")
      iso_false = e.count(Truth::False) == e.cases.size() && e.cases.size() == 100;
    else
      events_ok = e.count(Truth::True) == e.cases.size() && e.cases.size() == 100;
  }
  report(3, events_ok && iso_false,
         std::string("100 spacelike observers: zero/two-signal events ") +
             (events_ok ? "found for all" : "missing") + ", plain AxIso " +
             (iso_false ? "false for all" : "not false for all"));
}

void all_stl(const Corpus& c) {
  FormulaPtr f = parse_formula("forall a:Ob. STL(a)", ParseOptions{&c.defs, {}});
  Budget b;
  Verdict s = evaluate_bounded(f, ModelKind::StlOnly, {}, b, &c.defs);
  Verdict t = evaluate_bounded(f, ModelKind::Ftl, {}, b, &c.defs);
  bool witness = false;
  for (const auto& w : t.bindings)
    if (const Observer* o = std::get_if<Observer>(&w.value))
      witness = observer_class(*o) == ObserverClass::FTL;
  report(4, s.truth == Truth::True && t.truth == Truth::False && witness,
         std::string("slower-than-light model ") + to_string(s.truth) + ", faster-than-light model " +
             to_string(t.truth) + (witness ? " with a spacelike witness" : " without a witness"));
}

void lemmas(const Corpus& c) {
  // DualCoro is a corollary about dual uniqueness, not one of the lemmas checked here.
  const std::set<std::string> skip{"DualCoro"};
  Budget b;
  Report s = run_lemma_suite(c, ModelKind::StlOnly, b, 200);
  Report f = run_lemma_suite(c, ModelKind::Ftl, b, 200);
  Tally ts = tally(s, skip), tf = tally(f, skip);
  std::size_t n = 0;
  for (const auto* r : {&s, &f})
    for (const auto& e : r->entries) n += !skip.count(e.name);
  std::string d = std::to_string(n) + " lemma runs x 200 cases: " +
                  counts(Tally{ts.pass + tf.pass, ts.fail + tf.fail, ts.unknown + tf.unknown});
  std::string fe = failing_entries(s, skip) + failing_entries(f, skip);
  if (!fe.empty()) d += "; false in " + fe;
  report(5, ts.fail + tf.fail == 0 && n >= 20, d);
}

void definitions(const Corpus& c) {
  const std::set<std::string> ftl_only{"BwRho", "EqRho", "Rho", "OP", "Dual"};
  const std::set<std::string> neutral{"Chron", "Cop",        "Ev", "FTL", "IsBeg", "IsEnd", "L",
                                      "Lightspeed", "M", "Par", "STL", "TR", "l"};
  std::vector<std::string> stl_preds, ftl_preds;
  for (const auto& p : registered_predicates()) {
    const bool ftl_family = ends_with(p, "FTL") && p != "FTL";
    if (ftl_family || ftl_only.count(p)) {
      ftl_preds.push_back(p);
    } else {
      stl_preds.push_back(p);
      if (neutral.count(p)) ftl_preds.push_back(p);
    }
  }
  Budget b;
  std::size_t disagreements = 0, preds = 0;
  std::string low;
  for (auto [model, list] : {std::pair{ModelKind::StlOnly, stl_preds}, {ModelKind::Ftl, ftl_preds}}) {
    Report r = check_definitional_equivalence(c, list, model, b, 200);
    for (const auto& e : r.entries) {
      ++preds;
      Tally t = tally(e);
      disagreements += t.fail;
      if (e.name != "Dual" && t.decided() < 0.90)
        low += (low.empty() ? "" : ", ") + e.name + " " + pct(t.decided());
    }
  }
  std::string d = std::to_string(preds) + " predicate runs x 200 cases: " +
                  std::to_string(disagreements) + " disagreements";
  d += low.empty() ? ", every decided rate >= 90%" : "; below 90%: " + low;
  report(6, disagreements == 0 && low.empty(), d);
}

void invariance(const Corpus& c) {
  Budget b;
  Tally t;
  for (ModelKind m : {ModelKind::StlOnly, ModelKind::Ftl}) {
    Tally x = tally(invariance_suite(c, m, b, 100));
    t.pass += x.pass;
    t.fail += x.fail;
    t.unknown += x.unknown;
  }
  report(7, t.fail == 0 && t.unknown == 0,
         std::to_string(registered_predicates().size()) +
             " predicates x 100 isometries x 2 models: " + counts(t));
}

void parser(const Corpus& c) {
  std::size_t files = 0, roundtrip = 0, primitive = 0;
  auto check = [&](const FormulaPtr& f, const std::map<std::string, Sort>& free) {
    ++files;
    ParseOptions o{&c.defs, free};
    FormulaPtr g = parse_formula(render_formula(f), o);
    if (same_formula(*f, *g) && render_formula(g) == render_formula(f)) ++roundtrip;
    if (only_primitives(*expand_defined(f, c.defs, kExpandAll))) ++primitive;
  };
  for (const auto& n : c.defs.names()) {
    const Definition& d = c.defs.at(n);
    std::map<std::string, Sort> free;
    for (std::size_t i = 0; i < d.params.size(); ++i) free[d.params[i]] = d.sorts[i];
    check(d.body, free);
  }
  for (const auto* list : {&c.axioms, &c.lemmas})
    for (const auto& e : *list) check(e.formula, {});
  report(8, files >= 45 && roundtrip == files && primitive == files,
         std::to_string(files) + " corpus files: " + std::to_string(roundtrip) +
             " round-trip, " + std::to_string(primitive) + " expand to T, R and = only");
}

void scalars(const Corpus& c) {
  Rng rng(2024);
  const Scalar g[3] = {sqrt_nonneg(Scalar(2)), sqrt_nonneg(Scalar(3)), sqrt_nonneg(Scalar(6))};
  auto pick = [&] {
    Scalar v = rng.rational(9, 4);
    for (const auto& gi : g) v += rng.rational(5, 3) * gi;
    return v;
  };
  std::size_t field_ok = 0, sqrt_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    Scalar a = pick(), b = pick(), d = pick();
    const double da = a.to_double(), db = b.to_double();
    bool ok = a * (b + d) == a * b + a * d && (a + b) - b == a && a * b == b * a &&
              (a + b) + d == a + (b + d) && a - a == Scalar(0);
    if (!b.is_zero()) ok = ok && (a / b) * b == a;
    if (std::abs(da - db) > 1e-9) ok = ok && ((a < b) == (da < db));
    if (!d.is_zero() && d > Scalar(0) && a < b) ok = ok && a * d < b * d;
    field_ok += ok;

    Scalar s = abs(a), r = sqrt_nonneg(s);
    sqrt_ok += r * r == s && r.sign() >= 0 && std::abs(r.to_double() - std::sqrt(std::abs(da))) < 1e-9;
  }
  Budget bud;
  Report again = run_axiom_suite(c, System::SimpleRel, ModelKind::StlOnly, bud, 500);
  const bool same = report_json(again) == stl_axiom_json && !stl_axiom_json.empty();
  report(9, field_ok == 1000 && sqrt_ok == 1000 && same,
         std::to_string(field_ok) + "/1000 field and order identities, " + std::to_string(sqrt_ok) +
             "/1000 square roots, repeated seeded report " + (same ? "byte-identical" : "differs"));
}

}  // namespace

int main() {
  Corpus c = load_corpus(default_corpus_dir());
  axioms_stl(c);
  axioms_ftl(c);
  iso_control(c);
  all_stl(c);
  lemmas(c);
  definitions(c);
  invariance(c);
  parser(c);
  scalars(c);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
