#include <doctest.h>

#include <json.hpp>

#include "relcheck/frontend.hpp"
#include "relcheck/verifier.hpp"

using namespace relcheck;

namespace {
Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }
Vec4 v(long a, long b, long c, long d) { return Vec4(q(a), q(b), q(c), q(d)); }

const Vec4 e0 = v(1, 0, 0, 0);
const Vec4 e1 = v(0, 1, 0, 0);

Observer stl(const Vec4& base, const Vec4& dir = e0) {
  return make_observer(ModelKind::StlOnly, base, dir);
}
Observer ftl(const Vec4& base, const Vec4& dir) { return make_observer(ModelKind::Ftl, base, dir); }
Signal ev(const Vec4& p) { return event_at(p); }

const Corpus& corpus() {
  static const Corpus c = load_corpus(default_corpus_dir());
  return c;
}

// Bounded evaluation of a predicate's fully expanded definition.
Truth by_definition(const std::string& pred, ModelKind model, const Assignment& a) {
  const Definition& d = corpus().defs.at(pred);
  FormulaPtr full = expand_defined(mk_defined(pred, d.params), corpus().defs, kExpandAll);
  EvalContext ctx;
  ctx.entry = "def:" + pred;
  ctx.structural_root = true;
  return evaluate_bounded(full, model, a, Budget{}, &corpus().defs, ctx).truth;
}

bool registered(const std::string& pred, const std::vector<Entity>& args) {
  std::vector<const Entity*> ptrs;
  for (const auto& e : args) ptrs.push_back(&e);
  return evaluate_registered(pred, ptrs);
}

// Integer Minkowski form, independent of the library's.
long lam(const std::array<long, 4>& x) { return -x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]; }
long dot(const std::array<long, 4>& x, const std::array<long, 4>& y) {
  return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}
}  // namespace

TEST_CASE("budget validation") {
  Budget b;
  CHECK_NOTHROW(validate_budget(b));
  b.max_sample_points = 0;
  CHECK_THROWS_AS(validate_budget(b), std::invalid_argument);
}

TEST_CASE("existential time-distance witness on the fixture") {
  Scenario s;
  s.observers["a"] = stl(v(0, 0, 0, 0));
  s.observers["b"] = stl(v(0, -1, 0, 0));
  s.signals["e1"] = ev(v(0, 0, 0, 0));
  s.signals["e2"] = ev(v(2, 0, 0, 0));
  QueryResult r = evaluate_query(s, "Tau(c,b,e1,e2)", corpus(), Budget{});
  REQUIRE(r.verdict.truth == Truth::True);
  REQUIRE(r.existential == std::vector<std::string>{"c"});
  REQUIRE(r.verdict.bindings.size() == 1);
  const Observer& c = std::get<Observer>(r.verdict.bindings[0].value);
  // Opposite side of a from b, at the proper-time gap 2.
  CHECK(on_line(c.line, v(0, 2, 0, 0)));
  CHECK(on_line(c.line, v(7, 2, 0, 0)));
}

TEST_CASE("all observers are slower than light only in the slower-than-light model") {
  FormulaPtr f = parse_formula("forall a:Ob. STL(a)", ParseOptions{&corpus().defs, {}});
  Verdict s = evaluate_bounded(f, ModelKind::StlOnly, {}, Budget{}, &corpus().defs);
  CHECK(s.truth == Truth::True);
  Verdict t = evaluate_bounded(f, ModelKind::Ftl, {}, Budget{}, &corpus().defs);
  REQUIRE(t.truth == Truth::False);
  REQUIRE(t.bindings.size() == 1);
  const Observer& w = std::get<Observer>(t.bindings[0].value);
  CHECK(mnorm(w.line.dir).sign() > 0);
}

TEST_CASE("relatable dual fixture admits both time orientations") {
  const Observer a = ftl(v(0, 0, 0, 0), e1), b = ftl(v(0, 0, 5, 0), e1);
  auto dual = [&](const Vec4& base) {
    return by_definition("Dual", ModelKind::Ftl, {{"a'", ftl(base, e1)}, {"a", a}, {"b", b}});
  };
  CHECK(dual(v(5, 0, 5, 0)) == Truth::True);
  CHECK(dual(v(-5, 0, 5, 0)) == Truth::True);
  CHECK(dual(v(5, 0, 6, 0)) == Truth::False);
  CHECK(dual(v(4, 0, 5, 0)) == Truth::False);
  // Offsets (13,0,0,12) from b: orthogonal to a - b and -169 + 144 = -25.
  CHECK(dual(v(13, 0, 5, 12)) == Truth::True);
  CHECK(lam({13, 0, 0, 12}) == -25);
  CHECK(registered("Dual", {ftl(v(13, 0, 5, 12), e1), a, b}));

  auto computed = relatable_dual(a, b);
  REQUIRE(computed);
  CHECK(dual(computed->line.base) == Truth::True);
}

TEST_CASE("unique-observer axiom fails along a spacelike line") {
  // h = (0,1,0,0) is half the gap; n = (1,0,1,0) is null and orthogonal to h.
  const std::array<long, 4> h{0, 1, 0, 0}, n{1, 0, 1, 0}, w{1, 1, 1, 0};
  CHECK(lam(n) == 0);
  CHECK(dot(h, n) == 0);
  CHECK(lam(w) == 1);
  // perp(h, w) = h - (h.w / w.w) w = h - w = -n, which is null.
  CHECK(dot(h, w) == lam(w));

  const Vec4 W = v(1, 1, 1, 0);
  const Signal al = ev(v(0, 0, 0, 0)), ga = ev(v(0, 1, 0, 0)), be = ev(v(0, 2, 0, 0));
  const Observer a = ftl(al.beg, W), b = ftl(be.beg, W), c = ftl(ga.beg, W);
  CHECK(registered("BwFTL", {a, c, b}));
  CHECK(registered("EqFTL", {a, c, c, b}));
  CHECK_FALSE(registered("DeltaFTL", {a, al, ga, ga, be}));
  CHECK(by_definition("DeltaFTL", ModelKind::Ftl,
                      {{"a", a}, {"al0", al}, {"al1", ga}, {"be0", ga}, {"be1", be}}) ==
        Truth::False);

  const CorpusEntry* ax = corpus().find("AxUnObFTL");
  REQUIRE(ax);
  EvalContext ctx;
  ctx.entry = "AxUnObFTL";
  ctx.instantiated =
      instantiate_universals(*ax->formula, {{"d", ftl(al.beg, e1)}, {"al", al}, {"be", be}});
  Verdict r = evaluate_bounded(ax->formula, ModelKind::Ftl, {}, Budget{}, &corpus().defs, ctx);
  CHECK(r.truth == Truth::False);

  // Along a timelike line the midpoint works.
  ctx.instantiated = instantiate_universals(
      *ax->formula, {{"d", ftl(al.beg, e0)}, {"al", al}, {"be", ev(v(2, 0, 0, 0))}});
  r = evaluate_bounded(ax->formula, ModelKind::Ftl, {}, Budget{}, &corpus().defs, ctx);
  CHECK(r.truth == Truth::True);
}

TEST_CASE("simultaneity along a spacelike line is not transitive") {
  const std::array<long, 4> s1{0, 0, 0, 1}, s2{1, 0, 1, -1}, s12{1, 0, 1, 0}, d{0, 1, 0, 0};
  CHECK(dot(s1, d) == 0);
  CHECK(dot(s2, d) == 0);
  CHECK(lam(s1) > 0);
  CHECK(lam(s2) > 0);
  CHECK(lam(s12) == 0);

  const Observer a = ftl(v(0, 0, 0, 0), e1);
  const Signal al = ev(v(0, 0, 0, 0)), be = ev(v(0, 0, 0, 1)), ga = ev(v(1, 0, 1, 0));
  auto sim = [&](const Signal& x, const Signal& y) {
    const bool geo = registered("SimFTL", {a, x, y});
    const Truth def = by_definition("SimFTL", ModelKind::Ftl, {{"c", a}, {"be", x}, {"be'", y}});
    CHECK(def == (geo ? Truth::True : Truth::False));
    return geo;
  };
  CHECK(sim(al, be));
  CHECK(sim(be, ga));
  CHECK_FALSE(sim(al, ga));
}

TEST_CASE("balls around spacelike observers") {
  const Observer c = ftl(v(0, 0, 0, 0), e1);
  auto in = [&](const Vec4& x, const Vec4& r) {
    const bool geo = in_ball_ftl(ftl(x, e1), c, ftl(r, e1));
    const Truth def = by_definition("InBallFTL", ModelKind::Ftl,
                                    {{"x", ftl(x, e1)}, {"c", c}, {"r", ftl(r, e1)}});
    CHECK(def == (geo ? Truth::True : Truth::False));
    return geo;
  };
  // Spacelike radius: every spacelike offset, however long, and nothing else.
  CHECK(in(v(0, 0, 0, 9), v(0, 0, 1, 0)));
  CHECK_FALSE(in(v(1, 0, 0, 0), v(0, 0, 1, 0)));
  CHECK_FALSE(in(v(0, 0, 0, 0), v(0, 0, 1, 0)));
  // Timelike radius: c itself and shorter timelike offsets.
  CHECK(in(v(0, 0, 0, 0), v(3, 0, 0, 0)));
  CHECK(in(v(2, 0, 1, 0), v(3, 0, 0, 0)));
  CHECK_FALSE(in(v(4, 0, 0, 0), v(3, 0, 0, 0)));
  CHECK_FALSE(in(v(0, 0, 1, 0), v(3, 0, 0, 0)));
  // Null radius: null offsets.
  CHECK(in(v(5, 0, 3, 4), v(1, 0, 1, 0)));
  CHECK_FALSE(in(v(1, 0, 0, 0), v(1, 0, 1, 0)));
  // Zero radius still holds the spacelike offsets through the dual branch.
  CHECK(in(v(0, 0, 0, 2), v(0, 0, 0, 0)));
  CHECK_FALSE(in(v(2, 0, 0, 0), v(0, 0, 0, 0)));

  const std::vector<Vec4> offsets = {v(0, 0, 0, 0), v(0, 0, 1, 0), v(0, 0, 0, 3), v(1, 0, 0, 0),
                                     v(3, 0, 0, 0), v(2, 0, 1, 0), v(1, 0, 1, 0), v(5, 0, 3, 4)};
  for (const Vec4& x : offsets)
    for (const Vec4& r : offsets) {
      const Observer ox = ftl(x, e1), orr = ftl(r, e1);
      const Assignment args{{"x", ox}, {"c", c}, {"r", orr}};
      CAPTURE(render_vec(x));
      CAPTURE(render_vec(r));
      CHECK(by_definition("InBallFTL", ModelKind::Ftl, args) ==
            (in_ball_ftl(ox, c, orr) ? Truth::True : Truth::False));
      CHECK(by_definition("OutBallFTL", ModelKind::Ftl, args) ==
            (out_ball_ftl(ox, c, orr) ? Truth::True : Truth::False));
    }
}

TEST_CASE("spacelike observers break plain isotropy") {
  const Observer a = ftl(v(0, 0, 0, 0), v(1, 3, 0, 0));
  auto cx = iso_counterexample(a);
  REQUIRE(cx);
  // Count future points p = s(1,3,0,0) with lambda(p - e) = 0 by hand.
  auto count = [](const Vec4& e) {
    const double t = e(0).to_double(), x = e(1).to_double(), y = e(2).to_double(),
                 z = e(3).to_double();
    // -(s - t)^2 + (3s - x)^2 + y^2 + z^2 = 8 s^2 + (2t - 6x) s + (x^2 + y^2 + z^2 - t^2)
    const double A = 8, B = 2 * t - 6 * x, C = x * x + y * y + z * z - t * t;
    const double disc = B * B - 4 * A * C;
    if (disc < 0) return 0;
    int n = 0;
    for (double s : {(-B - std::sqrt(disc)) / (2 * A), (-B + std::sqrt(disc)) / (2 * A)})
      if (s - t > 1e-9) ++n;
    return disc == 0 ? std::min(n, 1) : n;
  };
  CHECK(count(cx->no_signal.beg) == 0);
  CHECK(count(cx->two_signals.beg) == 2);
}

TEST_CASE("configuration patterns") {
  Rng rng(5);
  Budget b;
  for (const auto& p : configuration_patterns()) {
    CAPTURE(p);
    Rng r(case_seed(9, p, 0));
    CHECK_NOTHROW(generate_configuration(p, ModelKind::Ftl, b, r));
    if (p.find("spacelike") != std::string::npos)
      CHECK_THROWS_AS(generate_configuration(p, ModelKind::StlOnly, b, r), GenerationError);
  }
  for (const char* p : {"relatable spacelike pair", "non-relatable spacelike pair"}) {
    Rng r(case_seed(9, p, 1));
    Assignment pair = generate_configuration(p, ModelKind::Ftl, b, r);
    REQUIRE(pair.size() == 2);
    Assignment named{{"a", pair.begin()->second}, {"b", std::next(pair.begin())->second}};
    const Truth expect = std::string(p).rfind("non", 0) == 0 ? Truth::False : Truth::True;
    CHECK(by_definition("Rho", ModelKind::Ftl, named) == expect);
  }
  Assignment par = generate_configuration("parallel timelike pair", ModelKind::StlOnly, b, rng);
  REQUIRE(par.size() == 2);
  std::vector<Observer> obs;
  for (auto& [k, e] : par) obs.push_back(std::get<Observer>(e));
  CHECK(vec_equal(obs[0].line.dir, obs[1].line.dir));
  CHECK(mnorm(obs[0].line.dir).sign() < 0);

  Assignment nul = generate_configuration("null-connected event pair", ModelKind::StlOnly, b, rng);
  std::vector<Signal> evs;
  for (auto& [k, e] : nul) evs.push_back(std::get<Signal>(e));
  REQUIRE(evs.size() == 2);
  CHECK(mnorm<Scalar>(Vec4(evs[1].beg - evs[0].beg)).is_zero());
  CHECK_THROWS_AS(generate_configuration("no such pattern", ModelKind::StlOnly, b, rng),
                  GenerationError);
}

TEST_CASE("seeded reports are reproducible and replayable") {
  Budget b;
  Report r1 = run_axiom_suite(corpus(), System::SimpleRelFtl, ModelKind::Ftl, b, 60,
                              {"AxSimFTL", "AxEv"});
  Report r2 = run_axiom_suite(corpus(), System::SimpleRelFtl, ModelKind::Ftl, b, 60,
                              {"AxSimFTL", "AxEv"});
  CHECK(report_json(r1) == report_json(r2));
  b.seed = 43;
  Report r3 = run_axiom_suite(corpus(), System::SimpleRelFtl, ModelKind::Ftl, b, 60,
                              {"AxSimFTL", "AxEv"});
  CHECK(report_json(r1) != report_json(r3));

  auto j = nlohmann::json::parse(report_json(r1));
  CHECK(j["seed"] == "42");
  CHECK(j["entries"].size() == 2);

  // Every false verdict replays from its serialized scenario.
  const CorpusEntry* ax = corpus().find("AxSimFTL");
  std::size_t replayed = 0;
  for (const auto& e : j["entries"]) {
    if (e["name"] != "AxSimFTL") continue;
    for (const auto& c : e["cases"]) {
      if (c["verdict"] != "False") continue;
      Scenario s = load_scenario(c["replay"].dump());
      Assignment a;
      for (auto& [k, o] : s.observers) a[k] = o;
      for (auto& [k, g] : s.signals) a[k] = g;
      EvalContext ctx;
      ctx.entry = "AxSimFTL";
      ctx.instantiated = instantiate_universals(*ax->formula, a);
      CHECK(evaluate_bounded(ax->formula, ModelKind::Ftl, {}, Budget{}, &corpus().defs, ctx).truth ==
            Truth::False);
      ++replayed;
    }
  }
  CHECK(replayed > 0);
}

TEST_CASE("slower-than-light axioms hold on a small run") {
  Report r = run_axiom_suite(corpus(), System::SimpleRel, ModelKind::StlOnly, Budget{}, 25);
  for (const auto& e : r.entries) {
    CAPTURE(e.name);
    CHECK(e.count(Truth::False) == 0);
    CHECK(e.count(Truth::Unknown) == 0);
  }
}

TEST_CASE("summary table columns") {
  Report r = run_lemma_suite(corpus(), ModelKind::StlOnly, Budget{}, 5, {"TwoEvents"});
  const std::string t = summary_table(r);
  CHECK(t.find("axiom") == 0);
  CHECK(t.find("TwoEvents") != std::string::npos);
  CHECK(t.find("total") != std::string::npos);
}
