#include <doctest.h>

#include "relcheck/fol.hpp"

using namespace relcheck;

namespace {

DefinitionTable small_table() {
  DefinitionTable t;
  t.declare("Ev", {"s"}, {Sort::Si});
  t.declare("M", {"a", "b"}, {Sort::Ob, Sort::Ob});
  t.declare("Cop", {"a", "b"}, {Sort::Ob, Sort::Ob});
  t.declare("Par", {"a", "b"}, {Sort::Ob, Sort::Ob});
  auto body = [&](const std::string& text, std::map<std::string, Sort> fs) {
    ParseOptions po;
    po.defs = &t;
    po.free_sorts = std::move(fs);
    return parse_formula(text, po);
  };
  t.set_body("Ev", body("forall a:Ob. (T(a,s) <-> R(a,s))", {{"s", Sort::Si}}));
  t.set_body("M", body("exists s:Si. T(a,s) & T(b,s)", {{"a", Sort::Ob}, {"b", Sort::Ob}}));
  t.set_body("Cop", body("exists c:Ob, d:Ob. c!=d & M(a,c) & M(c,b) & M(d,b) & M(d,a)",
                         {{"a", Sort::Ob}, {"b", Sort::Ob}}));
  t.set_body("Par", body("(Cop(a,b) & !M(a,b)) | a=b", {{"a", Sort::Ob}, {"b", Sort::Ob}}));
  return t;
}

FormulaPtr parse_with(const DefinitionTable& t, const std::string& s) {
  ParseOptions po;
  po.defs = &t;
  return parse_formula(s, po);
}

void check_round_trip(const FormulaPtr& f) {
  FormulaPtr g = parse_formula(render_formula(f), ParseOptions{});
  CHECK(same_formula(*f, *g));
}

}  // namespace

TEST_CASE("parse quantifier tree") {
  auto f = parse_formula("forall a:Ob. exists s:Si. T(a,s)");
  REQUIRE(f->kind == Kind::Forall);
  CHECK(f->var == "a");
  CHECK(f->sort == Sort::Ob);
  REQUIRE(f->lhs->kind == Kind::Exists);
  CHECK(f->lhs->sort == Sort::Si);
  const Formula& atom = *f->lhs->lhs;
  CHECK(atom.kind == Kind::Atom);
  CHECK(atom.prim == Prim::T);
  CHECK(atom.args == std::vector<std::string>{"a", "s"});
  CHECK(render_formula(f) == "forall a:Ob. exists s:Si. T(a,s)");
}

TEST_CASE("binder lists desugar to nested quantifiers and keep order") {
  auto f = parse_formula("forall x:Ob, y:Si, z:Ob. T(x,y) -> T(z,y)");
  CHECK(f->var == "x");
  CHECK(f->lhs->var == "y");
  CHECK(f->lhs->lhs->var == "z");
  CHECK(render_formula(f) == "forall x:Ob, y:Si, z:Ob. (T(x,y) -> T(z,y))");
  check_round_trip(f);
}

TEST_CASE("precedence and associativity") {
  auto f = parse_formula("T(a,s) & R(a,s) | T(b,s) -> R(b,s) <-> a=b");
  REQUIRE(f->kind == Kind::Iff);
  REQUIRE(f->lhs->kind == Kind::Implies);
  REQUIRE(f->lhs->lhs->kind == Kind::Or);
  REQUIRE(f->lhs->lhs->lhs->kind == Kind::And);
  auto g = parse_formula("T(a,s) -> T(b,s) -> T(c,s)");
  REQUIRE(g->kind == Kind::Implies);
  CHECK(g->rhs->kind == Kind::Implies);
  check_round_trip(f);
  check_round_trip(g);
  check_round_trip(parse_formula("(T(a,s) -> T(b,s)) -> T(c,s)"));
  check_round_trip(parse_formula("T(a,s) & (T(b,s) & T(c,s))"));
  check_round_trip(parse_formula("(forall x:Ob. T(x,s)) & R(a,s)"));
  check_round_trip(parse_formula("!(forall x:Ob. T(x,s)) & R(a,s)"));
  check_round_trip(parse_formula("T(a,s) & (exists x:Ob. T(x,s)) & R(a,s)"));
  check_round_trip(parse_formula("exists! s:Si. T(a,s) & a!=b"));
}

TEST_CASE("inequality and negation") {
  auto f = parse_formula("a!=b & !(a=c) & T(a,s)");
  CHECK(f->lhs->lhs->kind == Kind::Not);
  CHECK(f->lhs->lhs->lhs->prim == Prim::Eq);
  CHECK(f->lhs->rhs->kind == Kind::Not);
  CHECK(render_formula(f) == "a!=b & a!=c & T(a,s)");
}

TEST_CASE("comments and unicode identifiers") {
  auto f = parse_formula("# header\nforall α:Si. T(a', α) # trailing\n");
  CHECK(f->var == "α");
  CHECK(render_formula(f) == "forall α:Si. T(a',α)");
}

TEST_CASE("sort errors") {
  ParseOptions po;
  po.free_sorts = {{"a", Sort::Ob}, {"b", Sort::Ob}};
  try {
    parse_formula("T(a,b)", po);
    FAIL("expected a sort error");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::Sort);
    CHECK(e.line == 1);
    CHECK(e.column == 5);
  }
  CHECK_THROWS_AS(parse_formula("forall a:Ob, s:Si. a=s"), ParseError);
  CHECK_THROWS_AS(parse_formula("T(s,a) & T(a,s)"), ParseError);
  CHECK_THROWS_AS(parse_formula("a=b"), ParseError);  // sorts cannot be inferred
  CHECK_NOTHROW(parse_formula("a=b & T(b,s)"));
}

TEST_CASE("syntax and unknown predicate diagnostics") {
  try {
    parse_formula("forall a:Ob.\n  T(a,s) &");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::Syntax);
    CHECK(e.line == 2);
    CHECK(e.column == 11);
  }
  try {
    parse_formula("Foo(a,s)");
    FAIL("expected an unknown predicate");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::UnknownPredicate);
  }
  CHECK_THROWS_AS(parse_formula("forall a:Xx. T(a,s)"), ParseError);
  CHECK_THROWS_AS(parse_formula("T(a,s) $"), ParseError);
  CHECK_THROWS_AS(parse_formula("T(a)"), ParseError);
}

TEST_CASE("defined atoms print their name") {
  auto t = small_table();
  auto f = parse_with(t, "forall x:Ob, y:Ob. Par(x,y) -> Par(y,x)");
  CHECK(render_formula(f) == "forall x:Ob, y:Ob. (Par(x,y) -> Par(y,x))");
  CHECK(count_atoms(*f, "Par") == 2);
  CHECK_THROWS_AS(parse_with(t, "Par(x)"), ParseError);
}

TEST_CASE("expansion by layers") {
  auto t = small_table();
  auto ev = parse_with(t, "Ev(s)");
  CHECK(render_formula(expand_defined(ev, t, 1)) == "forall a:Ob. (T(a,s) <-> R(a,s))");
  auto par = parse_with(t, "Par(a,b)");
  CHECK(render_formula(expand_defined(par, t, 1)) == "(Cop(a,b) & !M(a,b)) | a=b");
  CHECK(same_formula(*expand_defined(par, t, 0), *par));
  CHECK(expand_defined(par, t, 0) == par);
  auto full = expand_defined(par, t, kExpandAll);
  CHECK(only_primitives(*full));
  CHECK(free_variables(*full) == free_variables(*par, &t));
  auto e1 = expand_defined(par, t, 1);
  REQUIRE(e1->origin);
  CHECK(e1->origin->name == "Par");
}

TEST_CASE("expansion avoids capture") {
  auto t = small_table();
  // The body of Ev binds a; the argument is also called a.
  auto f = parse_with(t, "forall a:Ob. T(a,s) & Ev(s)");
  auto g = parse_with(t, "exists a:Si. Ev(a)");
  auto eg = expand_defined(g, t, 1);
  CHECK(render_formula(eg) == "exists a:Si. forall a1:Ob. (T(a1,a) <-> R(a1,a))");
  // Cop binds c and d; call it with c and d as arguments.
  auto h = parse_with(t, "Cop(c,d)");
  auto eh = expand_defined(h, t, kExpandAll);
  CHECK(free_variables(*eh) == std::map<std::string, Sort>{{"c", Sort::Ob}, {"d", Sort::Ob}});
  CHECK(only_primitives(*eh));
  check_round_trip(expand_defined(f, t, kExpandAll));
  check_round_trip(eh);
}

TEST_CASE("cyclic definitions are rejected") {
  DefinitionTable t;
  t.declare("A", {"a"}, {Sort::Ob});
  t.declare("B", {"a"}, {Sort::Ob});
  ParseOptions po;
  po.defs = &t;
  po.free_sorts = {{"a", Sort::Ob}};
  t.set_body("A", parse_formula("B(a)", po));
  t.set_body("B", parse_formula("!A(a)", po));
  CHECK_THROWS_AS(t.check_acyclic(), std::runtime_error);
}

TEST_CASE("shipped corpus loads, round-trips and expands to primitives") {
  Corpus c = load_corpus(RELCHECK_DEFAULT_CORPUS);
  CHECK(c.files().size() >= 45);
  ParseOptions po;
  po.defs = &c.defs;
  for (auto& name : c.defs.names()) {
    const Definition& d = c.defs.at(name);
    ParseOptions pd = po;
    for (size_t i = 0; i < d.params.size(); ++i) pd.free_sorts[d.params[i]] = d.sorts[i];
    CHECK_MESSAGE(same_formula(*d.body, *parse_formula(render_formula(d.body), pd)), name);
    auto atom = mk_defined(name, d.params);
    auto full = expand_defined(atom, c.defs, kExpandAll);
    CHECK_MESSAGE(only_primitives(*full), name);
    auto fv = free_variables(*full);
    for (size_t i = 0; i < d.params.size(); ++i) CHECK(fv.count(d.params[i]) == 1);
    CHECK(fv.size() <= d.params.size());
  }
  for (auto* list : {&c.axioms, &c.lemmas})
    for (auto& e : *list) {
      CHECK_MESSAGE(same_formula(*e.formula, *parse_formula(render_formula(e.formula), po)), e.name);
      CHECK_MESSAGE(only_primitives(*expand_defined(e.formula, c.defs, kExpandAll)), e.name);
    }
}
