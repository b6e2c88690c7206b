#include <doctest.h>

#include <random>

#include "relcheck/model.hpp"

using namespace relcheck;

namespace {
Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }
Vec4 v(Scalar a, Scalar b, Scalar c, Scalar d) { return Vec4(a, b, c, d); }
Vec4 v(long a, long b, long c, long d) { return Vec4(q(a), q(b), q(c), q(d)); }

const Vec4 e0 = v(1, 0, 0, 0);
const Vec4 e1 = v(0, 1, 0, 0);

Observer stl(const Vec4& base, const Vec4& dir = e0) {
  return make_observer(ModelKind::StlOnly, base, dir);
}
Observer ftl(const Vec4& base, const Vec4& dir) { return make_observer(ModelKind::Ftl, base, dir); }
Signal ev(const Vec4& p) { return event_at(p); }

// Rational boost along x1 with rapidity parameter t: gamma = (1+t^2)/(1-t^2).
PoincareMap boost(const Scalar& t, int axis) {
  PoincareMap m;
  Scalar den = Scalar(1) - t * t;
  m.linear(0, 0) = (Scalar(1) + t * t) / den;
  m.linear(axis, axis) = m.linear(0, 0);
  m.linear(0, axis) = Scalar(2) * t / den;
  m.linear(axis, 0) = m.linear(0, axis);
  return m;
}

PoincareMap random_map(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3), coord(-9, 9);
  PoincareMap m;
  for (int axis = 1; axis <= 3; ++axis) m = compose(boost(q(num(rng), 5), axis), m);
  m.translation = v(coord(rng), coord(rng), coord(rng), coord(rng));
  return m;
}

Observer vertical(std::mt19937_64& rng, const PoincareMap& m, Vec3* spatial) {
  std::uniform_int_distribution<int> c(-2, 2);
  *spatial = Vec3(q(c(rng)), q(c(rng)), q(c(rng)));
  Line l = make_line(v(Scalar(0), (*spatial)(0), (*spatial)(1), (*spatial)(2)), e0);
  return Observer{apply_poincare(m, l)};
}
}  // namespace

TEST_CASE("incidence examples") {
  Observer a = stl(v(0, 0, 0, 0));
  CHECK(incidence(a, make_signal(v(0, 0, 0, 0), v(1, 1, 0, 0))) == Incidence::Transmits);
  CHECK(incidence(a, make_signal(v(1, 1, 0, 0), v(2, 0, 0, 0))) == Incidence::Receives);
  CHECK(incidence(a, ev(v(3, 0, 0, 0))) == Incidence::Both);
  CHECK(incidence(a, make_signal(v(0, 1, 0, 0), v(1, 2, 0, 0))) == Incidence::Neither);
  CHECK_THROWS_AS(make_signal(v(0, 0, 0, 0), v(1, 2, 0, 0)), ModelError);
  CHECK_THROWS_AS(make_signal(v(1, 1, 0, 0), v(0, 0, 0, 0)), ModelError);
  CHECK_THROWS_AS(make_observer(ModelKind::StlOnly, v(0, 0, 0, 0), v(1, 2, 0, 0)), ModelError);
  CHECK_THROWS_AS(make_observer(ModelKind::Ftl, v(0, 0, 0, 0), v(1, 1, 0, 0)), ModelError);
}

TEST_CASE("parallel, meeting and coplanar observers") {
  Observer a = stl(v(0, 0, 0, 0)), b = stl(v(0, 1, 0, 0));
  Observer c = stl(v(0, 0, 0, 0), v(2, 1, 0, 0));
  Observer d = stl(v(0, 0, 5, 0), v(2, 1, 0, 0));
  CHECK(parallel(a, b));
  CHECK_FALSE(meets(a, b));
  CHECK(meets(a, c));
  CHECK(coplanar(a, b));
  CHECK(coplanar(a, c));
  CHECK_FALSE(coplanar(a, d));
}

TEST_CASE("observer classes and light relations") {
  CHECK(observer_class(Observer{make_line(v(0, 0, 0, 0), v(1, 0, 0, 0))}) == ObserverClass::STL);
  CHECK(observer_class(Observer{make_line(v(0, 0, 0, 0), v(1, 1, 0, 0))}) ==
        ObserverClass::Lightspeed);
  CHECK(observer_class(Observer{make_line(v(0, 0, 0, 0), v(1, 2, 0, 0))}) == ObserverClass::FTL);
  CHECK(lightlike(ev(v(0, 0, 0, 0)), ev(v(1, 1, 0, 0))));
  CHECK_FALSE(lightlike(ev(v(1, 1, 0, 0)), ev(v(0, 0, 0, 0))));
  CHECK(light_between(ev(v(1, 1, 0, 0)), ev(v(0, 0, 0, 0))));
  CHECK(chron_precedes(ev(v(0, 0, 0, 0)), ev(v(2, 1, 0, 0))));
  CHECK_FALSE(chron_precedes(ev(v(0, 0, 0, 0)), ev(v(1, 1, 0, 0))));
  // two-hop light path through (3/2, 3/2, 0, 0)
  Signal mid = ev(v(q(3, 2), q(3, 2), q(0), q(0)));
  CHECK(lightlike(ev(v(0, 0, 0, 0)), mid));
  CHECK(lightlike(mid, ev(v(2, 1, 0, 0))));
}

TEST_CASE("betweenness, congruence and simultaneity examples") {
  Observer x0 = stl(v(0, 0, 0, 0)), x1 = stl(v(0, 1, 0, 0)), x2 = stl(v(0, 2, 0, 0));
  CHECK(bw_geo(x0, x1, x2));
  CHECK_FALSE(bw_geo(x0, x2, x1));
  CHECK(eq_geo(x0, x1, stl(v(0, 3, 0, 0)), stl(v(0, 4, 0, 0))));
  CHECK_FALSE(eq_geo(x0, x2, stl(v(0, 3, 0, 0)), stl(v(0, 4, 0, 0))));
  CHECK(sim_geo(x0, ev(v(1, 1, 0, 0)), ev(v(1, -1, 0, 0))));
  CHECK_FALSE(sim_geo(x0, ev(v(1, 1, 0, 0)), ev(v(2, -1, 0, 0))));
  CHECK(delta_geo(x0, ev(v(0, 7, 0, 0)), ev(v(3, 9, 0, 0)), ev(v(0, 0, 0, 0)),
                  ev(v(3, 0, 0, 0))));
  CHECK_THROWS_AS(eq_geo(ftl(v(0, 0, 0, 0), e1), ftl(v(0, 0, 0, 0), e1),
                         ftl(v(0, 0, 0, 0), e1), ftl(v(0, 0, 0, 0), e1)),
                  Unsupported);
}

TEST_CASE("time-distance construction examples") {
  Observer b = stl(v(0, -1, 0, 0));
  auto c = tau_geo(b, ev(v(0, 0, 0, 0)), ev(v(2, 0, 0, 0)));
  REQUIRE(c);
  CHECK(same_line(c->line, stl(v(0, 2, 0, 0)).line));
  auto c2 = tau_geo(stl(v(0, 0, -1, 0)), ev(v(0, 0, 0, 0)), ev(v(2, 0, 0, 0)));
  REQUIRE(c2);
  CHECK(same_line(c2->line, stl(v(0, 0, 2, 0)).line));
  CHECK(tau_holds(*c, b, ev(v(0, 0, 0, 0)), ev(v(2, 0, 0, 0))));
  CHECK_FALSE(tau_geo(stl(v(0, 0, 0, 0)), ev(v(0, 0, 0, 0)), ev(v(2, 0, 0, 0))));
  CHECK_FALSE(tau_geo(b, ev(v(0, 0, 0, 0)), ev(v(1, 1, 0, 0))));
}

TEST_CASE("faster-than-light relations") {
  Observer a = ftl(v(0, 0, 0, 0), e1), b = ftl(v(0, 0, 5, 0), e1);
  CHECK_FALSE(rho(a, b));
  CHECK(optical_plane(a, ftl(v(1, 0, 1, 0), e1)));
  CHECK_FALSE(optical_plane(a, b));
  auto d = relatable_dual(a, b);
  REQUIRE(d);
  CHECK(same_line(d->line, ftl(v(5, 0, 5, 0), e1).line));
  CHECK(is_relatable_dual(*d, a, b));
  CHECK(is_relatable_dual(ftl(v(5, 0, 5, 0), e1), a, b));
  CHECK_FALSE(is_relatable_dual(ftl(v(5, 0, 0, 0), e1), a, b));
  // a'' sits halfway along an optical pair with both a and a'
  Observer a2 = ftl(v(q(5, 2), q(0), q(5, 2), q(0)), e1);
  CHECK(optical_plane(a, ftl(v(5, 0, 5, 0), e1)));
  CHECK(bw_rho(a, a2, ftl(v(5, 0, 5, 0), e1)));
  // timelike observers always exchange signals
  CHECK(rho(stl(v(0, 0, 0, 0)), stl(v(0, 9, 0, 0))));
  CHECK(rho(stl(v(0, 0, 0, 0)), stl(v(0, 9, 0, 0), v(2, 1, 0, 0))));
  // non-parallel spacelike lines in spatial directions at the same time meet
  CHECK(rho(ftl(v(0, 0, 0, 0), e1), ftl(v(0, 0, 0, 0), v(0, 0, 1, 0))));
  // spatial lines at different times exchange signals, skew ones at one time do not
  CHECK(rho(ftl(v(0, 0, 0, 0), e1), ftl(v(3, 0, 0, 0), v(0, 0, 1, 0))));
  CHECK_FALSE(rho(ftl(v(0, 0, 0, 0), e1), ftl(v(0, 0, 0, 3), v(0, 0, 1, 0))));
  CHECK_FALSE(rho(ftl(v(0, 0, 0, 0), v(1, 2, 0, 0)), ftl(v(0, 0, 7, 0), v(1, 2, 0, 0))));
}

TEST_CASE("rho agrees with a brute-force search for light signals") {
  // Independent check: sample points on both lines and look for a null
  // separation through the sign change of the interval along a grid.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> c(-3, 3);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    Vec4 da = v(c(rng), c(rng), c(rng), c(rng)), db = v(c(rng), c(rng), c(rng), c(rng));
    if (is_zero_vec(da) || is_zero_vec(db)) continue;
    if (classify_vector(da) != Causal::Spacelike || classify_vector(db) != Causal::Spacelike)
      continue;
    Observer a = ftl(v(0, 0, 0, 0), da), b = ftl(v(c(rng), c(rng), c(rng), c(rng)), db);
    bool pos = false, neg = false, zero = false;
    for (int s = -40; s <= 40 && !(pos && neg); ++s)
      for (int t = -40; t <= 40; ++t) {
        Vec4 w = line_point(b.line, q(t, 2)) - line_point(a.line, q(s, 2));
        int sg = mnorm(w).sign();
        pos |= sg > 0;
        neg |= sg < 0;
        zero |= sg == 0;
      }
    if (pos && neg) CHECK(rho(a, b));
    if (zero) CHECK(rho(a, b));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("Euclidean configurations carried by isometries keep their relations") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    PoincareMap m = random_map(rng);
    REQUIRE(validate_isometry(m));
    Vec3 pa, pb, pc, pd;
    Observer a = vertical(rng, m, &pa), b = vertical(rng, m, &pb);
    Observer c = vertical(rng, m, &pc), d = vertical(rng, m, &pd);
    CHECK(bw_geo(a, b, c) == tarski_bw_f(pa, pb, pc));
    CHECK(bw_ftl(a, b, c) == tarski_bw_f(pa, pb, pc));
    CHECK(eq_geo(a, b, c, d) == tarski_eq_f(pa, pb, pc, pd));
    CHECK(eq_ftl(a, b, c, d) == tarski_eq_f(pa, pb, pc, pd));
  }
}

TEST_CASE("light cone intersections with a line") {
  Line a = make_line(v(0, 0, 0, 0), e0);
  auto src = null_sources_on(a, v(3, 2, 0, 0));
  REQUIRE(src.size() == 1);
  CHECK(vec_equal(src[0], v(1, 0, 0, 0)));
  auto tgt = null_targets_on(a, v(3, 2, 0, 0));
  REQUIRE(tgt.size() == 1);
  CHECK(vec_equal(tgt[0], v(5, 0, 0, 0)));
  Line s = make_line(v(0, 0, 0, 0), e1);
  CHECK(null_targets_on(s, v(-1, 0, 0, 0)).size() == 2);
  CHECK(vec_equal(sim_projection(a, v(4, 9, 1, 1)), v(4, 0, 0, 0)));
}

TEST_CASE("scenario round trip") {
  const char* text = R"({"kind":"ftl",
    "observers":{"a":{"base":["0","0","0","0"],"dir":["0","1","0","0"]},
                 "c":{"base":["1/2","3","0","0"],"dir":["2","0","0","0"]}},
    "signals":{"s":{"beg":["0","0","0","0"],"end":["1","1","0","0"]}}})";
  Scenario sc = load_scenario(text);
  CHECK(sc.kind == ModelKind::Ftl);
  CHECK(vec_equal(sc.observers.at("c").line.dir, e0));
  CHECK(vec_equal(sc.observers.at("c").line.base, v(0, 3, 0, 0)));
  Scenario back = load_scenario(save_scenario(sc));
  CHECK(save_scenario(back) == save_scenario(sc));
  CHECK_THROWS_AS(load_scenario(R"({"observers":{"a":{"base":["0","0","0","0"],"dir":["1","1","0","0"]}}})"),
                  ModelError);
  CHECK_THROWS_AS(load_scenario(R"({"signals":{"s":{"beg":["1","1","0","0"],"end":["0","0","0","0"]}}})"),
                  ModelError);
  CHECK_THROWS_AS(load_scenario(R"({"signals":{"s":{"beg":["0","0","0","0"],"end":["1","2","0","0"]}}})"),
                  ModelError);
}
