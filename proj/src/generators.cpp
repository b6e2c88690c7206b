#include <algorithm>
#include <array>
#include <functional>

#include "relcheck/verifier.hpp"

namespace relcheck {

long Rng::uniform(long lo, long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(next() % span);
}

Scalar Rng::rational(long bound, long den_cap) {
  const long d = uniform(1, std::max<long>(1, den_cap));
  const long n = uniform(-bound, bound);
  return Scalar::rational(n, d);
}

std::uint64_t case_seed(std::uint64_t seed, const std::string& entry, std::size_t index) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : entry) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::uint64_t x = seed ^ (h + 0x9e3779b97f4a7c15ULL + (index << 6) + (index >> 2));
  x ^= static_cast<std::uint64_t>(index) * 0xbf58476d1ce4e5b9ULL;
  return x;
}

namespace {

Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }

Mat4 identity4() {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = Scalar(i == j ? 1 : 0);
  return m;
}

Mat4 boost(int axis, const Scalar& t) {
  Mat4 m = identity4();
  Scalar den = Scalar(1) - t * t;
  Scalar g = (Scalar(1) + t * t) / den;
  Scalar bg = Scalar(2) * t / den;
  m(0, 0) = g;
  m(axis, axis) = g;
  m(0, axis) = bg;
  m(axis, 0) = bg;
  return m;
}

Mat4 rotation(int i, int j, long a, long b) {
  Mat4 m = identity4();
  Scalar h = q(a * a + b * b);
  Scalar c = q(a * a - b * b) / h, s = q(2 * a * b) / h;
  m(i, i) = c;
  m(j, j) = c;
  m(i, j) = -s;
  m(j, i) = s;
  return m;
}

const std::vector<Vec4>& integer_null_dirs() {
  static const std::vector<Vec4> d = [] {
    std::vector<std::array<long, 4>> base = {{1, 1, 0, 0},  {5, 3, 4, 0},  {3, 1, 2, 2},
                                             {7, 2, 3, 6},  {9, 1, 4, 8},  {9, 4, 4, 7},
                                             {11, 2, 6, 9}, {13, 5, 12, 0}, {17, 8, 15, 0}};
    std::vector<Vec4> out;
    for (auto& b : base) out.emplace_back(q(b[0]), q(b[1]), q(b[2]), q(b[3]));
    return out;
  }();
  return d;
}

// Rational unit vectors of the spatial part.
const std::vector<std::array<Scalar, 3>>& unit_vectors() {
  static const std::vector<std::array<Scalar, 3>> u = {
      {q(1), q(0), q(0)},          {q(0), q(1), q(0)},          {q(0), q(0), q(1)},
      {q(3, 5), q(4, 5), q(0)},    {q(0), q(3, 5), q(4, 5)},    {q(4, 5), q(0), q(3, 5)},
      {q(1, 3), q(2, 3), q(2, 3)}, {q(2, 7), q(3, 7), q(6, 7)}, {q(2, 3), q(-1, 3), q(2, 3)},
      {q(5, 13), q(12, 13), q(0)}, {q(-4, 5), q(3, 5), q(0)},   {q(6, 7), q(-2, 7), q(3, 7)},
  };
  return u;
}

Assignment map_assignment(const PoincareMap& t, const Assignment& a) {
  Assignment out;
  for (auto& [name, e] : a) {
    if (const Observer* o = std::get_if<Observer>(&e))
      out.emplace(name, Observer{apply_poincare(t, o->line)});
    else {
      const Signal& s = std::get<Signal>(e);
      out.emplace(name, Signal{apply_poincare(t, s.beg), apply_poincare(t, s.end)});
    }
  }
  return out;
}

// Random rest-frame configurations.
struct Gen {
  Rng& rng;
  ModelKind kind;
  long B;

  bool ftl() const { return kind == ModelKind::Ftl; }
  Scalar r() { return rng.rational(B, std::min<long>(B, 3)); }
  Scalar pos() {
    Scalar x = rng.rational(B, std::min<long>(B, 3));
    if (x.sign() < 0) x = -x;
    return x.is_zero() ? Scalar(1) : x;
  }
  Scalar unit_interval() {
    long d = rng.uniform(2, std::max<long>(2, std::min<long>(B, 6)));
    return q(rng.uniform(1, d - 1), d);
  }
  Vec4 point() { return Vec4(r(), r(), r(), r()); }
  Vec4 spatial() { return Vec4(Scalar(0), r(), r(), r()); }
  Vec4 e0() const { return Vec4(q(1), q(0), q(0), q(0)); }
  Vec4 tdir() {
    if (rng.chance(30)) return e0();
    return Vec4(q(1), q(rng.uniform(-3, 3), 6), q(rng.uniform(-3, 3), 6),
                q(rng.uniform(-3, 3), 6));
  }
  Vec4 sdir() {
    for (;;) {
      Vec4 s(q(rng.uniform(-2, 2), 3), q(rng.uniform(-3, 3)), q(rng.uniform(-3, 3)),
             q(rng.uniform(-3, 3)));
      if (mnorm(s).sign() > 0) return s;
    }
  }
  Vec4 ndir() {
    Vec4 n = rng.pick(integer_null_dirs());
    std::array<Scalar, 3> sp = {n(1), n(2), n(3)};
    for (int i = 2; i > 0; --i) std::swap(sp[static_cast<size_t>(i)], sp[static_cast<size_t>(rng.uniform(0, i))]);
    for (auto& c : sp)
      if (rng.chance(50)) c = -c;
    return Vec4(n(0), sp[0], sp[1], sp[2]);
  }
  Vec4 unit() {
    auto u = rng.pick(unit_vectors());
    Vec4 v(Scalar(0), u[0], u[1], u[2]);
    return rng.chance(50) ? v : Vec4(-v);
  }
  Vec4 odir(int ftl_pct) { return ftl() && rng.chance(ftl_pct) ? sdir() : tdir(); }
  Observer obs(const Vec4& base, const Vec4& dir) { return Observer{make_line(base, dir)}; }
  Observer any_obs(int ftl_pct = 35) { return obs(point(), odir(ftl_pct)); }
  Observer vertical(const Vec4& sp) { return obs(sp, e0()); }
  Vec4 on(const Observer& o) { return line_point(o.line, r()); }
  Signal ev(const Vec4& p) { return event_at(p); }
  Signal ray(const Vec4& p) { return Signal{p, Vec4(p + ndir() * pos())}; }
  Signal any_signal() { return rng.chance(45) ? ev(point()) : ray(point()); }
  // A signal from p to the first point it can reach on o, else a ray.
  Signal toward(const Vec4& p, const Observer& o) {
    auto t = null_targets_on(o.line, p);
    if (t.empty()) return ray(p);
    return Signal{p, t[static_cast<size_t>(rng.uniform(0, static_cast<long>(t.size()) - 1))]};
  }
  Signal from(const Observer& o, const Vec4& p) {
    auto s = null_sources_on(o.line, p);
    if (s.empty()) return Signal{Vec4(p - ndir() * pos()), p};
    return Signal{s[static_cast<size_t>(rng.uniform(0, static_cast<long>(s.size()) - 1))], p};
  }
};

// Spatial points for geometry inside one parallel class.
struct Geo {
  Gen& g;
  Vec4 pt() { return g.spatial(); }
  Vec4 between(const Vec4& p, const Vec4& q) {
    const long k = g.rng.uniform(0, 9);
    Scalar s = k == 0 ? Scalar(0) : k == 1 ? Scalar(1) : g.unit_interval();
    return p + (q - p) * s;
  }
  Vec4 beyond(const Vec4& p, const Vec4& q) {
    Scalar s = g.rng.chance(15) ? Scalar(0) : g.pos();
    return q + (q - p) * s;
  }
  Vec4 at_dist(const Vec4& p, const Scalar& d) { return p + g.unit() * d; }
  Vec4 maybe(const Vec4& p, int pct_random = 15) { return g.rng.chance(pct_random) ? pt() : p; }
};

Mat4 spatial_rotation(Rng& rng) {
  static const long pairs[][2] = {{2, 1}, {3, 1}, {3, 2}, {4, 1}, {5, 2}};
  Mat4 m = identity4();
  for (int k = 0; k < 2; ++k) {
    int i = static_cast<int>(rng.uniform(1, 3));
    int j = i % 3 + 1;
    auto& p = pairs[rng.uniform(0, 4)];
    m = Mat4(rotation(i, j, p[0], p[1]) * m);
  }
  return m;
}

Vec4 mat_apply(const Mat4& m, const Vec4& v) { return Vec4(m * v); }

using InstanceGen = std::function<Assignment(Gen&, bool)>;

Observer class_member(Gen& g, const Vec4& sp) { return g.vertical(sp); }

// The class direction for AxGeo: a is vertical; other observers are vertical lines.
Assignment tarski(Gen& g, bool ftl_entry, const std::vector<std::pair<std::string, Vec4>>& pts) {
  Assignment a;
  if (ftl_entry && g.ftl() && g.rng.chance(12)) {
    Vec4 d = g.sdir();
    a.emplace("a", g.obs(g.point(), d));
    for (auto& [n, p] : pts) a.emplace(n, g.obs(p, d));
    return a;
  }
  a.emplace("a", g.vertical(g.spatial()));
  for (auto& [n, p] : pts) a.emplace(n, class_member(g, p));
  return a;
}

std::map<std::string, InstanceGen>& instance_table() {
  static std::map<std::string, InstanceGen> t;
  if (!t.empty()) return t;

  t["T1"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), y = g.rng.chance(50) ? x : G.pt();
    return tarski(g, f, {{"x", x}, {"y", y}});
  };
  t["T2"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), u = G.pt();
    Vec4 y = G.between(x, u), z = G.maybe(G.between(y, u));
    return tarski(g, f, {{"x", x}, {"y", y}, {"z", z}, {"u", u}});
  };
  t["T3"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), y = G.pt();
    if (g.rng.chance(10)) y = x;
    Vec4 z = G.beyond(x, y), u = G.maybe(G.beyond(x, y));
    return tarski(g, f, {{"x", x}, {"y", y}, {"z", z}, {"u", u}});
  };
  t["T4"] = [](Gen& g, bool f) {
    Geo G{g};
    return tarski(g, f, {{"x", G.pt()}, {"y", G.pt()}});
  };
  t["T5"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), y = g.rng.chance(60) ? x : G.pt();
    return tarski(g, f, {{"x", x}, {"y", y}, {"z", G.pt()}});
  };
  t["T6"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt();
    Scalar d = g.pos();
    Vec4 y = G.at_dist(x, d), z = G.pt(), u = G.at_dist(z, d), v = G.pt();
    Vec4 w = g.rng.chance(85) ? G.at_dist(v, d) : G.pt();
    return tarski(g, f, {{"x", x}, {"y", y}, {"z", z}, {"u", u}, {"v", v}, {"w", w}});
  };
  t["T7"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), y = G.pt(), z = G.pt();
    Vec4 u = G.between(y, z), tt = G.maybe(G.between(x, u));
    return tarski(g, f, {{"t", tt}, {"x", x}, {"y", y}, {"z", z}, {"u", u}});
  };
  t["T8"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), tt = G.pt();
    Vec4 u = G.between(x, tt);
    Vec4 y = G.pt();
    Vec4 z = G.maybe(G.beyond(y, u));
    return tarski(g, f, {{"t", tt}, {"x", x}, {"y", y}, {"z", z}, {"u", u}});
  };
  t["T9"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), y = G.pt();
    if (g.rng.chance(8)) y = x;
    Vec4 z = G.beyond(x, y), u = G.pt();
    Mat4 rot = spatial_rotation(g.rng);
    if (g.rng.chance(50)) rot(1, 1) = -rot(1, 1), rot(2, 1) = -rot(2, 1), rot(3, 1) = -rot(3, 1);
    Vec4 sh = G.pt();
    auto m = [&](const Vec4& p) { return Vec4(mat_apply(rot, p) + sh); };
    Vec4 u2 = g.rng.chance(85) ? m(u) : G.pt();
    return tarski(g, f,
                  {{"x", x}, {"y", y}, {"z", z}, {"u", u}, {"x'", m(x)}, {"y'", m(y)},
                   {"z'", m(z)}, {"u'", u2}});
  };
  t["T10"] = [](Gen& g, bool f) {
    Geo G{g};
    Vec4 x = G.pt(), y = g.rng.chance(15) ? x : G.pt(), u = G.pt();
    Vec4 v = g.rng.chance(15) ? u : G.at_dist(u, g.pos());
    return tarski(g, f, {{"x", x}, {"y", y}, {"u", u}, {"v", v}});
  };
  t["T11"] = [](Gen& g, bool f) { return tarski(g, f, {}); };
  t["T12"] = [](Gen& g, bool f) {
    Geo G{g};
    static const long circle[][2] = {{1, 0}, {0, 1}, {-1, 0}, {3, 4}, {-4, 3}, {5, 12}, {-12, 5},
                                     {4, -3}, {-3, -4}, {8, 15}};
    Mat4 rot = spatial_rotation(g.rng);
    Vec4 c = G.pt();
    Scalar rad = g.pos();
    auto on_circle = [&](int k) {
      const long a = circle[k][0], b = circle[k][1];
      const long h = a == 0 || b == 0 ? 1 : (a * a + b * b == 25 ? 5 : (a * a + b * b == 169 ? 13 : 17));
      Vec4 v(q(0), q(a, h), q(b, h), q(0));
      return Vec4(c + mat_apply(rot, v) * rad);
    };
    std::vector<long> idx = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (long i = 9; i > 0; --i) std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(g.rng.uniform(0, i))]);
    Vec4 axis = mat_apply(rot, Vec4(q(0), q(0), q(0), q(1)));
    auto on_axis = [&]() { return Vec4(c + axis * g.r()); };
    Vec4 u = on_circle(static_cast<int>(idx[0])), v = on_circle(static_cast<int>(idx[1]));
    Vec4 w = g.rng.chance(90) ? on_circle(static_cast<int>(idx[2])) : G.pt();
    Vec4 x = on_axis(), y = on_axis(), z = g.rng.chance(85) ? on_axis() : G.pt();
    return tarski(g, f, {{"x", x}, {"y", y}, {"z", z}, {"u", u}, {"v", v}, {"w", w}});
  };
  auto continuity = [](bool with_ball, bool with_s) {
    return [with_ball, with_s](Gen& g, bool f) {
      Geo G{g};
      Vec4 base = G.pt(), dir = g.unit();
      auto on_l = [&]() { return Vec4(base + dir * g.r()); };
      Vec4 p = on_l(), qq = on_l();
      while (vec_equal(p, qq)) qq = on_l();
      std::vector<std::pair<std::string, Vec4>> pts = {{"p", p}, {"q", qq}};
      if (with_ball) {
        pts.emplace_back("c", g.rng.chance(70) ? on_l() : G.pt());
        pts.emplace_back("r", g.rng.chance(50) ? on_l() : G.pt());
      }
      if (with_s) pts.emplace_back("s", g.rng.chance(75) ? G.between(p, qq) : on_l());
      return tarski(g, f, pts);
    };
  };
  t["C1"] = continuity(false, false);
  t["C2"] = continuity(false, false);
  t["C3"] = continuity(true, false);
  t["C4"] = continuity(false, true);
  t["C5"] = continuity(true, false);

  t["AxSTL"] = [](Gen&, bool) { return Assignment{}; };
  t["AllSTL"] = t["AxSTL"];
  t["AxEv"] = [](Gen& g, bool) { return Assignment{{"al", g.any_signal()}}; };
  t["AxTime"] = [](Gen& g, bool) {
    Observer a = g.any_obs();
    Signal al = g.rng.chance(85) ? g.ev(g.on(a)) : g.any_signal();
    Signal be = g.rng.chance(20) ? al : g.rng.chance(85) ? g.ev(g.on(a)) : g.any_signal();
    return Assignment{{"a", a}, {"al", al}, {"be", be}};
  };
  t["AxOb!"] = [](Gen& g, bool) {
    Observer a = g.any_obs();
    Vec4 p1 = g.on(a), p2 = g.rng.chance(20) ? p1 : g.on(a);
    Signal al = g.rng.chance(50) ? g.ev(p1) : g.ray(p1);
    Signal be = g.rng.chance(50) ? g.ev(p2) : g.ray(p2);
    Observer b = a;
    const long k = g.rng.uniform(0, 3);
    if (k == 1 && !vec_equal(p1, p2))
      if (observer_allowed(g.kind, make_line(p1, Vec4(p2 - p1)))) b = g.obs(p1, Vec4(p2 - p1));
    if (k >= 2) b = g.obs(p1, g.odir(35));
    return Assignment{{"a", a}, {"b", b}, {"al", al}, {"be", be}};
  };
  t["AxIso"] = [](Gen& g, bool) {
    Observer a = g.any_obs(50);
    Signal be = g.rng.chance(85) ? g.ev(g.point()) : g.any_signal();
    return Assignment{{"a", a}, {"be", be}};
  };
  t["AxRR"] = [](Gen& g, bool) {
    return Assignment{{"a", g.any_obs()}, {"be", g.any_signal()}};
  };
  t["AxStIso"] = [](Gen& g, bool) {
    Vec4 d = g.odir(15);
    Observer a = g.obs(g.point(), d);
    Observer b = g.rng.chance(8) ? a : g.rng.chance(90) ? g.obs(g.point(), d) : g.any_obs();
    Scalar t1 = g.r(), t2 = t1 + g.pos();
    Signal al1 = g.ev(line_point(a.line, t1)), al2 = g.ev(line_point(a.line, t2));
    if (g.rng.chance(10)) std::swap(al1, al2);
    return Assignment{{"a", a}, {"b", b}, {"al1", al1}, {"al2", al2}};
  };
  t["AxPoInd"] = [](Gen& g, bool f) {
    Vec4 d = g.tdir();
    Observer a = g.obs(g.point(), d), b = g.obs(g.point(), d), a2 = g.obs(g.point(), d),
             b2 = g.obs(g.point(), d);
    if (g.rng.chance(25)) a2 = g.obs(Vec4(a.line.base + (b.line.base - a.line.base) * q(1, 2)), d);
    Scalar t1 = g.r(), t2 = t1 + g.pos();
    Vec4 p1 = line_point(a.line, t1), p2 = line_point(a.line, t2);
    auto sim_on = [&](const Observer& o, const Vec4& p) {
      Vec4 w = p - o.line.base;
      Scalar s = inner(w, d) / mnorm(d);
      return line_point(o.line, s);
    };
    Vec4 p1b = sim_on(a2, p1);
    Vec4 p2b = g.rng.chance(55) ? sim_on(a2, p2) : line_point(a2.line, line_param(a2.line, p1b) + g.pos());
    Signal al1 = g.ev(p1), al2 = g.ev(p2), al1b = g.ev(p1b), al2b = g.ev(p2b);
    auto tau = [&](const Observer& bb, const Signal& e1, const Signal& e2) {
      auto t = tau_geo(bb, e1, e2);
      return t ? *t : g.obs(g.point(), d);
    };
    Observer c = tau(b, al1, al2), c2 = tau(b2, al1b, al2b);
    (void)f;
    return Assignment{{"a", a},     {"b", b},       {"c", c},     {"a'", a2},     {"b'", b2},
                      {"c'", c2},   {"al1", al1},   {"al2", al2}, {"al1'", al1b}, {"al2'", al2b}};
  };
  t["AxTiInd"] = [](Gen& g, bool) {
    Vec4 d = g.tdir();
    Observer a = g.obs(g.point(), d), c = g.obs(g.point(), d);
    if (g.rng.chance(5)) c = a;
    auto radar = [&](const Scalar& t) {
      Vec4 p = line_point(a.line, t);
      Signal s1 = g.toward(p, c);
      Signal s2 = g.toward(s1.end, a);
      return std::array<Signal, 4>{g.ev(p), s1, s2, g.ev(s2.end)};
    };
    auto r1 = radar(g.r()), r2 = radar(g.r());
    auto tau = [&](const Signal& e1, const Signal& e2) {
      auto t = tau_geo(c, e1, e2);
      return t ? *t : g.obs(g.point(), d);
    };
    Observer dd = tau(r1[0], r1[3]);
    Observer d2 = g.rng.chance(90) ? tau(r2[0], r2[3]) : dd;
    return Assignment{{"a", a},       {"c", c},       {"d", dd},      {"d'", d2},
                      {"al1", r1[0]}, {"al2", r1[3]}, {"ga1", r1[1]}, {"ga2", r1[2]},
                      {"be1", r2[0]}, {"be2", r2[3]}, {"de1", r2[1]}, {"de2", r2[2]}};
  };
  t["AxUnOb"] = [](Gen& g, bool) {
    Observer d = g.any_obs(25);
    Signal al = g.ev(g.on(d)), be = g.rng.chance(10) ? al : g.ev(g.on(d));
    if (g.rng.chance(8)) be = g.any_signal();
    return Assignment{{"d", d}, {"al", al}, {"be", be}};
  };
  t["AxUnSi"] = [](Gen& g, bool) {
    Vec4 d = g.odir(10);
    Vec4 pa = g.point(), pc = g.point();
    Scalar s = g.rng.chance(15) ? Scalar(g.rng.uniform(0, 1)) : g.unit_interval();
    Vec4 pb = pa + (pc - pa) * s;
    Observer a = g.obs(pa, d), b = g.obs(pb, d), c = g.obs(pc, d);
    if (g.rng.chance(10)) b = g.obs(g.point(), d);
    Vec4 al = g.on(a);
    Signal ga_sig = g.toward(al, c);
    Vec4 ga = ga_sig.end;
    Vec4 be = g.on(b);
    if (g.rng.chance(60)) {
      Line ray_line = make_line(al, Vec4(ga - al));
      if (!is_zero_vec(Vec4(ga - al))) {
        Intersection in = lines_intersect(ray_line, b.line);
        if (in.kind == Meet::Point) be = in.point;
      }
    }
    return Assignment{{"a", a},       {"b", b},        {"c", c},
                      {"al", g.ev(al)}, {"be", g.ev(be)}, {"ga", g.ev(ga)}};
  };
  t["AxSim"] = [](Gen& g, bool) {
    if (g.ftl() && g.rng.chance(4)) {
      // Two non-null steps orthogonal to a spacelike line whose sum is null.
      Vec4 al = g.point(), s1(q(0), q(0), q(0), q(g.rng.uniform(1, 3)));
      Vec4 be(al + s1), ga(al + Vec4(q(5), q(0), q(3), q(4)));
      return Assignment{{"a", g.obs(g.point(), Vec4(q(0), q(1), q(0), q(0)))},
                        {"al", g.ev(al)}, {"be", g.ev(be)}, {"ga", g.ev(ga)}};
    }
    Observer a = g.any_obs(40);
    const Vec4& d = a.line.dir;
    auto sim_of = [&](const Vec4& p) {
      if (g.rng.chance(15)) return p;
      Vec4 w = perp<Scalar>(g.point(), d);
      return Vec4(p + w);
    };
    Vec4 al = g.point(), be = g.rng.chance(80) ? sim_of(al) : g.point();
    Vec4 ga = g.rng.chance(80) ? sim_of(be) : g.point();
    Signal sb = g.rng.chance(5) ? g.ray(be) : g.ev(be);
    return Assignment{{"a", a}, {"al", g.ev(al)}, {"be", sb}, {"ga", g.ev(ga)}};
  };
  t["AxLim"] = [](Gen& g, bool) {
    Observer a = g.any_obs(30);
    Scalar t1 = g.r();
    Vec4 p1 = line_point(a.line, t1);
    Scalar t2 = t1 + (g.rng.chance(50) ? g.pos() : -g.pos());
    Vec4 p2 = line_point(a.line, t2);
    Signal be{Vec4(p1 - g.ndir() * g.pos()), p1};
    if (g.rng.chance(10)) be = g.ev(p1);
    return Assignment{{"a", a}, {"be", be}, {"ga1", g.ev(p1)}, {"ga2", g.ev(p2)}};
  };
  t["AxFTL3"] = t["AxLim"];
  t["AxFTL1"] = [](Gen& g, bool) { return Assignment{{"a", g.any_obs(50)}}; };
  t["AxFTL4"] = [](Gen& g, bool) { return Assignment{{"a", g.any_obs(70)}}; };
  t["AxFTL2"] = [](Gen& g, bool) {
    Vec4 dir = g.odir(50);
    Vec4 pb = g.point(), pc = g.point();
    Vec4 pd = g.rng.chance(50) ? Vec4(pb + (pc - pb) * g.unit_interval()) : Vec4(pc + (pc - pb) * g.pos());
    Observer b = g.obs(pb, dir), c = g.obs(pc, dir), d = g.obs(pd, dir);
    Vec4 x1 = g.on(b), x2 = g.on(c);
    Observer a = g.any_obs();
    if (!vec_equal(x1, x2) && observer_allowed(g.kind, make_line(x1, Vec4(x2 - x1))) &&
        g.rng.chance(85))
      a = g.obs(x1, Vec4(x2 - x1));
    return Assignment{{"a", a}, {"b", b}, {"c", c}, {"d", d}};
  };

  // Lemmas.
  t["ParLemma"] = [](Gen& g, bool) {
    Vec4 d = g.odir(30);
    Observer a = g.obs(g.point(), d);
    Observer b = g.rng.chance(70) ? g.obs(g.point(), d) : g.any_obs();
    Observer c = g.rng.chance(70) ? g.obs(g.point(), d) : g.any_obs();
    return Assignment{{"a", a}, {"b", b}, {"c", c}};
  };
  t["AxLemma1"] = [](Gen& g, bool) {
    return Assignment{{"a", g.any_obs()}, {"ga", g.rng.chance(85) ? g.ev(g.point()) : g.any_signal()}};
  };
  t["STLLemma1"] = t["AxLemma1"];
  t["SimEventsLemma"] = [](Gen& g, bool) {
    return Assignment{{"a", g.any_obs()}, {"be", g.rng.chance(85) ? g.ev(g.point()) : g.any_signal()}};
  };
  t["UniquenessOfSignals"] = [](Gen& g, bool) {
    Signal al = g.any_signal();
    Signal be = g.rng.chance(40) ? al : g.rng.chance(50) ? g.ray(al.beg) : g.any_signal();
    return Assignment{{"al", al}, {"be", be}};
  };
  t["TwoEvents"] = [](Gen& g, bool) { return Assignment{{"a", g.any_obs(50)}}; };
  t["ObserversEvents"] = [](Gen& g, bool) {
    Observer a = g.any_obs();
    Observer b = a;
    const long k = g.rng.uniform(0, 3);
    if (k == 1) b = g.obs(g.point(), a.line.dir);
    if (k == 2) b = g.obs(g.on(a), g.odir(30));
    if (k == 3) b = g.any_obs();
    return Assignment{{"a", a}, {"b", b}};
  };
  t["STLEventsLemma"] = [](Gen& g, bool) {
    Observer a = g.any_obs(20);
    Vec4 p1 = g.on(a), p2 = g.rng.chance(40) ? p1 : g.on(a);
    return Assignment{{"a", a}, {"al1", g.ev(p1)}, {"al2", g.ev(p2)}};
  };
  t["AxLemma2"] = [](Gen& g, bool) {
    Vec4 d = g.tdir();
    Observer b = g.obs(g.point(), d);
    Observer a = g.obs(g.point(), d);
    Scalar t1 = g.r();
    Signal e1 = g.ev(line_point(a.line, t1)), e2 = g.ev(line_point(a.line, t1 + g.pos()));
    auto t = tau_geo(b, e1, e2);
    Observer c = t ? *t : g.any_obs();
    Observer c2 = g.rng.chance(60) ? c : g.rng.chance(50) ? g.obs(g.point(), d) : g.any_obs();
    return Assignment{{"c", c}, {"c'", c2}, {"b", b}, {"al1", e1}, {"al2", e2}};
  };
  t["DefEquivBw"] = [](Gen& g, bool) {
    Vec4 d = g.odir(40);
    Vec4 pa = g.point(), pc = g.point();
    Vec4 pb = g.rng.chance(60) ? Vec4(pa + (pc - pa) * g.unit_interval()) : g.point();
    return Assignment{{"a", g.obs(pa, d)}, {"b", g.obs(pb, d)}, {"c", g.obs(pc, d)}};
  };
  t["DefEquivEq"] = [](Gen& g, bool) {
    Vec4 d = g.odir(40);
    Geo G{g};
    Scalar r = g.pos();
    Vec4 pa = G.pt(), pb = G.at_dist(pa, r), pc = G.pt();
    Vec4 pd = g.rng.chance(60) ? G.at_dist(pc, r) : G.pt();
    auto lift = [&](const Vec4& p) { return g.obs(p, d); };
    return Assignment{{"a", lift(pa)}, {"b", lift(pb)}, {"c", lift(pc)}, {"d", lift(pd)}};
  };
  t["DefEquivSim"] = [](Gen& g, bool) {
    Observer a = g.any_obs(40);
    Vec4 al = g.point();
    Vec4 be = g.rng.chance(60) ? Vec4(al + perp<Scalar>(g.point(), a.line.dir)) : g.point();
    return Assignment{{"a", a}, {"al", g.ev(al)}, {"be", g.ev(be)}};
  };
  t["DefEquivDelta"] = [](Gen& g, bool) {
    Observer a = g.any_obs(40);
    Vec4 p0 = g.point(), p1 = g.point(), q0 = g.point();
    const Vec4& d = a.line.dir;
    Vec4 q1 = q0 + (p1 - p0);
    if (g.rng.chance(40)) q1 = q0 + perp<Scalar>(g.point(), d) + d * (inner<Scalar>(Vec4(p1 - p0), d) / mnorm(d));
    if (g.rng.chance(25)) q1 = g.point();
    return Assignment{{"a", a}, {"al0", g.ev(p0)}, {"al1", g.ev(p1)}, {"be0", g.ev(q0)}, {"be1", g.ev(q1)}};
  };
  t["DefEquivTau"] = [](Gen& g, bool) {
    Vec4 d = g.odir(25);
    Observer b = g.obs(g.point(), d);
    Observer a = g.obs(g.point(), d);
    Scalar t1 = g.r();
    Signal e1 = g.ev(line_point(a.line, t1)), e2 = g.ev(line_point(a.line, t1 + g.pos()));
    auto t = tau_geo(b, e1, e2);
    Observer c = t && g.rng.chance(60) ? *t : g.obs(g.point(), d);
    return Assignment{{"c", c}, {"b", b}, {"al1", e1}, {"al2", e2}};
  };
  t["DualCoro"] = [](Gen& g, bool) {
    Vec4 d = g.odir(80);
    Observer a = g.obs(g.point(), d);
    Vec4 off = g.spatial();
    if (g.rng.chance(60)) off = Vec4(off + d * g.r());
    Observer b = g.obs(Vec4(a.line.base + off), d);
    return Assignment{{"a", a}, {"b", b}};
  };
  return t;
}

std::string generator_key(const std::string& entry, bool& ftl_entry) {
  ftl_entry = false;
  std::string n = entry;
  for (const char* pre : {"AxGeo.", "AxGeoFTL."})
    if (n.rfind(pre, 0) == 0) {
      ftl_entry = std::string(pre) == "AxGeoFTL.";
      return n.substr(std::string(pre).size());
    }
  static const std::map<std::string, std::string> alias = {
      {"AxIsoFTL", "AxIso"},           {"AxStIsoFTL", "AxStIso"},
      {"AxPoIndFTL", "AxPoInd"},       {"AxTiIndFTL", "AxTiInd"},
      {"AxUnObFTL", "AxUnOb"},         {"AxUnSiFTL", "AxUnSi"},
      {"AxSimFTL", "AxSim"},           {"ParLemmaFTL", "ParLemma"},
      {"AxLemma1FTL", "AxLemma1"},     {"UniquenessOfSignalsFTL", "UniquenessOfSignals"},
      {"TwoEventsFTL", "TwoEvents"},   {"ObserversEventsFTL", "ObserversEvents"},
      {"STLLemma1FTL", "STLLemma1"},   {"STLEventsFTL", "STLEventsLemma"},
      {"AxLemma2FTL", "AxLemma2"},     {"SimEventsFTL", "SimEventsLemma"},
  };
  auto it = alias.find(n);
  if (it != alias.end()) {
    ftl_entry = true;
    return it->second;
  }
  return n;
}

long effective_bound(const Budget& b) {
  return static_cast<long>(std::min<std::uint64_t>(b.coordinate_bound, 12));
}

}  // namespace

PoincareMap random_isometry(Rng& rng, long bound) {
  static const long ts[][2] = {{0, 1}, {1, 5}, {-1, 5}, {1, 3}, {-1, 3}, {1, 2}, {-1, 2}, {2, 5}};
  Mat4 m = spatial_rotation(rng);
  auto& t = ts[rng.uniform(0, 7)];
  m = Mat4(boost(static_cast<int>(rng.uniform(1, 3)), q(t[0], t[1])) * m);
  m = Mat4(spatial_rotation(rng) * m);
  const long b = std::max<long>(1, bound);
  Vec4 tr(q(rng.uniform(-b, b)), q(rng.uniform(-b, b)), q(rng.uniform(-b, b)),
          q(rng.uniform(-b, b)));
  return PoincareMap{m, tr};
}

std::vector<std::string> configuration_patterns() {
  return {"parallel timelike pair",
          "three parallel timelike observers",
          "meeting observer pair",
          "skew observer pair",
          "event on worldline",
          "event off worldline",
          "null-connected event pair",
          "simultaneous event pair",
          "chronological event pair",
          "spacelike observer",
          "relatable spacelike pair",
          "non-relatable spacelike pair"};
}

Assignment generate_configuration(const std::string& pattern, ModelKind model,
                                  const Budget& budget, Rng& rng) {
  validate_budget(budget);
  Gen g{rng, model, effective_bound(budget)};
  Assignment a;
  const Vec4 e0 = g.e0();
  auto nonzero_spatial = [&] {
    Vec4 s = g.spatial();
    while (is_zero_vec(s)) s = g.spatial();
    return s;
  };
  if (pattern == "parallel timelike pair") {
    Vec4 p = g.point();
    a = {{"a", g.obs(p, e0)}, {"b", g.obs(Vec4(p + nonzero_spatial()), e0)}};
  } else if (pattern == "three parallel timelike observers") {
    a = {{"a", g.obs(g.spatial(), e0)}, {"b", g.obs(g.spatial(), e0)}, {"c", g.obs(g.spatial(), e0)}};
  } else if (pattern == "meeting observer pair") {
    Vec4 p = g.point();
    a = {{"a", g.obs(p, e0)}, {"b", g.obs(p, Vec4(q(1), q(1, 2), q(0), q(0)))}};
  } else if (pattern == "skew observer pair") {
    a = {{"a", g.obs(Vec4::Zero(), e0)},
         {"b", g.obs(Vec4(q(0), q(0), g.pos(), q(0)), Vec4(q(1), q(1, 2), q(0), q(0)))}};
  } else if (pattern == "event on worldline") {
    Observer o = g.obs(g.point(), g.tdir());
    a = {{"a", o}, {"e", g.ev(g.on(o))}};
  } else if (pattern == "event off worldline") {
    Observer o = g.obs(g.point(), e0);
    a = {{"a", o}, {"e", g.ev(Vec4(o.line.base + nonzero_spatial()))}};
  } else if (pattern == "null-connected event pair") {
    Vec4 p = g.point();
    const long m = rng.uniform(1, 4), n = rng.uniform(1, 4);
    Vec4 k(q(m * m + n * n), q(m * m - n * n), q(2 * m * n), q(0));
    a = {{"e1", g.ev(p)}, {"e2", g.ev(Vec4(p + k * g.pos()))}};
  } else if (pattern == "simultaneous event pair") {
    Vec4 p = g.point();
    a = {{"a", g.obs(g.point(), e0)}, {"e1", g.ev(p)}, {"e2", g.ev(Vec4(p + nonzero_spatial()))}};
  } else if (pattern == "chronological event pair") {
    Vec4 p = g.point();
    a = {{"e1", g.ev(p)}, {"e2", g.ev(Vec4(p + Vec4(g.pos(), q(0), q(0), q(0))))}};
  } else if (pattern == "spacelike observer" || pattern == "relatable spacelike pair" ||
             pattern == "non-relatable spacelike pair") {
    if (model != ModelKind::Ftl)
      throw GenerationError("pattern '" + pattern + "' needs the FTL model");
    Vec4 d(q(0), q(1), q(0), q(0));
    Vec4 p = g.point();
    a = {{"a", g.obs(p, d)}};
    if (pattern != "spacelike observer") {
      Scalar y = g.pos(), t = g.r();
      if (pattern == "relatable spacelike pair") t = y + g.pos() - q(1);
      Vec4 off(t, q(0), y, q(0));
      if (pattern == "relatable spacelike pair" && (t * t - y * y).sign() < 0) off(0) = y;
      if (pattern == "non-relatable spacelike pair") off(0) = y * g.unit_interval();
      a.emplace("b", g.obs(Vec4(p + off), d));
    }
  } else {
    throw GenerationError("unknown configuration pattern '" + pattern + "'");
  }
  return map_assignment(random_isometry(rng, g.B), a);
}

Assignment generate_instance(const std::string& entry, ModelKind model, const Budget& budget,
                             Rng& rng) {
  validate_budget(budget);
  bool ftl_entry = false;
  const std::string key = generator_key(entry, ftl_entry);
  auto& table = instance_table();
  auto it = table.find(key);
  if (it == table.end()) throw GenerationError("no instance generator for '" + entry + "'");
  Gen g{rng, model, effective_bound(budget)};
  Assignment rest = it->second(g, ftl_entry);
  return map_assignment(random_isometry(rng, g.B), rest);
}

Assignment generate_arguments(const std::string& predicate, const Definition& def, ModelKind model,
                              const Budget& budget, Rng& rng) {
  validate_budget(budget);
  Gen g{rng, model, effective_bound(budget)};
  Geo G{g};
  std::vector<Entity> v;
  const std::string& p = predicate;
  const bool ftl = model == ModelKind::Ftl;
  auto par_family = [&](std::size_t n, int ftl_pct, bool equal_dist) {
    Vec4 d = g.odir(ftl_pct);
    std::vector<Vec4> pts;
    if (equal_dist && n == 4) {
      Scalar r = g.pos();
      Vec4 a = G.pt(), c = G.pt();
      pts = {a, G.at_dist(a, r), c, g.rng.chance(60) ? G.at_dist(c, r) : G.pt()};
    } else {
      Vec4 a = G.pt(), c = G.pt();
      for (std::size_t i = 0; i < n; ++i)
        pts.push_back(i == 1 && g.rng.chance(60) ? Vec4(a + (c - a) * g.unit_interval())
                      : i == 2 ? c
                      : i == 0 ? a
                               : G.pt());
    }
    std::vector<Entity> out;
    // Spatial offsets in the rest frame of d: add a multiple of d to stay generic.
    for (auto& x : pts) out.push_back(g.obs(Vec4(x + d * g.r()), d));
    if (g.rng.chance(8)) out.back() = g.any_obs();
    return out;
  };
  if (p == "Ev") {
    v = {g.any_signal()};
  } else if (p == "M" || p == "Cop" || p == "Par" || p == "Rho" || p == "OP") {
    Observer a = g.any_obs(ftl ? 50 : 0);
    const long k = g.rng.uniform(0, 4);
    Observer b = g.any_obs(ftl ? 50 : 0);
    if (k == 0) b = g.obs(g.on(a), g.odir(40));
    if (k == 1) b = g.obs(g.point(), a.line.dir);
    if (k == 2) b = a;
    if (k == 3 && p == "OP" && a.line.cls == Causal::Spacelike) {
      Vec4 n = perp<Scalar>(g.ndir(), a.line.dir);
      if (mnorm(n).is_zero()) b = g.obs(Vec4(a.line.base + n), a.line.dir);
    }
    v = {a, b};
  } else if (p == "IsBeg" || p == "IsEnd") {
    Signal s = g.any_signal();
    Vec4 at = p == "IsBeg" ? s.beg : s.end;
    Signal e = g.rng.chance(60) ? g.ev(at) : g.rng.chance(50) ? g.ev(g.point()) : g.ray(at);
    v = {e, s};
  } else if (p == "L" || p == "l" || p == "Chron") {
    Vec4 a = g.point();
    const long k = g.rng.uniform(0, 3);
    Vec4 b = k == 0 ? Vec4(a + g.ndir() * g.r())
             : k == 1 ? Vec4(a + Vec4(g.r(), q(0), q(0), q(0)) + g.spatial() * q(1, 4 * g.B))
                      : g.point();
    Signal e1 = g.rng.chance(90) ? g.ev(a) : g.ray(a), e2 = g.ev(b);
    v = {e1, e2};
  } else if (p == "STL" || p == "Lightspeed" || p == "FTL") {
    v = {g.any_obs(ftl ? 50 : 0)};
  } else if (p == "TR") {
    Observer a = g.any_obs(ftl ? 40 : 0);
    const long k = g.rng.uniform(0, 2);
    Signal s = k == 0 ? g.ray(g.on(a)) : k == 1 ? g.from(a, g.point()) : g.any_signal();
    v = {a, s};
  } else if (p == "Bw" || p == "BwRho" || p == "BwFTL") {
    v = par_family(3, ftl ? 50 : 0, false);
  } else if (p == "Eq" || p == "EqRho" || p == "EqFTL") {
    v = par_family(4, ftl ? 50 : 0, true);
  } else if (p == "InBall" || p == "OutBall" || p == "InBallFTL" || p == "OutBallFTL") {
    auto f = par_family(3, ftl ? 30 : 0, false);
    if (g.rng.chance(10)) f[1] = f[0];
    if (g.rng.chance(10)) f[2] = f[0];
    v = {f[1], f[0], f[2]};
  } else if (p == "Sim" || p == "SimFTL") {
    Observer c = g.any_obs(ftl ? 40 : 0);
    Vec4 a = g.point();
    const long k = g.rng.uniform(0, 3);
    Signal e2 = k <= 1 ? g.ev(Vec4(a + perp<Scalar>(g.point(), c.line.dir)))
                : k == 2 ? g.ev(g.point())
                         : g.ray(a);
    Signal e1 = k == 3 && g.rng.chance(50) ? e2 : g.ev(a);
    v = {c, e1, e2};
  } else if (p == "Delta" || p == "DeltaFTL") {
    Observer a = g.any_obs(ftl ? 40 : 0);
    const Vec4& d = a.line.dir;
    Vec4 p0 = g.point(), p1 = g.point(), q0 = g.point();
    Vec4 q1 = g.rng.chance(50) ? Vec4(q0 + (p1 - p0) + perp<Scalar>(g.point(), d)) : g.point();
    if (g.rng.chance(15)) q1 = q0 - (p1 - p0);
    v = {a, g.ev(p0), g.ev(p1), g.ev(q0), g.ev(q1)};
  } else if (p == "Tau" || p == "TauFTL") {
    Vec4 d = g.odir(ftl ? 25 : 0);
    Observer b = g.obs(g.point(), d), a = g.obs(g.point(), d);
    Scalar t1 = g.r();
    Signal e1 = g.ev(line_point(a.line, t1)), e2 = g.ev(line_point(a.line, t1 + g.pos()));
    if (g.rng.chance(15)) std::swap(e1, e2);
    auto t = tau_geo(b, e1, e2);
    Observer c = t && g.rng.chance(60) ? *t : g.obs(g.point(), d);
    v = {c, b, e1, e2};
  } else if (p == "Dual") {
    Vec4 d = ftl ? g.sdir() : g.tdir();
    Observer a = g.obs(g.point(), d);
    Vec4 off = g.spatial();
    Observer b = g.obs(Vec4(a.line.base + off), d);
    std::optional<Observer> du = relatable_dual(a, b);
    Observer a2 = g.obs(g.point(), d);
    if (du && g.rng.chance(60)) a2 = *du;
    else if (du && g.rng.chance(50))
      a2 = g.obs(Vec4(du->line.base + g.spatial() * q(1, 7)), d);
    v = {a2, a, b};
  } else {
    throw GenerationError("no argument generator for predicate '" + p + "'");
  }
  if (v.size() != def.params.size())
    throw GenerationError("argument count mismatch for '" + p + "'");
  Assignment a;
  for (std::size_t i = 0; i < v.size(); ++i) a.emplace(def.params[i], v[i]);
  return map_assignment(random_isometry(rng, g.B), a);
}

std::optional<IsoCounterexample> iso_counterexample(const Observer& a) {
  if (a.line.cls != Causal::Spacelike) return std::nullopt;
  const Vec4& d = a.line.dir;
  const Vec4& o = a.line.base;
  // Events e on the far side of the line's light cone along a null direction n
  // with <n,d> != 0: one side reaches the line twice, the reflected side never.
  Vec4 e0(Scalar(1), Scalar(0), Scalar(0), Scalar(0));
  Vec4 w = perp<Scalar>(e0, d);  // timelike, orthogonal to d
  if (mnorm(w).sign() >= 0) return std::nullopt;
  for (long k = 1; k <= 4; ++k) {
    Vec4 lo = o - w * q(k), hi = o + w * q(k);
    auto n_lo = null_targets_on(a.line, lo);
    auto n_hi = null_targets_on(a.line, hi);
    auto pick = [&](const Vec4& ev, const std::vector<Vec4>& t) {
      std::vector<Vec4> fut;
      for (auto& x : t)
        if (!vec_equal(x, ev)) fut.push_back(x);
      return fut;
    };
    auto fl = pick(lo, n_lo), fh = pick(hi, n_hi);
    if (fl.size() == 2 && fh.empty()) return IsoCounterexample{event_at(hi), event_at(lo)};
    if (fh.size() == 2 && fl.empty()) return IsoCounterexample{event_at(lo), event_at(hi)};
  }
  return std::nullopt;
}

}  // namespace relcheck
