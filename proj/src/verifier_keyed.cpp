#include <algorithm>

#include "verifier_internal.hpp"

namespace relcheck::detail {

namespace {

Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }

// Observers of one parallel class, represented by their point on the
// hyperplane through the origin orthogonal to the class direction.
struct ClassGeo {
  Vec4 d;
  Scalar dd;
  explicit ClassGeo(const Vec4& dir) : d(dir), dd(mnorm(dir)) {}
  Vec4 rep(const Observer& o) const { return o.line.base - d * (inner(o.line.base, d) / dd); }
  Observer obs(const Vec4& p) const { return Observer{make_line(p, d)}; }
};

std::map<std::string, Provider>& providers() {
  static std::map<std::string, Provider> m;
  return m;
}

std::map<std::string, BlockDecider>& deciders() {
  static std::map<std::string, BlockDecider> m;
  return m;
}

void both_systems(const std::string& tarski, const std::string& var, const Provider& p) {
  providers()["AxGeo." + tarski + "/" + var] = p;
  providers()["AxGeoFTL." + tarski + "/" + var] = p;
}

void both_systems(const std::string& tarski, const std::string& var, const BlockDecider& d) {
  deciders()["AxGeo." + tarski + "/" + var] = d;
  deciders()["AxGeoFTL." + tarski + "/" + var] = d;
}

Candidates inexact(std::vector<Entity> v) {
  Candidates c;
  c.values = std::move(v);
  return c;
}

// Evaluates the block body with every block variable bound, in order.
Res with_bindings(Evaluator& ev, const Block& b, const std::vector<Entity>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) ev.push(b.vars[i].first, vals[i]);
  Res r = ev.eval(*b.body);
  for (std::size_t i = 0; i < vals.size(); ++i) ev.pop();
  Bindings w;
  for (std::size_t i = 0; i < vals.size(); ++i) w.push_back(Binding{b.vars[i].first, vals[i]});
  w.insert(w.end(), r.w.begin(), r.w.end());
  r.w = std::move(w);
  return r;
}

// Copies, since pushing bindings may move the environment.
std::optional<Observer> obs_of(Evaluator& ev, const std::string& name) {
  const Observer* o = ev.observer(name);
  if (!o) return std::nullopt;
  return *o;
}

std::optional<Signal> sig_of(Evaluator& ev, const std::string& name) {
  const Signal* s = ev.signal(name);
  if (!s) return std::nullopt;
  return *s;
}

std::optional<Observer> timelike_class(Evaluator& ev, const std::string& name) {
  auto a = obs_of(ev, name);
  if (!a || a->line.cls != Causal::Timelike) return std::nullopt;
  return a;
}

// Coefficient k with p - o = k (r - o), assuming collinearity; 0 when r = o.
Scalar ratio(const Vec4& o, const Vec4& p, const Vec4& r) {
  Vec4 u = r - o;
  Scalar uu = inner(u, u);
  if (uu.is_zero()) return Scalar(0);
  return inner<Scalar>(Vec4(p - o), u) / uu;
}

// ------------------------------------------------------------ Tarski witnesses

std::optional<Candidates> pasch_point(Evaluator& ev, const Block&, const std::string&,
                                      const std::set<std::string>&) {
  auto a = timelike_class(ev, "a");
  if (!a) return std::nullopt;
  ClassGeo g(a->line.dir);
  auto x = obs_of(ev, "x"), y = obs_of(ev, "y"), z = obs_of(ev, "z"),
                 t = obs_of(ev, "t"), u = obs_of(ev, "u");
  if (!x || !y || !z || !t || !u) return std::nullopt;
  Vec4 X = g.rep(*x), Y = g.rep(*y), Z = g.rep(*z), T = g.rep(*t), U = g.rep(*u);
  // t = x + l (u - x), u = y + m (z - y)
  Scalar l = ratio(X, T, U), m = ratio(Y, U, Z);
  Scalar beta = Scalar(1) - l * m;
  std::vector<Entity> out;
  if (beta.is_zero()) {
    out.push_back(*x);
  } else {
    Scalar alpha = l * (Scalar(1) - m) / beta;
    out.push_back(g.obs(Vec4(X + (Y - X) * alpha)));
  }
  return inexact(out);
}

std::optional<Candidates> outer_pasch(Evaluator& ev, const Block&, const std::string& var,
                                      const std::set<std::string>&) {
  auto a = timelike_class(ev, "a");
  if (!a) return std::nullopt;
  ClassGeo g(a->line.dir);
  auto x = obs_of(ev, "x"), y = obs_of(ev, "y"), z = obs_of(ev, "z"),
                 t = obs_of(ev, "t"), u = obs_of(ev, "u");
  if (!x || !y || !z || !t || !u) return std::nullopt;
  Vec4 X = g.rep(*x), Y = g.rep(*y), Z = g.rep(*z), T = g.rep(*t), U = g.rep(*u);
  // u = x + l (t - x) with l > 0, u = y + m (z - y).
  Scalar l = ratio(X, U, T), m = ratio(Y, U, Z);
  if (l.sign() <= 0) return std::nullopt;
  Scalar lo = std::max(Scalar(0), Scalar(1) - m / l);
  Scalar hi = std::min(Scalar(1), (Scalar(1) - m) / l);
  Scalar s = (lo + hi) / Scalar(2);
  Scalar alpha = s == Scalar(1) ? Scalar(1) : m / (l * (Scalar(1) - s));
  Scalar beta = s.is_zero() ? Scalar(1) : (Scalar(1) - m) / (l * s);
  Vec4 v = X + (Z - X) * alpha, w = X + (Y - X) * beta;
  return inexact({g.obs(var == "v" ? v : w)});
}

std::optional<Candidates> segment_construction(Evaluator& ev, const Block&, const std::string&,
                                               const std::set<std::string>&) {
  auto a = timelike_class(ev, "a");
  if (!a) return std::nullopt;
  ClassGeo g(a->line.dir);
  auto x = obs_of(ev, "x"), y = obs_of(ev, "y"), u = obs_of(ev, "u"),
                 v = obs_of(ev, "v");
  if (!x || !y || !u || !v) return std::nullopt;
  Vec4 X = g.rep(*x), Y = g.rep(*y), U = g.rep(*u), V = g.rep(*v);
  Vec4 xy = Y - X, uv = V - U;
  if (is_zero_vec(xy)) return inexact({g.obs(Vec4(Y + uv))});
  Scalar k = sqrt_nonneg(inner(uv, uv) / inner(xy, xy));
  return inexact({g.obs(Vec4(Y + xy * k))});
}

// Three points and two mirror images across their plane.
std::optional<Res> lower_dimension(Evaluator& ev, const Block& b) {
  auto a = timelike_class(ev, "a");
  if (!a || b.vars.size() != 5) return std::nullopt;
  ClassGeo g(a->line.dir);
  std::vector<Vec4> basis;
  for (const Vec4& s : spacelike_directions()) {
    Vec4 v = perp<Scalar>(s, g.d);
    for (auto& e : basis) v = v - e * (inner(v, e) / inner(e, e));
    if (!is_zero_vec(v)) basis.push_back(v);
    if (basis.size() == 3) break;
  }
  if (basis.size() < 3) return std::nullopt;
  Vec4 o = g.rep(*a);
  std::vector<Entity> vals = {g.obs(Vec4(o + basis[0])), g.obs(Vec4(o + basis[1])),
                              g.obs(Vec4(o - basis[0])), g.obs(Vec4(o + basis[2])),
                              g.obs(Vec4(o - basis[2]))};
  Res r = with_bindings(ev, b, vals);
  if (r.t != Truth::True) return std::nullopt;
  return r;
}

// ------------------------------------------------------------ continuity

// Both sets of a continuity instance lie on the line through p and q; their
// membership only changes at a few parameters along that line.
struct Continuity {
  int instance = 0;
  bool ftl = false;
  ClassGeo g{Vec4(Scalar(1), Scalar(0), Scalar(0), Scalar(0))};
  Vec4 P, D;  // point(t) = P + t D
  std::optional<Observer> p, qq, c, r, s;
  std::vector<Scalar> cuts;

  Observer at(const Scalar& t) const { return g.obs(Vec4(P + D * t)); }
  bool bw(const Observer& x, const Observer& y, const Observer& z) const {
    return ftl ? bw_ftl(x, y, z) : bw_geo(x, y, z);
  }
  bool same(const Observer& x, const Observer& y) const { return same_line(x.line, y.line); }
  bool in_x(const Observer& x) const {
    switch (instance) {
      case 1: return bw(*p, x, *qq);
      case 2: return bw(*p, x, *qq) && !same(x, *qq);
      case 3: return bw(*p, x, *qq) && in_ball(x, *c, *r);
      case 4: return bw(*p, x, *s);
      default: return bw(*p, x, *qq) && !out_ball(x, *c, *r);
    }
  }
  bool in_y(const Observer& y) const {
    switch (instance) {
      case 1: return bw(*p, *qq, y) && !same(y, *qq);
      case 2: return bw(*p, *qq, y);
      case 3: return bw(*p, y, *qq) && !in_ball(y, *c, *r);
      case 4: return bw(*s, y, *qq);
      default: return bw(*p, y, *qq) && out_ball(y, *c, *r);
    }
  }
  Scalar param(const Vec4& x) const { return inner<Scalar>(Vec4(x - P), D) / inner(D, D); }
  bool on(const Vec4& x) const {
    Vec4 w = x - P;
    return is_zero_vec(Vec4(w - D * param(x)));
  }
};

std::optional<Continuity> continuity(Evaluator& ev) {
  Continuity k;
  auto a = timelike_class(ev, "a");
  k.p = obs_of(ev, "p");
  k.qq = obs_of(ev, "q");
  if (!a || !k.p || !k.qq) return std::nullopt;
  k.g = ClassGeo(a->line.dir);
  if (!parallel(*k.p, *a) || !parallel(*k.qq, *a)) return std::nullopt;
  k.P = k.g.rep(*k.p);
  k.D = k.g.rep(*k.qq) - k.P;
  if (is_zero_vec(k.D)) return std::nullopt;
  k.cuts = {Scalar(0), Scalar(1)};
  k.c = obs_of(ev, "c");
  k.r = obs_of(ev, "r");
  k.s = obs_of(ev, "s");
  return k;
}

bool setup_instance(Continuity& k, int instance, bool ftl) {
  k.instance = instance;
  k.ftl = ftl;
  if (instance == 3 || instance == 5) {
    if (!k.c || !k.r || !parallel(*k.c, *k.p) || !parallel(*k.r, *k.p)) return false;
    Vec4 C = k.g.rep(*k.c);
    Scalar R2 = inner<Scalar>(Vec4(k.g.rep(*k.r) - C), Vec4(k.g.rep(*k.r) - C));
    Vec4 o = k.P - C;
    for (const Scalar& t : quadratic_roots(inner(k.D, k.D), Scalar(2) * inner(o, k.D),
                                           inner(o, o) - R2))
      k.cuts.push_back(t);
  }
  if (instance == 4) {
    if (!k.s || !parallel(*k.s, *k.p)) return false;
    Vec4 S = k.g.rep(*k.s);
    if (!k.on(S)) return false;
    k.cuts.push_back(k.param(S));
  }
  return true;
}

struct SetShape {
  bool empty = true;
  std::optional<Scalar> inf, sup;  // nullopt: unbounded
};

// Parameters that represent every order type relative to the cuts: the cuts
// themselves, two points inside each gap and one beyond each end.
std::vector<Scalar> sample_params(std::vector<Scalar> cuts) {
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Scalar> out;
  out.push_back(cuts.front() - Scalar(2));
  out.push_back(cuts.front() - Scalar(1));
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    out.push_back(cuts[i]);
    if (i + 1 < cuts.size()) {
      Scalar w = cuts[i + 1] - cuts[i];
      out.push_back(cuts[i] + w / Scalar(3));
      out.push_back(cuts[i] + w * q(2, 3));
    }
  }
  out.push_back(cuts.back() + Scalar(1));
  out.push_back(cuts.back() + Scalar(2));
  return out;
}

SetShape shape(const Continuity& k, bool x_set) {
  std::vector<Scalar> cuts = k.cuts;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto member = [&](const Scalar& t) { return x_set ? k.in_x(k.at(t)) : k.in_y(k.at(t)); };
  SetShape s;
  // Pieces: (-inf, c0), c0, (c0, c1), ..., ck, (ck, inf).
  std::vector<std::pair<std::optional<Scalar>, std::optional<Scalar>>> pieces;
  std::vector<Scalar> reps;
  pieces.push_back({std::nullopt, cuts.front()});
  reps.push_back(cuts.front() - Scalar(1));
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    pieces.push_back({cuts[i], cuts[i]});
    reps.push_back(cuts[i]);
    std::optional<Scalar> hi;
    if (i + 1 < cuts.size()) hi = cuts[i + 1];
    pieces.push_back({cuts[i], hi});
    reps.push_back(hi ? (cuts[i] + *hi) / Scalar(2) : cuts[i] + Scalar(1));
  }
  bool first = true;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!member(reps[i])) continue;
    if (first) s.inf = pieces[i].first;
    first = false;
    s.sup = pieces[i].second;
    s.empty = false;
  }
  return s;
}

// Decides the inner universal over x and y by the finite set of order types.
std::optional<Res> continuity_forall(Evaluator& ev, const Block& b, int instance, bool ftl) {
  auto k = continuity(ev);
  if (!k || !setup_instance(*k, instance, ftl)) return std::nullopt;
  auto z = obs_of(ev, "z");
  const bool inner_z = z.has_value();
  auto pivot = inner_z ? z : obs_of(ev, "u");
  if (!pivot || b.vars.size() != 2) return std::nullopt;
  std::vector<Scalar> cuts = k->cuts;
  if (parallel(*pivot, *k->p)) {
    Vec4 pv = k->g.rep(*pivot);
    if (k->on(pv)) cuts.push_back(k->param(pv));
  }
  std::vector<Observer> xs, ys;
  for (const Scalar& t : sample_params(cuts)) {
    Observer o = k->at(t);
    if (k->in_x(o)) xs.push_back(o);
    if (k->in_y(o)) ys.push_back(o);
  }
  for (auto& x : xs)
    for (auto& y : ys) {
      const bool ok = inner_z ? k->bw(*pivot, x, y) : k->bw(x, *pivot, y);
      if (!ok) {
        Res r = with_bindings(ev, b, {x, y});
        if (r.t == Truth::False) return r;
        return std::nullopt;
      }
    }
  return Res{Truth::True, {}, {}};
}

std::optional<Res> continuity_exists(Evaluator& ev, const Block& b, int instance, bool ftl) {
  auto k = continuity(ev);
  if (!k || !setup_instance(*k, instance, ftl) || b.vars.size() != 1) return std::nullopt;
  SetShape X = shape(*k, true), Y = shape(*k, false);
  std::vector<Scalar> ts;
  auto add = [&](const std::optional<Scalar>& v) {
    if (v) ts.push_back(*v);
  };
  add(X.inf);
  add(X.sup);
  if (b.vars[0].first == "u") {
    add(Y.inf);
    add(Y.sup);
  }
  ts.push_back(Scalar(0));
  bool unknown = false;
  std::string why;
  for (const Scalar& t : ts) {
    Res r = with_bindings(ev, b, {k->at(t)});
    if (r.t == Truth::True) return r;
    if (r.t == Truth::Unknown) {
      unknown = true;
      why = r.why;
    }
  }
  if (unknown) return Res{Truth::Unknown, {}, why};
  return Res{Truth::False, {}, {}};
}

void register_continuity() {
  for (int i = 1; i <= 5; ++i) {
    const std::string n = "C" + std::to_string(i);
    for (bool ftl : {false, true}) {
      const std::string entry = (ftl ? "AxGeoFTL." : "AxGeo.") + n;
      deciders()[entry + "/x"] = [i, ftl](Evaluator& ev, const Block& b) {
        return continuity_forall(ev, b, i, ftl);
      };
      for (const char* v : {"/z", "/u"})
        deciders()[entry + v] = [i, ftl](Evaluator& ev, const Block& b) {
          return continuity_exists(ev, b, i, ftl);
        };
    }
  }
}

// ------------------------------------------------------------ other axioms

// Parallel observers share their causal class.
std::optional<Res> stl_closed_under_par(Evaluator&, const Block& b) {
  if (b.vars.size() != 2) return std::nullopt;
  return Res{Truth::True, {}, {}};
}

std::optional<Candidates> midpoint_event(Evaluator& ev, const Block&, const std::string&,
                                         const std::set<std::string>&) {
  auto al = sig_of(ev, "al"), be = sig_of(ev, "be");
  if (!al || !be || !is_event(*al) || !is_event(*be)) return std::nullopt;
  Candidates c = inexact({event_at(Vec4((al->beg + be->beg) * q(1, 2)))});
  c.exact = true;
  return c;
}

// A null vector orthogonal to the spacelike h.
Vec4 null_orthogonal(const Vec4& h) {
  Vec4 u1 = perp<Scalar>(Vec4(q(1), q(0), q(0), q(0)), h), u2;
  for (const Vec4& s : spacelike_directions()) {
    u2 = perp<Scalar>(perp<Scalar>(s, h), u1);
    if (!is_zero_vec(u2)) break;
  }
  return Vec4(u1 * sqrt_nonneg(mnorm(u2)) + u2 * sqrt_nonneg(Scalar(-mnorm(u1))));
}

// Lines through al, ga and be with a common direction are the only instances;
// the midpoint makes every slower-than-light direction satisfy the body.
// Faster-than-light directions h + n with n null and orthogonal to the half gap h
// collapse the duration comparison whenever h is spacelike.
std::optional<Res> unob_forall(Evaluator& ev, const Block& b) {
  auto al = sig_of(ev, "al"), be = sig_of(ev, "be"), ga = sig_of(ev, "ga");
  if (!al || !be || !ga || b.vars.size() != 3) return std::nullopt;
  if (!is_event(*al) || !is_event(*be) || !is_event(*ga)) return std::nullopt;
  const Vec4 h((be->beg - al->beg) * q(1, 2));
  std::vector<Vec4> dirs = timelike_directions();
  if (ev.ftl()) {
    if (mnorm(h).sign() > 0) dirs.insert(dirs.begin(), Vec4(h + null_orthogonal(h)));
    for (auto& s : spacelike_directions()) dirs.push_back(s);
  }
  for (const Vec4& w : dirs) {
    if (mnorm(w).sign() == 0) continue;
    Observer a{make_line(al->beg, w)}, bb{make_line(be->beg, w)}, c{make_line(ga->beg, w)};
    Res r = with_bindings(ev, b, {a, bb, c});
    if (r.t == Truth::False) return r;
  }
  const bool midpoint = vec_equal(Vec4(ga->beg - al->beg), h);
  if (midpoint && (!ev.ftl() || mnorm(h).sign() <= 0)) return Res{Truth::True, {}, {}};
  return std::nullopt;
}

// ------------------------------------------------------------ definitions

std::optional<Res> bind_named(Evaluator& ev, const Block& b,
                              const std::map<std::string, Entity>& named) {
  std::vector<Entity> vals;
  for (const auto& v : b.vars) {
    auto it = named.find(v.first);
    if (it == named.end()) return std::nullopt;
    vals.push_back(it->second);
  }
  return with_bindings(ev, b, vals);
}

std::optional<Vec4> past_null(const Line& l, const Vec4& p) {
  auto v = null_sources_on(l, p);
  if (v.empty()) return std::nullopt;
  return v.front();
}

std::optional<Vec4> future_null(const Line& l, const Vec4& p) {
  auto v = null_targets_on(l, p);
  if (v.empty()) return std::nullopt;
  return v.back();
}

bool all_events(std::initializer_list<const std::optional<Signal>*> xs) {
  for (auto* x : xs)
    if (!x->has_value() || !is_event(**x)) return false;
  return true;
}

// An offset orthogonal to the non-null d, of the opposite causal type, whose
// squared length is minus a quarter of the squared separation of x and y on d.
std::optional<Vec4> half_gap_offset(const Vec4& d, const Vec4& x, const Vec4& y) {
  const bool timelike = mnorm(d).sign() < 0;
  Vec4 w;
  bool found = false;
  for (const Vec4& s : timelike ? spacelike_directions() : timelike_directions()) {
    w = perp<Scalar>(s, d);
    if (!is_zero_vec(w)) {
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  const Scalar k2 = -mnorm<Scalar>(Vec4(y - x)) / (Scalar(4) * mnorm(w));
  return Vec4(w * sqrt_nonneg(k2));
}

// Events simultaneous in the class frame with equal distance to the observer
// through their midpoint; any other witness has the same separation.
std::optional<Candidates> diamond_observer(Evaluator& ev, const Block&, const std::string&,
                                           const std::set<std::string>&) {
  auto c = obs_of(ev, "c");
  auto e1 = sig_of(ev, "be"), e2 = sig_of(ev, "be'");
  if (!c || !e1 || !e2) return std::nullopt;
  Candidates k;
  k.exact = c->line.cls == Causal::Timelike;
  if (!is_event(*e1) || !is_event(*e2)) {
    k.values.push_back(*c);
    return k;
  }
  const Vec4 d = c->line.dir, delta = e2->beg - e1->beg;
  if (c->line.cls == Causal::Spacelike) {
    // Both events must lie on a line parallel to c that meets their common
    // light cone twice, which needs a timelike offset orthogonal to d.
    k.exact = true;
    if (!inner(delta, d).is_zero() || mnorm(delta).is_zero()) {
      k.values.push_back(*c);
      return k;
    }
    for (const Vec4& t : timelike_directions()) {
      Vec4 v = perp<Scalar>(t, d);
      const Scalar vd = inner(v, delta);
      if (vd.is_zero()) continue;
      auto o = try_observer(ev.kind(), Vec4(e1->beg + v * (mnorm(delta) / (Scalar(2) * vd))), d);
      if (!o) return std::nullopt;
      k.values.push_back(*o);
      return k;
    }
    return std::nullopt;
  }
  auto o = try_observer(ev.kind(), Vec4((e1->beg + e2->beg) * q(1, 2)), d);
  if (!o) return std::nullopt;
  k.values.push_back(*o);
  return k;
}

// Non-coplanar lines admit no such pair: distinct meeting points put both
// lines into the plane of c and d, and shared ones force ga onto a or b.
std::optional<Res> coplanar_witnesses(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a"), bb = obs_of(ev, "b");
  if (!a || !bb || b.vars.size() != 2) return std::nullopt;
  if (!coplanar(*a, *bb)) return Res{Truth::False, {}, {}};
  const Vec4 u = a->line.dir;
  Vec4 origin = a->line.base, w, x;
  if (!same_direction(a->line, bb->line)) {
    Intersection m = lines_intersect(a->line, bb->line);
    if (m.kind != Meet::Point) return std::nullopt;
    origin = m.point;
    w = bb->line.dir;
    x = origin + u + w;
  } else if (!same_line(a->line, bb->line)) {
    w = bb->line.base - origin;
    x = origin + u + w * q(1, 2);
  } else {
    bool found = false;
    for (const Vec4& s : spacelike_directions())
      if (!proportional<Scalar>(s, u)) {
        w = s;
        found = true;
        break;
      }
    if (!found) return std::nullopt;
    x = origin + w;
  }
  std::vector<Observer> lines;
  for (int k = 3; k >= -14; --k) {
    for (long sign : {1L, -1L}) {
      Vec4 dir = u + w * (k >= 0 ? q(sign << k) : q(sign, 1L << -k));
      if (proportional<Scalar>(dir, u) || proportional<Scalar>(dir, w)) continue;
      auto o = try_observer(ev.kind(), x, dir);
      if (!o) continue;
      if (std::none_of(lines.begin(), lines.end(),
                       [&](const Observer& l) { return same_line(l.line, o->line); }))
        lines.push_back(*o);
      if (lines.size() == 2) break;
    }
    if (lines.size() == 2) break;
  }
  if (lines.size() < 2) return std::nullopt;
  Res r = with_bindings(ev, b, {lines[0], lines[1]});
  if (r.t != Truth::True) return std::nullopt;
  return r;
}

// Timelike observers receive exactly one signal from each event; spacelike
// ones miss some events entirely.
std::optional<Res> unique_reception(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a");
  if (!a || b.vars.size() != 1) return std::nullopt;
  if (a->line.cls == Causal::Spacelike) {
    auto ce = iso_counterexample(*a);
    if (!ce) return std::nullopt;
    for (const Signal& s : {ce->no_signal, ce->two_signals}) {
      Res r = with_bindings(ev, b, {s});
      if (r.t == Truth::False) return r;
    }
    return std::nullopt;
  }
  std::vector<Signal> probes = {event_at(a->line.base)};
  for (const Vec4& s : spacelike_directions()) probes.push_back(event_at(Vec4(a->line.base + s)));
  for (const Signal& s : probes) {
    Res r = with_bindings(ev, b, {s});
    if (r.t == Truth::False) return r;
  }
  return Res{Truth::True, {}, {}};
}

// Radar construction: be on b, its past and future light echoes on a, their
// simultaneous partners on c, and the mirror observer e halfway between a and c.
std::optional<Res> radar_equidistance(Evaluator& ev, const Block& b) {
  auto a = timelike_class(ev, "a");
  auto bb = obs_of(ev, "b"), c = obs_of(ev, "c"), d = obs_of(ev, "d");
  if (!a || !bb || !c || !d) return std::nullopt;
  for (const auto& o : {*bb, *c, *d})
    if (!parallel(o, *a)) return std::nullopt;
  const Vec4 dir = a->line.dir;
  const Vec4 be = bb->line.base;
  auto al1 = past_null(a->line, be), al2 = future_null(a->line, be);
  if (!al1 || !al2) return std::nullopt;
  const Vec4 ga1 = sim_projection(c->line, *al1), ga2 = sim_projection(c->line, *al2);
  const Vec4 de = sim_projection(d->line, Vec4((ga1 + ga2) * q(1, 2)));
  const Line e = make_line(Vec4((*al1 + ga1) * q(1, 2)), dir);
  auto ep1 = past_null(e, *al1), ep1f = future_null(e, *al1);
  auto ep2 = past_null(e, *al2), ep2f = future_null(e, *al2);
  if (!ep1 || !ep1f || !ep2 || !ep2f) return std::nullopt;
  return bind_named(ev, b,
                    {{"e", Observer{e}},
                     {"al1", event_at(*al1)},
                     {"al2", event_at(*al2)},
                     {"be", event_at(be)},
                     {"ga1", event_at(ga1)},
                     {"ga2", event_at(ga2)},
                     {"de", event_at(de)},
                     {"ep1", event_at(*ep1)},
                     {"ep1'", event_at(*ep1f)},
                     {"ep2", event_at(*ep2)},
                     {"ep2'", event_at(*ep2f)}});
}

// Projections onto a are unique; b sits at half the frame time of the first
// pair, which any witness must match.
std::optional<Res> duration_frame(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a");
  auto al0 = sig_of(ev, "al0"), al1 = sig_of(ev, "al1"), be0 = sig_of(ev, "be0"),
       be1 = sig_of(ev, "be1");
  if (!a || a->line.cls == Causal::Lightlike || !all_events({&al0, &al1, &be0, &be1}))
    return std::nullopt;
  const Vec4 p0 = sim_projection(a->line, al0->beg), p1 = sim_projection(a->line, al1->beg);
  const Vec4 q0 = sim_projection(a->line, be0->beg), q1 = sim_projection(a->line, be1->beg);
  Observer other = *a;
  if (!vec_equal(p0, p1)) {
    auto off = half_gap_offset(a->line.dir, p0, p1);
    if (!off) return std::nullopt;
    other = Observer{make_line(Vec4(a->line.base + *off), a->line.dir)};
  }
  return bind_named(ev, b,
                    {{"b", other},
                     {"al0'", event_at(p0)},
                     {"al1'", event_at(p1)},
                     {"be0'", event_at(q0)},
                     {"be1'", event_at(q1)}});
}

std::optional<Res> duration_echo(Evaluator& ev, const Block& b) {
  auto bb = obs_of(ev, "b");
  auto p0 = sig_of(ev, "al0'"), p1 = sig_of(ev, "al1'"), q0 = sig_of(ev, "be0'"),
       q1 = sig_of(ev, "be1'");
  if (!bb || bb->line.cls == Causal::Lightlike || !all_events({&p0, &p1, &q0, &q1}))
    return std::nullopt;
  const Vec4 al2 = sim_projection(bb->line, Vec4((p0->beg + p1->beg) * q(1, 2)));
  const Vec4 be2 = sim_projection(bb->line, Vec4((q0->beg + q1->beg) * q(1, 2)));
  return bind_named(ev, b, {{"al2", event_at(al2)}, {"be2", event_at(be2)}});
}

// The point on the ray from c through x at distance |cr|.
std::optional<Candidates> ball_boundary(Evaluator& ev, const Block&, const std::string&,
                                        const std::set<std::string>&) {
  auto c = timelike_class(ev, "c");
  auto x = obs_of(ev, "x"), r = obs_of(ev, "r");
  if (!c || !x || !r) return std::nullopt;
  Candidates k;
  k.exact = true;
  if (!parallel(*x, *c) || !parallel(*r, *c)) {
    k.values.push_back(*c);
    return k;
  }
  ClassGeo g(c->line.dir);
  const Vec4 C = g.rep(*c), X = g.rep(*x), R = g.rep(*r);
  if (vec_equal(C, X)) {
    k.values.push_back(*r);
    return k;
  }
  const Scalar f = sqrt_nonneg(qnorm<Scalar>(Vec4(R - C), g.d) / qnorm<Scalar>(Vec4(X - C), g.d));
  k.values.push_back(g.obs(Vec4(C + (X - C) * f)));
  return k;
}

// For spacelike c the witness is c, r, or X rescaled to the squared radius
// with either orientation, or X itself when both are null.
std::optional<Candidates> ball_boundary_ftl(Evaluator& ev, const Block& b, const std::string& v,
                                            const std::set<std::string>& used) {
  auto c = obs_of(ev, "c");
  if (!c || c->line.cls != Causal::Spacelike) return ball_boundary(ev, b, v, used);
  auto x = obs_of(ev, "x"), r = obs_of(ev, "r");
  if (!x || !r) return std::nullopt;
  Candidates k;
  k.exact = true;
  k.values.push_back(*c);
  if (!parallel(*x, *c) || !parallel(*r, *c)) return k;
  k.values.push_back(*r);
  ClassGeo g(c->line.dir);
  const Vec4 C = g.rep(*c), X = Vec4(g.rep(*x) - C);
  const Scalar rho = qnorm<Scalar>(Vec4(g.rep(*r) - C), g.d), lx = qnorm<Scalar>(X, g.d);
  if (is_zero_vec(X)) return k;
  k.values.push_back(*x);
  if (rho.sign() != 0 && rho.sign() == lx.sign()) {
    const Scalar f = sqrt_nonneg(rho / lx);
    k.values.push_back(g.obs(Vec4(C + X * f)));
    k.values.push_back(g.obs(Vec4(C - X * f)));
  }
  return k;
}

// Neither timelike nor spacelike lines contain two null-separated events.
std::optional<Res> no_light_on_line(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a");
  if (!a || b.vars.size() != 1 || a->line.cls == Causal::Lightlike) return std::nullopt;
  return Res{Truth::False, {}, {}};
}

// al precedes be exactly when be - al is future timelike; then any point of
// the sphere between the two light cones serves as the relay event.
std::optional<Res> light_relay(Evaluator& ev, const Block& b) {
  auto al = sig_of(ev, "al"), be = sig_of(ev, "be");
  if (!al || !be) return std::nullopt;
  const Vec4 d = be->beg - al->beg;
  if (!is_event(*al) || !is_event(*be) || classify_vector(d) != Causal::Timelike ||
      d(0).sign() < 0)
    return Res{Truth::False, {}, {}};
  auto a = try_observer(ev.kind(), al->beg, d);
  auto off = half_gap_offset(d, al->beg, be->beg);
  if (!a || !off) return std::nullopt;
  const Vec4 ep = (al->beg + be->beg) * q(1, 2) + *off;
  return bind_named(ev, b,
                    {{"a", *a},
                     {"ga1", make_signal(al->beg, ep)},
                     {"ga2", make_signal(ep, be->beg)},
                     {"ep", event_at(ep)}});
}

// Observers meeting two distinct parallel lines lie in their plane, so a
// counterexample exists exactly when that plane contains a timelike direction.
std::optional<Res> optical_plane_check(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a"), bb = obs_of(ev, "b");
  if (!a || !bb || b.vars.size() != 1 || !parallel(*a, *bb)) return std::nullopt;
  const Vec4 u = a->line.dir;
  std::optional<Observer> c;
  if (same_line(a->line, bb->line)) {
    for (const Vec4& t : timelike_directions())
      if (!proportional<Scalar>(t, u) && (c = try_observer(ev.kind(), a->line.base, t))) break;
  } else {
    const Vec4 w = bb->line.base - a->line.base;
    const Scalar uu = mnorm(u), uw = inner(u, w), ww = mnorm(w);
    if ((uu * ww - uw * uw).sign() >= 0) return Res{Truth::True, {}, {}};
    if (uu.sign() < 0) {
      for (int k = 0; k <= 24 && !c; ++k) {
        Vec4 v = u + w * q(1, 1L << k);
        if (classify_vector(v) == Causal::Timelike) c = try_observer(ev.kind(), a->line.base, v);
      }
    } else {
      c = try_observer(ev.kind(), a->line.base, Vec4(w - u * (uw / uu)));
    }
  }
  if (!c) return std::nullopt;
  Res r = with_bindings(ev, b, {*c});
  if (r.t != Truth::False) return std::nullopt;
  return r;
}

// A vector Minkowski-orthogonal to three given ones (generalized cross product).
Vec4 orthogonal_to(const Vec4& x, const Vec4& y, const Vec4& z) {
  Mat4 m;
  for (int j = 0; j < 4; ++j) {
    const Scalar sign = j == 0 ? Scalar(-1) : Scalar(1);
    m(0, j) = x(j) * sign;
    m(1, j) = y(j) * sign;
    m(2, j) = z(j) * sign;
  }
  Vec4 n;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix<Scalar, 3, 3> minor;
    for (int r = 0; r < 3; ++r)
      for (int c = 0, k = 0; c < 4; ++c)
        if (c != i) minor(r, k++) = m(r, c);
    const Scalar det = minor(0, 0) * (minor(1, 1) * minor(2, 2) - minor(1, 2) * minor(2, 1)) -
                       minor(0, 1) * (minor(1, 0) * minor(2, 2) - minor(1, 2) * minor(2, 0)) +
                       minor(0, 2) * (minor(1, 0) * minor(2, 1) - minor(1, 1) * minor(2, 0));
    n(i) = i % 2 == 0 ? det : -det;
  }
  return n;
}

// Duals of a and c with b between them sit on opposite sides of b along the
// timelike quotient direction orthogonal to both offsets.
std::optional<Res> dual_betweenness(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a"), bb = obs_of(ev, "b"), c = obs_of(ev, "c");
  if (!a || !bb || !c || b.vars.size() != 2) return std::nullopt;
  if (!parallel(*a, *bb) || !parallel(*c, *bb) || rho(*a, *bb) || rho(*c, *bb))
    return Res{Truth::False, {}, {}};
  ClassGeo g(bb->line.dir);
  const Vec4 B = g.rep(*bb), u = g.rep(*a) - B, v = g.rep(*c) - B;
  Vec4 n;
  if (proportional<Scalar>(u, v)) {
    bool found = false;
    for (const Vec4& t : timelike_directions()) {
      n = perp<Scalar>(perp<Scalar>(t, g.d), u);
      if (classify_vector(n) == Causal::Timelike) {
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  } else {
    n = orthogonal_to(g.d, u, v);
    if (classify_vector(n) != Causal::Timelike) return Res{Truth::False, {}, {}};
  }
  const Scalar nn = -mnorm(n);
  const Vec4 x = n * sqrt_nonneg(mnorm(u) / nn), y = n * sqrt_nonneg(mnorm(v) / nn);
  Res last;
  for (const Scalar& sg : {Scalar(1), Scalar(-1)}) {
    last = with_bindings(ev, b, {g.obs(Vec4(B + x * sg)), g.obs(Vec4(B - y * sg))});
    if (last.t == Truth::True) return last;
  }
  if (last.t == Truth::False) return Res{Truth::False, {}, {}};
  return std::nullopt;
}

// Every dual of b with respect to a has the same quotient distance to a.
std::optional<Res> dual_equidistance(Evaluator& ev, const Block& b) {
  auto a = obs_of(ev, "a"), bb = obs_of(ev, "b"), c = obs_of(ev, "c"), d = obs_of(ev, "d");
  if (!a || !bb || !c || !d || b.vars.size() != 2) return std::nullopt;
  auto b2 = relatable_dual(*bb, *a), d2 = relatable_dual(*d, *c);
  if (!b2 || !d2) return Res{Truth::False, {}, {}};
  return with_bindings(ev, b, {*b2, *d2});
}

// Radar pairs for the relatable form: the echoes of one event of b on a and
// their simultaneous partners on c, with de halfway on d.
std::optional<Res> radar_pairs(Evaluator& ev, const Block& b) {
  auto a = timelike_class(ev, "a");
  auto bb = obs_of(ev, "b"), c = obs_of(ev, "c"), d = obs_of(ev, "d");
  if (!a || !bb || !c || !d || b.vars.size() != 6) return std::nullopt;
  for (const auto& o : {*bb, *c, *d})
    if (!parallel(o, *a)) return std::nullopt;
  const Vec4 be = bb->line.base;
  auto al1 = past_null(a->line, be), al2 = future_null(a->line, be);
  if (!al1 || !al2) return std::nullopt;
  const Vec4 ga1 = sim_projection(c->line, *al1), ga2 = sim_projection(c->line, *al2);
  const Vec4 de = sim_projection(d->line, Vec4((ga1 + ga2) * q(1, 2)));
  return bind_named(ev, b,
                    {{"al1", event_at(*al1)},
                     {"al2", event_at(*al2)},
                     {"be", event_at(be)},
                     {"ga1", event_at(ga1)},
                     {"ga2", event_at(ga2)},
                     {"de", event_at(de)}});
}

std::optional<Candidates> radar_mirror(Evaluator& ev, const Block&, const std::string&,
                                       const std::set<std::string>&) {
  auto a = timelike_class(ev, "a");
  auto al1 = sig_of(ev, "al1"), ga1 = sig_of(ev, "ga1");
  if (!a || !al1 || !ga1) return std::nullopt;
  Candidates k;
  k.exact = true;
  k.values.push_back(Observer{make_line(Vec4((al1->beg + ga1->beg) * q(1, 2)), a->line.dir)});
  return k;
}

// Only events of e on the light cones of the four events can break the
// equivalences.
std::optional<Res> mirror_cones(Evaluator& ev, const Block& b) {
  if (b.kind != Kind::Forall || b.vars.size() != 1) return std::nullopt;
  auto e = obs_of(ev, "e");
  if (!e || e->line.cls == Causal::Lightlike) return std::nullopt;
  std::vector<Entity> probes;
  for (const char* n : {"al1", "ga1", "al2", "ga2"}) {
    auto s = sig_of(ev, n);
    if (!s) return std::nullopt;
    for (const Vec4& p : null_sources_on(e->line, s->beg)) add_unique(probes, event_at(p));
    for (const Vec4& p : null_targets_on(e->line, s->beg)) add_unique(probes, event_at(p));
  }
  for (const Entity& p : probes) {
    Res r = with_bindings(ev, b, {p});
    if (r.t != Truth::True) return r.t == Truth::False ? std::optional<Res>(r) : std::nullopt;
  }
  return Res{Truth::True, {}, {}};
}

// The middle observer between a and a dual candidate is the quotient midpoint.
std::optional<Candidates> dual_midline(Evaluator& ev, const Block&, const std::string&,
                                       const std::set<std::string>&) {
  auto a = obs_of(ev, "a"), a2 = obs_of(ev, "a'");
  if (!a || !a2 || !parallel(*a, *a2) || a->line.cls == Causal::Lightlike) return std::nullopt;
  ClassGeo g(a->line.dir);
  Candidates k;
  k.exact = true;
  k.values.push_back(g.obs(Vec4((g.rep(*a) + g.rep(*a2)) * q(1, 2))));
  return k;
}

// A null chain from a to a' meets the midline only at the midpoint of its
// first link, so both halves have equal projections in every frame.
std::optional<Res> dual_chain(Evaluator& ev, const Block& b) {
  if (b.kind != Kind::Forall) return std::nullopt;
  auto a = obs_of(ev, "a"), a1 = obs_of(ev, "a'"), a2 = obs_of(ev, "a''");
  if (!a || !a1 || !a2 || a->line.cls == Causal::Lightlike) return std::nullopt;
  if (!parallel(*a, *a1) || !parallel(*a, *a2)) return std::nullopt;
  ClassGeo g(a->line.dir);
  const Vec4 A = g.rep(*a), A1 = g.rep(*a1), A2 = g.rep(*a2);
  if (!mnorm<Scalar>(Vec4(A1 - A)).is_zero() || vec_equal(A, A1)) return std::nullopt;
  if (!vec_equal(A2, Vec4((A + A1) * q(1, 2)))) return std::nullopt;
  return Res{Truth::True, {}, {}};
}

// Two members of the dual family: the computed one and its reflection in b.
std::optional<Candidates> dual_pair(Evaluator& ev, const Block&, const std::string&,
                                    const std::set<std::string>&) {
  auto a = obs_of(ev, "a"), bb = obs_of(ev, "b");
  if (!a || !bb) return std::nullopt;
  auto du = relatable_dual(*a, *bb);
  if (!du) return std::nullopt;
  ClassGeo g(a->line.dir);
  Candidates k;
  k.values = {*du, g.obs(Vec4(g.rep(*bb) * Scalar(2) - g.rep(*du)))};
  return k;
}

void register_all() {
  both_systems("T7", "v", Provider(pasch_point));
  both_systems("T8", "v", Provider(outer_pasch));
  both_systems("T8", "w", Provider(outer_pasch));
  both_systems("T10", "z", Provider(segment_construction));
  both_systems("T11", "x", BlockDecider(lower_dimension));
  register_continuity();
  deciders()["AxSTL/a"] = stl_closed_under_par;
  providers()["AxUnOb/ga"] = midpoint_event;
  providers()["AxUnObFTL/ga"] = midpoint_event;
  deciders()["AxUnOb/a"] = unob_forall;
  deciders()["AxUnObFTL/a"] = unob_forall;
  providers()["Sim/a"] = diamond_observer;
  providers()["SimFTL/a"] = diamond_observer;
  deciders()["Cop/c"] = coplanar_witnesses;
  deciders()["STL/ga"] = unique_reception;
  deciders()["Eq/e"] = radar_equidistance;
  for (const char* n : {"Delta", "DeltaFTL"}) {
    deciders()[std::string(n) + "/b"] = duration_frame;
    deciders()[std::string(n) + "/al2"] = duration_echo;
  }
  providers()["InBall/y"] = ball_boundary;
  providers()["OutBall/y"] = ball_boundary;
  providers()["InBallFTL/y"] = ball_boundary_ftl;
  providers()["OutBallFTL/y"] = ball_boundary_ftl;
  deciders()["Lightspeed/al"] = no_light_on_line;
  deciders()["Chron/a"] = light_relay;
  deciders()["OP/c"] = optical_plane_check;
  deciders()["BwFTL/a'"] = dual_betweenness;
  deciders()["EqFTL/b'"] = dual_equidistance;
  deciders()["EqRho/al1"] = radar_pairs;
  providers()["EqRho/e"] = radar_mirror;
  deciders()["EqRho/ep"] = mirror_cones;
  providers()["Dual/a''"] = dual_midline;
  deciders()["Dual/al"] = dual_chain;
  providers()["DualCoro/a'"] = dual_pair;
}

struct Registrar {
  Registrar() { register_all(); }
};

const Registrar& registrar() {
  static const Registrar r;
  return r;
}

}  // namespace

const Provider* find_provider(const std::string& key) {
  registrar();
  auto& m = providers();
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

const BlockDecider* find_decider(const std::string& key) {
  registrar();
  auto& m = deciders();
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

}  // namespace relcheck::detail
