#include "relcheck/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relcheck {

namespace {

const Vec4& base_of(const Observer& o) { return o.line.base; }
const Vec4& dir_of(const Observer& o) { return o.line.dir; }

bool same(const Observer& a, const Observer& b) { return same_line(a.line, b.line); }

// Offset between two parallel lines, projected off the common direction.
Vec4 qoffset(const Observer& from, const Observer& to) {
  return perp<Scalar>(Vec4(base_of(to) - base_of(from)), dir_of(from));
}

Scalar qdist2(const Observer& from, const Observer& to) {
  return qnorm<Scalar>(Vec4(base_of(to) - base_of(from)), dir_of(from));
}

bool all_parallel(std::initializer_list<const Observer*> obs) {
  const Observer* first = *obs.begin();
  for (const Observer* o : obs)
    if (!same_direction(first->line, o->line)) return false;
  return true;
}

// b's quotient point lies on the closed segment from a's to c's.
bool quotient_between(const Vec4& pu, const Vec4& pw) {
  if (is_zero_vec(pw)) return is_zero_vec(pu);
  int k = 0;
  while (pw(k).is_zero()) ++k;
  Scalar t = pu(k) / pw(k);
  if (!vec_equal<Scalar>(pu, Vec4(pw * t))) return false;
  return t.sign() >= 0 && t <= Scalar(1);
}

// Shared core of Bw and Bw_rho; orientation_free admits both time orders.
bool bw_core(const Observer& a, const Observer& b, const Observer& c, bool orientation_free) {
  if (!all_parallel({&a, &b, &c})) return false;
  const Vec4& d = dir_of(a);
  const int dn = mnorm(d).sign();
  if (dn == 0) return false;
  Vec4 pu = qoffset(a, b), pw = qoffset(a, c);
  if (!quotient_between(pu, pw)) return false;
  if (dn < 0 || is_zero_vec(pw)) return true;
  if (mnorm(pw).sign() > 0) return false;
  return orientation_free || pw(0).sign() > 0;
}

bool both_events(std::initializer_list<const Signal*> ss) {
  for (const Signal* s : ss)
    if (!is_event(*s)) return false;
  return true;
}

std::vector<Scalar> roots_quadratic(const Scalar& a2, const Scalar& a1, const Scalar& a0) {
  // a2 s^2 + a1 s + a0 = 0
  std::vector<Scalar> out;
  if (a2.is_zero()) {
    if (!a1.is_zero()) out.push_back(-a0 / a1);
    return out;
  }
  Scalar disc = a1 * a1 - Scalar(4) * a2 * a0;
  const int ds = disc.sign();
  if (ds < 0) return out;
  if (ds == 0) {
    out.push_back(-a1 / (Scalar(2) * a2));
    return out;
  }
  Scalar r = sqrt_nonneg(disc);
  out.push_back((-a1 - r) / (Scalar(2) * a2));
  out.push_back((-a1 + r) / (Scalar(2) * a2));
  return out;
}

Vec4 parse_vec(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw ModelError(where + ": expected an array of 4 scalars");
  Vec4 v;
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_string()) throw ModelError(where + ": coordinates must be scalar strings");
    try {
      v(i) = parse_scalar(j[i].get<std::string>());
    } catch (const ScalarError& e) {
      throw ModelError(where + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return v;
}

nlohmann::json vec_json(const Vec4& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) a.push_back(render_scalar(v(i)));
  return a;
}

}  // namespace

const char* to_string(ModelKind k) { return k == ModelKind::StlOnly ? "stl" : "ftl"; }

const char* to_string(Incidence i) {
  switch (i) {
    case Incidence::Transmits: return "Transmits";
    case Incidence::Receives: return "Receives";
    case Incidence::Both: return "Both";
    case Incidence::Neither: return "Neither";
  }
  return "?";
}

const char* to_string(ObserverClass c) {
  switch (c) {
    case ObserverClass::STL: return "STL";
    case ObserverClass::Lightspeed: return "Lightspeed";
    case ObserverClass::FTL: return "FTL";
  }
  return "?";
}

Sort sort_of(const Entity& e) { return std::holds_alternative<Observer>(e) ? Sort::Ob : Sort::Si; }

bool entity_equal(const Entity& a, const Entity& b) {
  if (a.index() != b.index()) return false;
  if (auto* o = std::get_if<Observer>(&a)) return same(*o, std::get<Observer>(b));
  const Signal& s = std::get<Signal>(a);
  const Signal& t = std::get<Signal>(b);
  return vec_equal(s.beg, t.beg) && vec_equal(s.end, t.end);
}

std::string render_entity(const Entity& e) {
  if (auto* o = std::get_if<Observer>(&e))
    return "line " + render_vec(o->line.base) + " + t" + render_vec(o->line.dir);
  const Signal& s = std::get<Signal>(e);
  if (is_event(s)) return "event " + render_vec(s.beg);
  return "signal " + render_vec(s.beg) + " -> " + render_vec(s.end);
}

bool observer_allowed(ModelKind k, const Line& l) {
  if (l.cls == Causal::Timelike) return true;
  return k == ModelKind::Ftl && l.cls == Causal::Spacelike;
}

Observer make_observer(ModelKind k, const Vec4& base, const Vec4& dir) {
  Observer o{make_line(base, dir)};
  if (!observer_allowed(k, o.line))
    throw ModelError(std::string("direction ") + render_vec(dir) + " is " + to_string(o.line.cls) +
                     ", not an observer of the " + to_string(k) + " model");
  return o;
}

Signal make_signal(const Vec4& beg, const Vec4& end) {
  Signal s{beg, end};
  if (!is_null_segment(Segment{beg, end}))
    throw ModelError("signal " + render_vec(beg) + " -> " + render_vec(end) + " is not null");
  if (!is_future_directed(Segment{beg, end}))
    throw ModelError("signal " + render_vec(beg) + " -> " + render_vec(end) + " is past-directed");
  return s;
}

bool transmits(const Observer& a, const Signal& s) { return on_line(a.line, s.beg); }
bool receives(const Observer& a, const Signal& s) { return on_line(a.line, s.end); }

Incidence incidence(const Observer& a, const Signal& s) {
  const bool t = transmits(a, s), r = receives(a, s);
  if (t && r) return Incidence::Both;
  if (t) return Incidence::Transmits;
  return r ? Incidence::Receives : Incidence::Neither;
}

bool is_event(const Signal& s) { return vec_equal(s.beg, s.end); }
bool is_beg(const Signal& ev, const Signal& s) { return is_event(ev) && vec_equal(ev.beg, s.beg); }
bool is_end(const Signal& ev, const Signal& s) { return is_event(ev) && vec_equal(ev.beg, s.end); }

bool meets(const Observer& a, const Observer& b) {
  return lines_intersect(a.line, b.line).kind != Meet::None;
}

bool coplanar(const Observer& a, const Observer& b) { return lines_coplanar(a.line, b.line); }

bool parallel(const Observer& a, const Observer& b) { return same_direction(a.line, b.line); }

bool lightlike(const Signal& e1, const Signal& e2) {
  if (!both_events({&e1, &e2})) return false;
  Vec4 v = e2.beg - e1.beg;
  return mnorm(v).is_zero() && v(0).sign() >= 0;
}

bool light_between(const Signal& e1, const Signal& e2) {
  return lightlike(e1, e2) || lightlike(e2, e1);
}

bool chron_precedes(const Signal& e1, const Signal& e2) {
  if (!both_events({&e1, &e2})) return false;
  Vec4 v = e2.beg - e1.beg;
  return mnorm(v).sign() < 0 && v(0).sign() > 0;
}

ObserverClass observer_class(const Observer& a) {
  switch (a.line.cls) {
    case Causal::Timelike: return ObserverClass::STL;
    case Causal::Lightlike: return ObserverClass::Lightspeed;
    case Causal::Spacelike: return ObserverClass::FTL;
  }
  return ObserverClass::FTL;
}

bool bw_geo(const Observer& a, const Observer& b, const Observer& c) {
  return bw_core(a, b, c, false);
}

bool eq_geo(const Observer& a, const Observer& b, const Observer& c, const Observer& d) {
  if (!all_parallel({&a, &b, &c, &d})) return false;
  if (a.line.cls != Causal::Timelike) throw Unsupported("Eq needs slower-than-light observers");
  return qdist2(a, b) == qdist2(c, d);
}

bool sim_geo(const Observer& c, const Signal& e1, const Signal& e2) {
  if (c.line.cls != Causal::Timelike) throw Unsupported("Sim needs a slower-than-light observer");
  if (!both_events({&e1, &e2})) return false;
  return inner<Scalar>(Vec4(e2.beg - e1.beg), c.line.dir).is_zero();
}

bool delta_geo(const Observer& a, const Signal& a0, const Signal& a1, const Signal& b0,
               const Signal& b1) {
  if (a.line.cls != Causal::Timelike) throw Unsupported("Delta needs a slower-than-light observer");
  if (!both_events({&a0, &a1, &b0, &b1})) return false;
  const Vec4& d = a.line.dir;
  Scalar ga = inner<Scalar>(Vec4(a1.beg - a0.beg), d);
  Scalar gb = inner<Scalar>(Vec4(b1.beg - b0.beg), d);
  return ga * ga == gb * gb;
}

std::optional<Observer> tau_geo(const Observer& b, const Signal& e1, const Signal& e2) {
  if (!chron_precedes(e1, e2)) return std::nullopt;
  Line a = line_through(e1.beg, e2.beg);
  if (!same_direction(a, b.line) || same_line(a, b.line)) return std::nullopt;
  Vec4 v = perp<Scalar>(Vec4(e1.beg - b.line.base), a.dir);
  Scalar gap2 = -mnorm<Scalar>(Vec4(e2.beg - e1.beg));
  Scalar k = sqrt_nonneg(gap2 / mnorm(v));
  return Observer{make_line(Vec4(e1.beg + v * k), a.dir)};
}

bool tau_holds(const Observer& c, const Observer& b, const Signal& e1, const Signal& e2) {
  auto t = tau_geo(b, e1, e2);
  return t && same(*t, c);
}

bool rho(const Observer& a, const Observer& b) {
  const Vec4& da = dir_of(a);
  const Vec4& db = dir_of(b);
  Vec4 o = base_of(b) - base_of(a);
  if (same_direction(a.line, b.line)) {
    const int dn = mnorm(da).sign();
    if (dn < 0) return true;
    if (dn == 0) return !inner(o, da).is_zero() || mnorm(o).is_zero();
    return qnorm(o, da).sign() <= 0;
  }
  // f(s,t) = lambda(o + t db - s da) must take the value zero.
  Scalar g00 = mnorm(da), g11 = mnorm(db), g01 = -inner(da, db);
  Scalar l0 = Scalar(-2) * inner(o, da), l1 = Scalar(2) * inner(o, db);
  Scalar c0 = mnorm(o);
  Scalar det = g00 * g11 - g01 * g01;
  const int ds = det.sign();
  if (ds < 0) return true;
  if (ds > 0) {
    Scalar quad = (g11 * l0 * l0 - Scalar(2) * g01 * l0 * l1 + g00 * l1 * l1) / det;
    Scalar ext = c0 - quad / Scalar(4);
    return g00.sign() > 0 ? ext.sign() <= 0 : ext.sign() >= 0;
  }
  Scalar n0, n1;
  if (!g00.is_zero()) {
    n0 = -g01;
    n1 = g00;
  } else {
    n0 = Scalar(1);
    n1 = Scalar(0);
  }
  if (!(l0 * n0 + l1 * n1).is_zero()) return true;
  Scalar tr = g00 + g11;
  Scalar ext = c0 - (l0 * l0 + l1 * l1) / (Scalar(4) * tr);
  return tr.sign() > 0 ? ext.sign() <= 0 : ext.sign() >= 0;
}

bool optical_plane(const Observer& a, const Observer& b) {
  if (!parallel(a, b) || same(a, b)) return false;
  if (mnorm(dir_of(a)).sign() <= 0) return false;
  return qdist2(a, b).is_zero();
}

bool bw_rho(const Observer& a, const Observer& b, const Observer& c) {
  return bw_core(a, b, c, true);
}

bool eq_rho(const Observer& a, const Observer& b, const Observer& c, const Observer& d) {
  if (!all_parallel({&a, &b, &c, &d})) return false;
  const int dn = mnorm(dir_of(a)).sign();
  if (dn < 0) return qdist2(a, b) == qdist2(c, d);
  if (dn == 0) return false;
  const bool ab = same(a, b), cd = same(c, d);
  if (ab && cd) return true;
  if (ab || cd) return false;
  Scalar q1 = qdist2(a, b);
  return q1 == qdist2(c, d) && q1.sign() <= 0;
}

std::optional<Observer> relatable_dual(const Observer& a, const Observer& b) {
  if (!parallel(a, b) || rho(a, b)) return std::nullopt;
  const Vec4& d = dir_of(a);
  Vec4 v = qoffset(b, a);
  Vec4 e0(Scalar(1), Scalar(0), Scalar(0), Scalar(0));
  Vec4 w = perp<Scalar>(e0, d);
  w = w - v * (inner(w, v) / mnorm(v));
  Scalar k = sqrt_nonneg(mnorm(v) / -mnorm(w));
  return Observer{make_line(Vec4(base_of(b) + w * k), d)};
}

bool is_relatable_dual(const Observer& a2, const Observer& a, const Observer& b) {
  if (!all_parallel({&a, &b, &a2}) || rho(a, b)) return false;
  Vec4 v = qoffset(b, a), x = qoffset(b, a2);
  return inner(x, v).is_zero() && mnorm(x) == -mnorm(v);
}

bool bw_ftl(const Observer& a, const Observer& b, const Observer& c) {
  if (bw_rho(a, b, c)) return true;
  if (!all_parallel({&a, &b, &c}) || rho(a, b) || rho(c, b)) return false;
  // Duals a' and c' exist with b between them iff some timelike quotient
  // vector is orthogonal to both offsets.
  Vec4 u = qoffset(b, a), v = qoffset(b, c);
  if (proportional<Scalar>(u, v)) return true;
  Scalar uv = inner(u, v);
  return (mnorm(u) * mnorm(v) - uv * uv).sign() > 0;
}

bool eq_ftl(const Observer& a, const Observer& b, const Observer& c, const Observer& d) {
  if (!all_parallel({&a, &b, &c, &d})) return false;
  const int dn = mnorm(dir_of(a)).sign();
  if (dn <= 0) return eq_rho(a, b, c, d);
  return qdist2(a, b) == qdist2(c, d) && same(a, b) == same(c, d);
}

bool sim_ftl(const Observer& c, const Signal& e1, const Signal& e2) {
  if (vec_equal(e1.beg, e2.beg) && vec_equal(e1.end, e2.end)) return true;
  if (!both_events({&e1, &e2})) return false;
  Vec4 w = e2.beg - e1.beg;
  return inner(w, dir_of(c)).is_zero() && !mnorm(w).is_zero();
}

Vec4 sim_projection(const Line& a, const Vec4& p) {
  return a.base + a.dir * (inner<Scalar>(Vec4(p - a.base), a.dir) / mnorm(a.dir));
}

bool delta_ftl(const Observer& a, const Signal& a0, const Signal& a1, const Signal& b0,
               const Signal& b1) {
  if (!both_events({&a0, &a1, &b0, &b1})) return false;
  const Vec4& d = dir_of(a);
  if (mnorm(d).is_zero()) return false;
  for (const Signal* s : {&a0, &a1, &b0, &b1}) {
    Vec4 p = sim_projection(a.line, s->beg);
    if (!vec_equal(p, s->beg) && mnorm<Scalar>(Vec4(p - s->beg)).is_zero()) return false;
  }
  Scalar ga = inner<Scalar>(Vec4(a1.beg - a0.beg), d);
  Scalar gb = inner<Scalar>(Vec4(b1.beg - b0.beg), d);
  if (ga.is_zero() || gb.is_zero()) return ga.is_zero() && gb.is_zero();
  return ga * ga == gb * gb;
}

std::optional<Observer> tau_ftl(const Observer& b, const Signal& e1, const Signal& e2) {
  return tau_geo(b, e1, e2);
}

bool tau_ftl_holds(const Observer& c, const Observer& b, const Signal& e1, const Signal& e2) {
  return tau_holds(c, b, e1, e2);
}

bool in_ball(const Observer& x, const Observer& c, const Observer& r) {
  if (!all_parallel({&x, &c, &r})) return false;
  if (c.line.cls != Causal::Timelike) throw Unsupported("ball needs slower-than-light observers");
  return qdist2(c, x) <= qdist2(c, r);
}

bool out_ball(const Observer& x, const Observer& c, const Observer& r) {
  if (!all_parallel({&x, &c, &r})) return false;
  if (c.line.cls != Causal::Timelike) throw Unsupported("ball needs slower-than-light observers");
  return qdist2(c, x) >= qdist2(c, r);
}

namespace {

// Quotient offsets of x and r from c when all three are parallel and spacelike.
struct BallFtl {
  int rho;  // sign of the squared radius
  bool r_same, x_same;
  int x;    // sign of the squared offset of x
};

std::optional<BallFtl> ball_ftl(const Observer& x, const Observer& c, const Observer& r) {
  if (!all_parallel({&x, &c, &r})) return std::nullopt;
  return BallFtl{qdist2(c, r).sign(), same(c, r), same(c, x), qdist2(c, x).sign()};
}

}  // namespace

bool in_ball_ftl(const Observer& x, const Observer& c, const Observer& r) {
  if (c.line.cls == Causal::Timelike) return in_ball(x, c, r);
  auto b = ball_ftl(x, c, r);
  if (!b) return false;
  if (b->r_same) return b->x_same || b->x > 0;
  if (b->rho > 0) return b->x > 0;
  if (b->x_same) return true;
  if (b->rho == 0) return b->x == 0;
  return b->x < 0 && qdist2(c, r) <= qdist2(c, x);
}

bool out_ball_ftl(const Observer& x, const Observer& c, const Observer& r) {
  if (c.line.cls == Causal::Timelike) return out_ball(x, c, r);
  auto b = ball_ftl(x, c, r);
  if (!b) return false;
  if (b->r_same) return b->x_same || b->x <= 0;
  if (b->rho > 0) return b->x_same || b->x > 0;
  if (b->x_same) return false;
  if (b->rho == 0) return b->x == 0;
  return qdist2(c, x) <= qdist2(c, r);
}

std::vector<Vec4> null_sources_on(const Line& l, const Vec4& target) {
  Vec4 o = target - l.base;
  std::vector<Vec4> out;
  for (const Scalar& s :
       roots_quadratic(mnorm(l.dir), Scalar(-2) * inner(o, l.dir), mnorm(o))) {
    Vec4 p = line_point(l, s);
    if ((target(0) - p(0)).sign() >= 0) out.push_back(p);
  }
  return out;
}

std::vector<Vec4> null_targets_on(const Line& l, const Vec4& source) {
  Vec4 o = l.base - source;
  std::vector<Vec4> out;
  for (const Scalar& s : roots_quadratic(mnorm(l.dir), Scalar(2) * inner(o, l.dir), mnorm(o))) {
    Vec4 q = line_point(l, s);
    if ((q(0) - source(0)).sign() >= 0) out.push_back(q);
  }
  return out;
}

Scenario load_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ModelError("scenario must be a JSON object");
  Scenario s;
  const std::string kind = j.value("kind", "stl");
  if (kind == "stl")
    s.kind = ModelKind::StlOnly;
  else if (kind == "ftl")
    s.kind = ModelKind::Ftl;
  else
    throw ModelError("unknown model kind '" + kind + "'");
  if (j.contains("observers")) {
    for (auto& [name, o] : j["observers"].items()) {
      const std::string where = "observers." + name;
      if (!o.contains("base") || !o.contains("dir")) throw ModelError(where + ": needs base and dir");
      Vec4 base = parse_vec(o["base"], where + ".base");
      Vec4 dir = parse_vec(o["dir"], where + ".dir");
      if (is_zero_vec(dir)) throw ModelError(where + ".dir: zero direction");
      if (classify_vector(dir) == Causal::Lightlike)
        throw ModelError(where + ".dir: lightlike direction " + render_vec(dir) +
                         " is not an observer");
      try {
        s.observers.emplace(name, make_observer(s.kind, base, dir));
      } catch (const ModelError& e) {
        throw ModelError(where + ": " + e.what());
      }
    }
  }
  if (j.contains("signals")) {
    for (auto& [name, g] : j["signals"].items()) {
      const std::string where = "signals." + name;
      if (!g.contains("beg")) throw ModelError(where + ": needs beg");
      Vec4 beg = parse_vec(g["beg"], where + ".beg");
      Vec4 end = g.contains("end") ? parse_vec(g["end"], where + ".end") : beg;
      try {
        s.signals.emplace(name, make_signal(beg, end));
      } catch (const ModelError& e) {
        throw ModelError(where + ": " + e.what());
      }
    }
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string save_scenario(const Scenario& s) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(s.kind);
  j["observers"] = nlohmann::ordered_json::object();
  for (const auto& [name, o] : s.observers)
    j["observers"][name] = {{"base", vec_json(o.line.base)}, {"dir", vec_json(o.line.dir)}};
  j["signals"] = nlohmann::ordered_json::object();
  for (const auto& [name, g] : s.signals)
    j["signals"][name] = {{"beg", vec_json(g.beg)}, {"end", vec_json(g.end)}};
  return j.dump(2) + "\n";
}

}  // namespace relcheck
