#include <algorithm>
#include <set>

#include "verifier_internal.hpp"

namespace relcheck::detail {

namespace {

Scalar q(long n, long d = 1) { return Scalar::rational(n, d); }
Vec4 v4(const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
  return Vec4(a, b, c, d);
}

bool has(const std::vector<std::string>& args, const std::string& v) {
  return std::find(args.begin(), args.end(), v) != args.end();
}

void add_point(std::vector<Vec4>& out, const Vec4& p) {
  for (auto& x : out)
    if (vec_equal(x, p)) return;
  out.push_back(p);
}

void add_line(std::vector<Line>& out, const Line& l) {
  for (auto& x : out)
    if (same_line(x, l)) return;
  out.push_back(l);
}

// Constraints on a single point of spacetime.
struct PtCons {
  std::vector<Vec4> points;
  std::vector<Line> lines;
  std::vector<std::pair<Vec4, Scalar>> planes;  // <p, n> = c
  std::vector<std::pair<Vec4, int>> cones;      // apex; +1 future sheet, -1 past, 0 both
  bool impossible = false;

  void merge(const PtCons& o) {
    points.insert(points.end(), o.points.begin(), o.points.end());
    lines.insert(lines.end(), o.lines.begin(), o.lines.end());
    planes.insert(planes.end(), o.planes.begin(), o.planes.end());
    cones.insert(cones.end(), o.cones.begin(), o.cones.end());
    impossible = impossible || o.impossible;
  }
  bool empty() const { return points.empty() && lines.empty() && planes.empty() && cones.empty(); }
};

bool on_cone(const Vec4& apex, int dir, const Vec4& p) {
  Vec4 v = p - apex;
  if (!mnorm(v).is_zero()) return false;
  if (dir > 0) return v(0).sign() >= 0;
  if (dir < 0) return v(0).sign() <= 0;
  return true;
}

bool satisfies(const PtCons& c, const Vec4& p) {
  for (auto& x : c.points)
    if (!vec_equal(x, p)) return false;
  for (auto& l : c.lines)
    if (!on_line(l, p)) return false;
  for (auto& [n, val] : c.planes)
    if (inner(p, n) != val) return false;
  for (auto& [apex, dir] : c.cones)
    if (!on_cone(apex, dir, p)) return false;
  return true;
}

struct PtSol {
  bool finite = true;
  std::vector<Vec4> pts;
  std::optional<Line> line;  // the solution set is exactly this line
};

PtSol solve_points(const PtCons& c) {
  PtSol s;
  if (c.impossible) return s;
  auto finish = [&](const Vec4& p) {
    if (satisfies(c, p)) s.pts.push_back(p);
    return s;
  };
  if (!c.points.empty()) return finish(c.points[0]);
  if (c.lines.empty()) {
    s.finite = false;
    return s;
  }
  Line l = c.lines[0];
  for (size_t i = 1; i < c.lines.size(); ++i) {
    Intersection in = lines_intersect(l, c.lines[i]);
    if (in.kind == Meet::None) return s;
    if (in.kind == Meet::Point) return finish(in.point);
  }
  for (auto& [n, val] : c.planes) {
    Scalar k = inner(l.dir, n);
    Scalar rhs = val - inner(l.base, n);
    if (!k.is_zero()) return finish(line_point(l, rhs / k));
    if (!rhs.is_zero()) return s;
  }
  for (auto& [apex, dir] : c.cones) {
    Vec4 o = l.base - apex;
    Scalar a2 = mnorm(l.dir), a1 = Scalar(2) * inner(o, l.dir), a0 = mnorm(o);
    if (a2.is_zero() && a1.is_zero() && a0.is_zero()) continue;
    for (const Scalar& t : quadratic_roots(a2, a1, a0)) {
      Vec4 p = line_point(l, t);
      if (satisfies(c, p)) add_point(s.pts, p);
    }
    return s;
  }
  s.finite = false;
  s.line = l;
  return s;
}

std::vector<Scalar> sample_params() {
  return {q(0), q(1), q(-1), q(2), q(1, 2), q(-2), q(3), q(-1, 2), q(5), q(-3)};
}

// Points satisfying an infinite constraint set, for inexact sampling.
std::vector<Vec4> sample_points(const PtCons& c, const PtSol& s, const std::vector<Vec4>& known,
                                std::size_t n) {
  std::vector<Vec4> out;
  auto offer = [&](const Vec4& p) {
    if (out.size() < n && satisfies(c, p)) add_point(out, p);
  };
  if (s.line) {
    for (const Scalar& t : sample_params()) offer(line_point(*s.line, t));
    return out;
  }
  for (auto& [apex, dir] : c.cones)
    for (const Vec4& k : null_directions())
      for (long m : {1, 2}) {
        if (dir >= 0) offer(Vec4(apex + k * q(m)));
        if (dir <= 0) offer(Vec4(apex - k * q(m)));
      }
  for (auto& [nv, val] : c.planes) {
    Scalar nn = mnorm(nv);
    if (nn.is_zero()) continue;
    Vec4 p0 = nv * (val / nn);
    offer(p0);
    for (const Vec4& k : spacelike_directions()) offer(Vec4(p0 + perp<Scalar>(k, nv)));
    for (const Vec4& k : timelike_directions()) offer(Vec4(p0 + perp<Scalar>(k, nv)));
  }
  for (const Vec4& p : known) offer(p);
  if (c.empty())
    for (long i = 0; out.size() < n && i < 4; ++i) offer(v4(q(i), q(2 * i + 1), q(-i), q(i % 2)));
  return out;
}

bool translation_symmetric(Evaluator& ev, const Block& b, const std::set<std::string>& unbound,
                           const Vec4& d) {
  for (auto& [name, e] : ev.visible(*b.body, unbound)) {
    const Observer* o = std::get_if<Observer>(&e);
    if (!o || !vec_equal(o->line.dir, d)) return false;
  }
  return true;
}

bool all_known(Evaluator& ev, const std::vector<std::string>& args, const std::string& var,
               const std::set<std::string>& unbound) {
  for (auto& a : args)
    if (a != var && (unbound.count(a) || !ev.lookup(a))) return false;
  return true;
}

// ---------------------------------------------------------------- signals

Candidates solve_signal(Evaluator& ev, const Block& b, const Branch& br, const std::string& var,
                        const std::set<std::string>& unbound) {
  PtCons beg, end;
  bool event = false, nonevent = false;
  std::vector<Entity> equal, extra;
  for (const Lit& lit : br) {
    const auto& args = *lit.args;
    if (!has(args, var)) continue;
    const size_t i = static_cast<size_t>(std::find(args.begin(), args.end(), var) - args.begin());
    const std::string& p = lit.pred;
    const bool known = all_known(ev, args, var, unbound);
    auto other_sig = [&](size_t j) { return ev.signal(args[j]); };
    if (!lit.positive) {
      if (p == "Ev") nonevent = true;
      continue;
    }
    if (p == "=") {
      if (known)
        if (const Signal* s = other_sig(1 - i)) equal.push_back(*s);
    } else if (p == "T" || p == "R") {
      if (!known) continue;
      const Observer* o = ev.observer(args[0]);
      if (o) (p == "T" ? beg : end).lines.push_back(o->line);
    } else if (p == "Ev") {
      event = true;
    } else if (p == "IsBeg" || p == "IsEnd") {
      const bool is_b = p == "IsBeg";
      if (i == 0) {
        event = true;
        if (known)
          if (const Signal* s = other_sig(1)) beg.points.push_back(is_b ? s->beg : s->end);
      } else if (known) {
        const Signal* e = other_sig(0);
        if (!e || !is_event(*e))
          beg.impossible = true;
        else
          (is_b ? beg : end).points.push_back(e->beg);
      }
    } else if (p == "L" || p == "l") {
      event = true;
      if (!known) continue;
      const Signal* o = other_sig(1 - i);
      if (!o || !is_event(*o)) {
        beg.impossible = true;
        continue;
      }
      int dir = p == "l" ? 0 : (i == 0 ? -1 : 1);
      beg.cones.emplace_back(o->beg, dir);
    } else if (p == "Chron" || p == "Delta" || p == "DeltaFTL") {
      if (p != "Delta" && p != "DeltaFTL" && !ev.lookup(args[1 - i])) {
      }
      if (i > 0 || p == "Chron") event = true;
    } else if (p == "Tau" || p == "TauFTL") {
      if (i >= 2) event = true;
    } else if (p == "Sim" || p == "SimFTL") {
      if (i == 0) continue;
      if (p == "Sim") event = true;
      if (!known) continue;
      const Observer* c = ev.observer(args[0]);
      const Signal* o = other_sig(i == 1 ? 2 : 1);
      if (!c || !o) continue;
      if (p == "SimFTL") {
        extra.push_back(*o);
        if (!is_event(*o)) {
          beg.impossible = true;
          continue;
        }
        event = true;
      } else if (!is_event(*o) || c->line.cls != Causal::Timelike) {
        beg.impossible = true;
        continue;
      }
      beg.planes.emplace_back(c->line.dir, inner(o->beg, c->line.dir));
    }
  }

  Candidates out;
  out.exact = true;
  out.all_values = true;
  auto push_signal = [&](const Vec4& s, const Vec4& e) {
    if (nonevent && vec_equal(s, e)) return;
    if (auto sig = try_signal(s, e)) add_unique(out.values, *sig);
  };
  if (!equal.empty()) {
    out.values.push_back(equal.front());
    for (auto& e : extra) add_unique(out.values, e);
    return out;
  }
  std::vector<Vec4> known = known_points(ev, *b.body, unbound);
  if (event) {
    if (nonevent) return out;
    PtCons all = beg;
    all.merge(end);
    PtSol s = solve_points(all);
    if (s.finite) {
      for (auto& p : s.pts) add_unique(out.values, event_at(p));
    } else if (s.line && all.planes.empty() && all.cones.empty() &&
               translation_symmetric(ev, b, unbound, s.line->dir)) {
      out.all_values = false;
      add_unique(out.values, event_at(s.line->base));
    } else {
      out.exact = out.all_values = false;
      for (auto& p : sample_points(all, s, known, ev.samples())) add_unique(out.values, event_at(p));
    }
    for (auto& e : extra) add_unique(out.values, e);
    return out;
  }
  PtSol bs = solve_points(beg), es = solve_points(end);
  if (bs.finite || es.finite) {
    const bool from_beg = bs.finite;
    for (const Vec4& p : (from_beg ? bs.pts : es.pts)) {
      PtCons other = from_beg ? end : beg;
      other.cones.emplace_back(p, from_beg ? 1 : -1);
      PtSol os = solve_points(other);
      if (os.finite) {
        for (auto& x : os.pts) from_beg ? push_signal(p, x) : push_signal(x, p);
      } else {
        out.exact = out.all_values = false;
        for (auto& x : sample_points(other, os, known, ev.samples()))
          from_beg ? push_signal(p, x) : push_signal(x, p);
      }
    }
  } else {
    out.exact = out.all_values = false;
    for (auto& p : sample_points(beg, bs, known, ev.samples())) {
      if (!nonevent) push_signal(p, p);
      PtCons other = end;
      other.cones.emplace_back(p, 1);
      PtSol os = solve_points(other);
      std::vector<Vec4> ends = os.finite ? os.pts : sample_points(other, os, known, 3);
      for (auto& x : ends) push_signal(p, x);
      if (out.values.size() >= ev.samples()) break;
    }
  }
  for (auto& e : extra) add_unique(out.values, e);
  return out;
}

// ---------------------------------------------------------------- observers

Candidates solve_observer(Evaluator& ev, const Block& b, const Branch& br, const std::string& var,
                          const std::set<std::string>& unbound) {
  std::vector<Vec4> pts;
  std::optional<Vec4> dir;
  std::vector<Entity> equal, hints;
  std::optional<std::vector<Observer>> fixed;
  int cls = 0;  // 1 timelike only, 2 spacelike only, -1 not timelike
  bool impossible = false;
  auto want_dir = [&](const Vec4& d) {
    if (dir && !vec_equal(*dir, d)) impossible = true;
    dir = d;
  };
  for (const Lit& lit : br) {
    const auto& args = *lit.args;
    if (!has(args, var)) continue;
    const size_t i = static_cast<size_t>(std::find(args.begin(), args.end(), var) - args.begin());
    const std::string& p = lit.pred;
    const bool known = all_known(ev, args, var, unbound);
    if (!lit.positive) {
      if (p == "STL" && cls == 0) cls = -1;
      continue;
    }
    if (p == "STL") {
      cls = 1;
    } else if (p == "FTL") {
      cls = 2;
    } else if (p == "Lightspeed") {
      impossible = true;
    }
    if (!known) continue;
    if (p == "=") {
      if (const Observer* o = ev.observer(args[1 - i])) equal.push_back(*o);
    } else if (p == "T" || p == "R") {
      if (const Signal* s = ev.signal(args[1])) add_point(pts, p == "T" ? s->beg : s->end);
    } else if (p == "Par" || p == "Bw" || p == "Eq" || p == "BwRho" || p == "EqRho" ||
               p == "BwFTL" || p == "EqFTL" || p == "InBall" || p == "OutBall" ||
               p == "InBallFTL" || p == "OutBallFTL") {
      for (size_t j = 0; j < args.size(); ++j)
        if (j != i)
          if (const Observer* o = ev.observer(args[j])) {
            want_dir(o->line.dir);
            break;
          }
    } else if ((p == "Tau" || p == "TauFTL") && i == 0) {
      const Observer* bo = ev.observer(args[1]);
      const Signal* e1 = ev.signal(args[2]);
      const Signal* e2 = ev.signal(args[3]);
      if (bo && e1 && e2) {
        std::vector<Observer> f;
        if (auto t = tau_geo(*bo, *e1, *e2)) f.push_back(*t);
        fixed = f;
      }
    } else if (p == "Dual" && i == 0) {
      const Observer* a = ev.observer(args[1]);
      const Observer* bo = ev.observer(args[2]);
      if (a && bo) {
        if (!parallel(*a, *bo) || rho(*a, *bo)) {
          impossible = true;
        } else {
          want_dir(a->line.dir);
          if (auto d = relatable_dual(*a, *bo)) hints.push_back(*d);
        }
      }
    } else if (p == "M") {
      if (const Observer* o = ev.observer(args[1 - i])) hints.push_back(*o);
    }
  }
  Candidates out;
  out.exact = out.all_values = true;
  auto cls_ok = [&](const Line& l) {
    if (cls == 1) return l.cls == Causal::Timelike;
    if (cls == 2) return l.cls == Causal::Spacelike;
    if (cls == -1) return l.cls != Causal::Timelike;
    return true;
  };
  auto offer = [&](const Observer& o) {
    if (!observer_allowed(ev.kind(), o.line) || !cls_ok(o.line)) return;
    for (auto& p : pts)
      if (!on_line(o.line, p)) return;
    if (dir && !vec_equal(o.line.dir, *dir)) return;
    add_unique(out.values, o);
  };
  if (impossible) return out;
  if (!equal.empty()) {
    offer(std::get<Observer>(equal.front()));
    return out;
  }
  if (fixed) {
    for (auto& o : *fixed) offer(o);
    return out;
  }
  if (pts.size() >= 2) {
    offer(Observer{line_through(pts[0], pts[1])});
    return out;
  }
  if (pts.size() == 1 && dir) {
    offer(Observer{make_line(pts[0], *dir)});
    return out;
  }
  out.exact = out.all_values = false;
  std::vector<Vec4> known = known_points(ev, *b.body, unbound);
  for (auto& h : hints) offer(std::get<Observer>(h));
  if (dir) {
    for (auto& p : known) offer(Observer{make_line(p, *dir)});
    for (const Vec4& k : spacelike_directions())
      if (out.values.size() < ev.samples()) offer(Observer{make_line(perp<Scalar>(k, *dir), *dir)});
    if (dir->size() && out.values.size() < ev.samples())
      offer(Observer{make_line(Vec4::Zero(), *dir)});
    return out;
  }
  const std::vector<Vec4> anchors = pts.empty() ? known : pts;
  for (auto& a : anchors) {
    for (auto& p : known)
      if (!vec_equal(a, p)) offer(Observer{line_through(a, p)});
    for (const Vec4& d : timelike_directions()) offer(Observer{make_line(a, d)});
    if (ev.ftl())
      for (const Vec4& d : spacelike_directions()) offer(Observer{make_line(a, d)});
    if (out.values.size() >= ev.samples()) break;
  }
  if (out.values.empty()) offer(Observer{make_line(Vec4::Zero(), timelike_directions()[0])});
  return out;
}

}  // namespace

std::vector<Scalar> quadratic_roots(const Scalar& a2, const Scalar& a1, const Scalar& a0) {
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

const std::vector<Vec4>& timelike_directions() {
  static const std::vector<Vec4> d = {
      v4(q(1), q(0), q(0), q(0)),          v4(q(1), q(1, 2), q(0), q(0)),
      v4(q(1), q(0), q(1, 2), q(0)),       v4(q(1), q(0), q(0), q(1, 2)),
      v4(q(1), q(1, 3), q(1, 4), q(0)),    v4(q(1), q(-1, 2), q(1, 3), q(1, 5)),
      v4(q(1), q(1, 5), q(-1, 3), q(1, 4)), v4(q(1), q(2, 5), q(1, 7), q(-1, 3)),
  };
  return d;
}

const std::vector<Vec4>& spacelike_directions() {
  static const std::vector<Vec4> d = {
      v4(q(0), q(1), q(0), q(0)),           v4(q(0), q(0), q(1), q(0)),
      v4(q(0), q(0), q(0), q(1)),           v4(q(1, 2), q(1), q(0), q(0)),
      v4(q(1, 3), q(1), q(1, 2), q(0)),     v4(q(-1, 2), q(1, 3), q(1), q(1, 4)),
      v4(q(1, 5), q(1, 4), q(1, 3), q(1)),  v4(q(2, 3), q(1, 2), q(1, 2), q(1, 2)),
  };
  return d;
}

const std::vector<Vec4>& null_directions() {
  static const std::vector<Vec4> d = {
      v4(q(1), q(1), q(0), q(0)),  v4(q(1), q(-1), q(0), q(0)), v4(q(1), q(0), q(1), q(0)),
      v4(q(1), q(0), q(-1), q(0)), v4(q(1), q(0), q(0), q(1)),  v4(q(1), q(0), q(0), q(-1)),
      v4(q(5), q(3), q(4), q(0)),  v4(q(3), q(1), q(2), q(2)),  v4(q(7), q(2), q(3), q(6)),
      v4(q(9), q(1), q(4), q(8)),  v4(q(9), q(4), q(4), q(7)),  v4(q(11), q(2), q(6), q(9)),
  };
  return d;
}

void add_unique(std::vector<Entity>& out, const Entity& e) {
  for (auto& x : out)
    if (entity_equal(x, e)) return;
  out.push_back(e);
}

std::optional<Observer> try_observer(ModelKind k, const Vec4& base, const Vec4& dir) {
  if (is_zero_vec(dir)) return std::nullopt;
  Line l = make_line(base, dir);
  if (!observer_allowed(k, l)) return std::nullopt;
  return Observer{l};
}

std::optional<Signal> try_signal(const Vec4& beg, const Vec4& end) {
  Vec4 d = end - beg;
  if (!mnorm(d).is_zero() || d(0).sign() < 0) return std::nullopt;
  return Signal{beg, end};
}

std::vector<Vec4> known_points(Evaluator& ev, const Formula& body,
                               const std::set<std::string>& exclude) {
  std::vector<Vec4> out;
  for (auto& [n, e] : ev.visible(body, exclude)) {
    if (const Signal* s = std::get_if<Signal>(&e)) {
      add_point(out, s->beg);
      add_point(out, s->end);
    } else {
      add_point(out, std::get<Observer>(e).line.base);
    }
  }
  return out;
}

Candidates solve_branch(Evaluator& ev, const Block& b, const Branch& br, const std::string& var,
                        Sort sort, const std::set<std::string>& unbound) {
  return sort == Sort::Si ? solve_signal(ev, b, br, var, unbound)
                          : solve_observer(ev, b, br, var, unbound);
}

Candidates sample_values(Evaluator& ev, const Block& b, Sort sort) {
  Candidates out;
  std::set<std::string> none;
  std::vector<Vec4> known = known_points(ev, *b.body, none);
  const std::size_t n = ev.samples();
  if (sort == Sort::Ob) {
    for (auto& [name, e] : ev.visible(*b.body, none))
      if (std::holds_alternative<Observer>(e)) add_unique(out.values, e);
    for (size_t i = 0; i < known.size() && out.values.size() < 2 * n; ++i)
      for (size_t j = i + 1; j < known.size(); ++j)
        if (auto o = try_observer(ev.kind(), known[i], Vec4(known[j] - known[i])))
          add_unique(out.values, *o);
    for (const Vec4& d : timelike_directions()) {
      if (out.values.size() >= 2 * n) break;
      Vec4 base = v4(q(0), q(ev.rng().uniform(-5, 5)), q(ev.rng().uniform(-5, 5)),
                     q(ev.rng().uniform(-5, 5)));
      add_unique(out.values, Observer{make_line(base, d)});
    }
    if (ev.ftl())
      for (size_t i = 0; i < 3; ++i)
        add_unique(out.values, Observer{make_line(Vec4::Zero(), spacelike_directions()[i])});
  } else {
    for (auto& p : known) add_unique(out.values, event_at(p));
    for (auto& p : known)
      for (auto& k : null_directions()) {
        if (out.values.size() >= 2 * n) break;
        add_unique(out.values, Signal{p, Vec4(p + k)});
      }
    for (size_t i = 0; i < n; ++i) {
      Vec4 p = v4(q(ev.rng().uniform(-5, 5)), q(ev.rng().uniform(-5, 5)),
                  q(ev.rng().uniform(-5, 5)), q(ev.rng().uniform(-5, 5)));
      add_unique(out.values, event_at(p));
    }
  }
  return out;
}

std::optional<Candidates> class_orbit(Evaluator& ev, const Block& b, const std::string& var,
                                      Sort sort, const std::set<std::string>&) {
  if (sort != Sort::Ob) return std::nullopt;
  std::vector<Lit> leaves;
  ev.leaves_with(*b.body, var, leaves);
  if (leaves.empty()) return std::nullopt;
  for (auto& l : leaves)
    if ((l.pred != "STL" && l.pred != "FTL" && l.pred != "Lightspeed") || l.args->size() != 1)
      return std::nullopt;
  Candidates c;
  c.exact = true;
  c.values.push_back(Observer{make_line(Vec4::Zero(), timelike_directions()[0])});
  if (ev.ftl()) c.values.push_back(Observer{make_line(Vec4::Zero(), spacelike_directions()[0])});
  return c;
}

namespace {

std::optional<Observer> generic_line(Evaluator& ev, const std::optional<Vec4>& through,
                                     const std::vector<Vec4>& avoid,
                                     const std::vector<Entity>& not_equal) {
  std::vector<Vec4> dirs = timelike_directions();
  if (ev.ftl())
    for (auto& d : spacelike_directions()) dirs.push_back(d);
  for (long shift = 0; shift < 6; ++shift) {
    Vec4 base = through ? *through : v4(q(0), q(97 + shift), q(89 - 3 * shift), q(83 + 7 * shift));
    for (const Vec4& d : dirs) {
      auto o = try_observer(ev.kind(), base, d);
      if (!o) continue;
      bool ok = true;
      for (auto& p : avoid)
        if (!(through && vec_equal(p, *through)) && on_line(o->line, p)) ok = false;
      for (auto& e : not_equal)
        if (entity_equal(e, *o)) ok = false;
      if (ok) return o;
    }
    if (through) break;
  }
  return std::nullopt;
}

bool on_any(const std::vector<Line>& lines, const Vec4& p) {
  for (auto& l : lines)
    if (on_line(l, p)) return true;
  return false;
}

std::optional<Vec4> generic_point_on(const Line& l, const std::vector<Line>& others) {
  for (const Scalar& t : sample_params()) {
    Vec4 p = line_point(l, t);
    bool ok = true;
    for (auto& o : others)
      if (!same_line(o, l) && on_line(o, p)) ok = false;
    if (ok) return p;
  }
  return std::nullopt;
}

std::optional<Vec4> generic_point_off(const std::vector<Line>& lines) {
  for (long k = 0; k < 8; ++k) {
    Vec4 p = v4(q(k), q(101 + k), q(103 - 2 * k), q(107 + 5 * k));
    if (!on_any(lines, p)) return p;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Candidates> incidence_orbit(Evaluator& ev, const Block& b, const std::string& var,
                                          Sort sort, const std::set<std::string>& unbound) {
  std::vector<Lit> leaves;
  ev.leaves_with(*b.body, var, leaves);
  if (leaves.empty()) return std::nullopt;
  Candidates c;
  c.exact = true;
  if (sort == Sort::Ob) {
    std::vector<Vec4> pts;
    std::vector<Entity> eq;
    for (auto& l : leaves) {
      const auto& a = *l.args;
      if (!all_known(ev, a, var, unbound)) return std::nullopt;
      if (l.pred == "=") {
        const Observer* o = ev.observer(a[0] == var ? a[1] : a[0]);
        if (!o) return std::nullopt;
        add_unique(eq, *o);
      } else if ((l.pred == "T" || l.pred == "R" || l.pred == "TR") && a[0] == var) {
        const Signal* s = ev.signal(a[1]);
        if (!s) return std::nullopt;
        if (l.pred != "R") add_point(pts, s->beg);
        if (l.pred != "T") add_point(pts, s->end);
      } else {
        return std::nullopt;
      }
    }
    for (auto& e : eq) add_unique(c.values, e);
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i + 1; j < pts.size(); ++j)
        if (auto o = try_observer(ev.kind(), pts[i], Vec4(pts[j] - pts[i])))
          add_unique(c.values, *o);
    for (auto& p : pts) {
      if (auto o = generic_line(ev, p, pts, eq))
        add_unique(c.values, *o);
      else
        c.exact = false;
    }
    if (auto o = generic_line(ev, std::nullopt, pts, eq))
      add_unique(c.values, *o);
    else
      c.exact = false;
    return c;
  }

  std::vector<Line> lines;
  std::vector<Entity> eq;
  for (auto& l : leaves) {
    const auto& a = *l.args;
    if (!all_known(ev, a, var, unbound)) return std::nullopt;
    if (l.pred == "=") {
      const Signal* s = ev.signal(a[0] == var ? a[1] : a[0]);
      if (!s) return std::nullopt;
      add_unique(eq, *s);
    } else if ((l.pred == "T" || l.pred == "R" || l.pred == "TR") && a[1] == var) {
      const Observer* o = ev.observer(a[0]);
      if (!o) return std::nullopt;
      add_line(lines, o->line);
    } else {
      return std::nullopt;
    }
  }
  if (lines.size() > 2) c.exact = false;
  for (auto& e : eq) add_unique(c.values, e);
  auto sig = [&](const Vec4& s, const Vec4& e) {
    if (auto x = try_signal(s, e)) add_unique(c.values, *x);
  };
  // Representative points: pairwise intersections, a generic point per line, one off all lines.
  std::vector<Vec4> crossings;
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = i + 1; j < lines.size(); ++j) {
      Intersection in = lines_intersect(lines[i], lines[j]);
      if (in.kind == Meet::Point) add_point(crossings, in.point);
    }
  std::vector<std::pair<Vec4, int>> reps;  // point and line index (-1 off, -2 crossing)
  for (auto& p : crossings) reps.emplace_back(p, -2);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (auto p = generic_point_on(lines[i], lines))
      reps.emplace_back(*p, static_cast<int>(i));
    else
      c.exact = false;
  }
  auto off = generic_point_off(lines);
  if (off)
    reps.emplace_back(*off, -1);
  else
    c.exact = false;
  for (auto& [p, kind] : reps) add_unique(c.values, event_at(p));

  auto off_target = [&](const Vec4& p, int sign) -> std::optional<Vec4> {
    for (const Vec4& k : null_directions())
      for (long m : {1, 3}) {
        Vec4 x = p + k * q(sign * m);
        if (!on_any(lines, x)) return x;
      }
    return std::nullopt;
  };
  for (auto& [p, kind] : reps) {
    // To somewhere off every line.
    if (auto x = off_target(p, 1))
      sig(p, *x);
    else
      c.exact = false;
    // Onto each line, from a point off the lines and from crossings.
    if (kind == -1 || kind == -2)
      for (auto& l : lines)
        for (auto& x : null_targets_on(l, p))
          if (!vec_equal(x, p)) sig(p, x);
    // Ending at a line point or crossing, from off the lines.
    if (kind != -1) {
      if (auto x = off_target(p, -1))
        sig(*x, p);
      else
        c.exact = false;
      for (auto& l : lines)
        for (auto& x : null_sources_on(l, p))
          if (!vec_equal(x, p)) sig(x, p);
    }
  }
  // Between two distinct lines, from a generic point of one to a generic point of the other.
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = 0; j < lines.size(); ++j) {
      if (i == j) continue;
      const Line& l1 = lines[i];
      const Line& l2 = lines[j];
      Vec4 w0 = l2.base - l1.base;
      const Vec4& u = l1.dir;
      const Vec4& v = l2.dir;
      Scalar uv = inner(u, v), w0v = inner(w0, v), w0u = inner(w0, u);
      Scalar lv = mnorm(v), lu = mnorm(u), lw = mnorm(w0);
      Scalar a2 = uv * uv - lv * lu;
      Scalar a1 = Scalar(-2) * w0v * uv + Scalar(2) * lv * w0u;
      Scalar a0 = w0v * w0v - lv * lw;
      std::vector<Scalar> crit = quadratic_roots(a2, a1, a0);
      Intersection in = lines_intersect(l1, l2);
      if (in.kind == Meet::Point) crit.push_back(line_param(l1, in.point));
      std::sort(crit.begin(), crit.end());
      std::vector<Scalar> ss;
      if (crit.empty()) {
        ss = {q(0), q(1), q(-1)};
      } else {
        ss.push_back(crit.front() - Scalar(1));
        for (size_t k = 0; k < crit.size(); ++k) {
          ss.push_back(crit[k]);
          if (k + 1 < crit.size()) ss.push_back((crit[k] + crit[k + 1]) / Scalar(2));
        }
        ss.push_back(crit.back() + Scalar(1));
      }
      bool found = false;
      for (const Scalar& s : ss) {
        Vec4 p = line_point(l1, s);
        if (on_line(l2, p)) continue;
        for (auto& x : null_targets_on(l2, p)) {
          if (on_line(l1, x)) continue;
          sig(p, x);
          found = true;
        }
        if (found) break;
      }
    }
  return c;
}

}  // namespace relcheck::detail
