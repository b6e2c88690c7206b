#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

#include "verifier_internal.hpp"

namespace relcheck {

namespace {

using Args = std::vector<const Entity*>;
using Fn = std::function<bool(const Args&)>;

const Observer& ob(const Args& a, size_t i) {
  if (!std::holds_alternative<Observer>(*a[i])) throw std::invalid_argument("expected an observer");
  return std::get<Observer>(*a[i]);
}
const Signal& si(const Args& a, size_t i) {
  if (!std::holds_alternative<Signal>(*a[i])) throw std::invalid_argument("expected a signal");
  return std::get<Signal>(*a[i]);
}

bool is_stl(const Observer& a) { return observer_class(a) == ObserverClass::STL; }

// Balls are defined through Bw and Eq, which need a slower-than-light family.
bool ball(const Args& a, bool inside) {
  return inside ? in_ball(ob(a, 0), ob(a, 1), ob(a, 2)) : out_ball(ob(a, 0), ob(a, 1), ob(a, 2));
}

const std::map<std::string, Fn>& registry() {
  static const std::map<std::string, Fn> r = {
      {"Ev", [](const Args& a) { return is_event(si(a, 0)); }},
      {"M", [](const Args& a) { return meets(ob(a, 0), ob(a, 1)); }},
      {"Cop", [](const Args& a) { return coplanar(ob(a, 0), ob(a, 1)); }},
      {"Par", [](const Args& a) { return parallel(ob(a, 0), ob(a, 1)); }},
      {"IsBeg", [](const Args& a) { return is_beg(si(a, 0), si(a, 1)); }},
      {"IsEnd", [](const Args& a) { return is_end(si(a, 0), si(a, 1)); }},
      {"L", [](const Args& a) { return lightlike(si(a, 0), si(a, 1)); }},
      {"l", [](const Args& a) { return light_between(si(a, 0), si(a, 1)); }},
      {"Chron", [](const Args& a) { return chron_precedes(si(a, 0), si(a, 1)); }},
      {"Bw", [](const Args& a) { return bw_geo(ob(a, 0), ob(a, 1), ob(a, 2)); }},
      {"Eq", [](const Args& a) { return eq_geo(ob(a, 0), ob(a, 1), ob(a, 2), ob(a, 3)); }},
      {"Sim", [](const Args& a) { return sim_geo(ob(a, 0), si(a, 1), si(a, 2)); }},
      {"Delta",
       [](const Args& a) { return delta_geo(ob(a, 0), si(a, 1), si(a, 2), si(a, 3), si(a, 4)); }},
      {"STL", [](const Args& a) { return is_stl(ob(a, 0)); }},
      {"Tau", [](const Args& a) { return tau_holds(ob(a, 0), ob(a, 1), si(a, 2), si(a, 3)); }},
      {"Lightspeed",
       [](const Args& a) { return observer_class(ob(a, 0)) == ObserverClass::Lightspeed; }},
      {"FTL", [](const Args& a) { return observer_class(ob(a, 0)) == ObserverClass::FTL; }},
      {"TR", [](const Args& a) { return incidence(ob(a, 0), si(a, 1)) != Incidence::Neither; }},
      {"Rho", [](const Args& a) { return rho(ob(a, 0), ob(a, 1)); }},
      {"OP", [](const Args& a) { return optical_plane(ob(a, 0), ob(a, 1)); }},
      {"BwRho", [](const Args& a) { return bw_rho(ob(a, 0), ob(a, 1), ob(a, 2)); }},
      {"EqRho", [](const Args& a) { return eq_rho(ob(a, 0), ob(a, 1), ob(a, 2), ob(a, 3)); }},
      {"Dual", [](const Args& a) { return is_relatable_dual(ob(a, 0), ob(a, 1), ob(a, 2)); }},
      {"BwFTL", [](const Args& a) { return bw_ftl(ob(a, 0), ob(a, 1), ob(a, 2)); }},
      {"EqFTL", [](const Args& a) { return eq_ftl(ob(a, 0), ob(a, 1), ob(a, 2), ob(a, 3)); }},
      {"SimFTL", [](const Args& a) { return sim_ftl(ob(a, 0), si(a, 1), si(a, 2)); }},
      {"DeltaFTL",
       [](const Args& a) { return delta_ftl(ob(a, 0), si(a, 1), si(a, 2), si(a, 3), si(a, 4)); }},
      {"TauFTL",
       [](const Args& a) { return tau_ftl_holds(ob(a, 0), ob(a, 1), si(a, 2), si(a, 3)); }},
      {"InBall", [](const Args& a) { return ball(a, true); }},
      {"OutBall", [](const Args& a) { return ball(a, false); }},
      {"InBallFTL", [](const Args& a) { return in_ball_ftl(ob(a, 0), ob(a, 1), ob(a, 2)); }},
      {"OutBallFTL", [](const Args& a) { return out_ball_ftl(ob(a, 0), ob(a, 1), ob(a, 2)); }},
  };
  return r;
}

constexpr std::size_t kWorkLimit = 400000;

Truth negate(Truth t) {
  if (t == Truth::True) return Truth::False;
  if (t == Truth::False) return Truth::True;
  return Truth::Unknown;
}

void append(Bindings& to, const Bindings& from) { to.insert(to.end(), from.begin(), from.end()); }

void flatten(const Formula& f, Kind k, std::vector<const Formula*>& out) {
  if (f.kind == k && !f.origin) {
    flatten(*f.lhs, k, out);
    flatten(*f.rhs, k, out);
  } else {
    out.push_back(&f);
  }
}

std::vector<detail::Branch> product(const std::vector<detail::Branch>& a,
                                    const std::vector<detail::Branch>& b) {
  std::vector<detail::Branch> out;
  for (auto& x : a)
    for (auto& y : b) {
      detail::Branch z = x;
      z.insert(z.end(), y.begin(), y.end());
      out.push_back(std::move(z));
    }
  return out;
}

std::vector<detail::Branch> join(std::vector<detail::Branch> a, const std::vector<detail::Branch>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

const char* to_string(Truth t) {
  switch (t) {
    case Truth::True: return "True";
    case Truth::False: return "False";
    case Truth::Unknown: return "Unknown";
  }
  return "Unknown";
}

void validate_budget(const Budget& b) {
  if (b.max_witness_candidates == 0 || b.max_sample_points == 0 || b.coordinate_bound == 0 ||
      b.seed == 0)
    throw std::invalid_argument("budget fields must be positive");
}

bool is_registered(const std::string& name) { return registry().count(name) > 0; }

std::vector<std::string> registered_predicates() {
  std::vector<std::string> out;
  for (auto& [k, v] : registry()) out.push_back(k);
  return out;
}

bool evaluate_registered(const std::string& name, const std::vector<const Entity*>& args) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("no registered evaluator for " + name);
  return it->second(args);
}

Verdict evaluate_bounded(const FormulaPtr& f, ModelKind model, const Assignment& assignment,
                         const Budget& budget, const DefinitionTable* defs,
                         const EvalContext& ctx) {
  validate_budget(budget);
  detail::Evaluator ev(model, budget, defs, ctx);
  return ev.run(f, assignment);
}

namespace detail {

Evaluator::Evaluator(ModelKind kind, const Budget& budget, const DefinitionTable* defs,
                     const EvalContext& ctx)
    : kind_(kind), budget_(budget), defs_(defs), ctx_(ctx), rng_(budget.seed) {}

Verdict Evaluator::run(const FormulaPtr& f, const Assignment& a) {
  root_ = f.get();
  env_.clear();
  for (auto& [k, v] : a) env_.emplace_back(k, v);
  Res r = eval(*f);
  return Verdict{r.t, std::move(r.w), std::move(r.why)};
}

const Entity* Evaluator::lookup(const std::string& name) const {
  for (auto it = env_.rbegin(); it != env_.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

const Observer* Evaluator::observer(const std::string& name) const {
  const Entity* e = lookup(name);
  return e ? std::get_if<Observer>(e) : nullptr;
}

const Signal* Evaluator::signal(const std::string& name) const {
  const Entity* e = lookup(name);
  return e ? std::get_if<Signal>(e) : nullptr;
}

std::string Evaluator::current_origin() const {
  return origins_.empty() ? std::string() : origins_.back()->name;
}

bool Evaluator::is_leaf(const Formula& f) const {
  if (f.kind == Kind::Atom || f.kind == Kind::Defined) return true;
  if (!f.origin || !is_registered(f.origin->name)) return false;
  return !(ctx_.structural_root && &f == root_);
}

const std::set<std::string>& Evaluator::free_of(const Formula& f) {
  auto it = free_cache_.find(&f);
  if (it != free_cache_.end()) return it->second;
  std::set<std::string> out;
  if (f.kind == Kind::Atom || f.kind == Kind::Defined) {
    out.insert(f.args.begin(), f.args.end());
  } else if (f.origin && is_leaf(f)) {
    out.insert(f.origin->args.begin(), f.origin->args.end());
  } else if (is_quantifier(f.kind)) {
    out = free_of(*f.lhs);
    out.erase(f.var);
  } else {
    out = free_of(*f.lhs);
    if (f.rhs) {
      const auto& r = free_of(*f.rhs);
      out.insert(r.begin(), r.end());
    }
  }
  return free_cache_.emplace(&f, std::move(out)).first->second;
}

std::vector<std::pair<std::string, Entity>> Evaluator::visible(
    const Formula& body, const std::set<std::string>& exclude) {
  std::vector<std::pair<std::string, Entity>> out;
  for (const std::string& n : free_of(body)) {
    if (exclude.count(n)) continue;
    if (const Entity* e = lookup(n)) out.emplace_back(n, *e);
  }
  return out;
}

void Evaluator::leaves_with(const Formula& f, const std::string& var, std::vector<Lit>& out) {
  if (is_leaf(f)) {
    if (f.kind == Kind::Atom) {
      static const std::string names[] = {"T", "R", "="};
      if (std::find(f.args.begin(), f.args.end(), var) != f.args.end())
        out.push_back(Lit{names[static_cast<int>(f.prim)], &f.args, true});
    } else if (f.kind == Kind::Defined) {
      if (std::find(f.args.begin(), f.args.end(), var) != f.args.end())
        out.push_back(Lit{f.name, &f.args, true});
    } else {
      const auto& args = f.origin->args;
      if (std::find(args.begin(), args.end(), var) != args.end())
        out.push_back(Lit{f.origin->name, &args, true});
    }
    return;
  }
  if (is_quantifier(f.kind)) {
    if (f.var == var) return;
    leaves_with(*f.lhs, var, out);
    return;
  }
  leaves_with(*f.lhs, var, out);
  if (f.rhs) leaves_with(*f.rhs, var, out);
}

Res Evaluator::eval(const Formula& f) {
  if (is_leaf(f)) return eval_leaf(f);
  const bool tagged = f.origin != nullptr;
  if (tagged) origins_.push_back(f.origin.get());
  Res out;
  switch (f.kind) {
    case Kind::Not: {
      out = eval(*f.lhs);
      out.t = negate(out.t);
      break;
    }
    case Kind::And:
    case Kind::Or: {
      const Truth stop = f.kind == Kind::And ? Truth::False : Truth::True;
      Res l = eval(*f.lhs);
      if (l.t == stop) {
        out = std::move(l);
        break;
      }
      Res r = eval(*f.rhs);
      if (r.t == stop) {
        out = std::move(r);
        break;
      }
      if (l.t == Truth::Unknown || r.t == Truth::Unknown) {
        out.t = Truth::Unknown;
        out.why = l.t == Truth::Unknown ? l.why : r.why;
        break;
      }
      out.t = negate(stop);
      out.w = std::move(l.w);
      append(out.w, r.w);
      break;
    }
    case Kind::Implies: {
      Res l = eval(*f.lhs);
      if (l.t == Truth::False) {
        out.t = Truth::True;
        out.w = std::move(l.w);
        break;
      }
      Res r = eval(*f.rhs);
      if (r.t == Truth::True) {
        out = std::move(r);
        break;
      }
      if (l.t == Truth::True && r.t == Truth::False) {
        out.t = Truth::False;
        out.w = std::move(l.w);
        append(out.w, r.w);
        break;
      }
      out.t = Truth::Unknown;
      out.why = l.t == Truth::Unknown ? l.why : r.why;
      break;
    }
    case Kind::Iff: {
      Res l = eval(*f.lhs);
      if (l.t == Truth::Unknown) {
        out = std::move(l);
        break;
      }
      Res r = eval(*f.rhs);
      if (r.t == Truth::Unknown) {
        out = std::move(r);
        break;
      }
      out.t = l.t == r.t ? Truth::True : Truth::False;
      out.w = std::move(l.w);
      append(out.w, r.w);
      break;
    }
    case Kind::Forall:
    case Kind::Exists: out = eval_quantifier(f); break;
    case Kind::ExistsUnique: out = eval_unique(f); break;
    default: out = eval_leaf(f); break;
  }
  if (tagged) origins_.pop_back();
  return out;
}

Res Evaluator::eval_leaf(const Formula& f) {
  if (++work_ > kWorkLimit) return Res{Truth::Unknown, {}, "work budget exhausted"};
  if (f.kind == Kind::Atom) {
    const Entity* x = lookup(f.args[0]);
    const Entity* y = lookup(f.args[1]);
    if (!x || !y) return Res{Truth::Unknown, {}, "unbound variable"};
    bool v = false;
    if (f.prim == Prim::Eq) {
      v = entity_equal(*x, *y);
    } else {
      const Observer* o = std::get_if<Observer>(x);
      const Signal* s = std::get_if<Signal>(y);
      if (!o || !s) return Res{Truth::Unknown, {}, "ill-sorted assignment"};
      v = f.prim == Prim::T ? transmits(*o, *s) : receives(*o, *s);
    }
    return Res{v ? Truth::True : Truth::False, {}, {}};
  }
  if (f.kind == Kind::Defined) return eval_predicate(f.name, f.args, f);
  return eval_predicate(f.origin->name, f.origin->args, f);
}

Res Evaluator::eval_predicate(const std::string& name, const std::vector<std::string>& args,
                              const Formula& f) {
  auto it = registry().find(name);
  if (it == registry().end()) {
    if (!defs_ || !defs_->contains(name))
      return Res{Truth::Unknown, {}, name + ": no evaluator and no definition"};
    FormulaPtr body = expand_defined(mk_defined(name, args), *defs_, 1);
    keep_alive_.push_back(body);
    return eval(*body);
  }
  std::vector<const Entity*> vals;
  for (const std::string& a : args) {
    const Entity* e = lookup(a);
    if (!e) return Res{Truth::Unknown, {}, "unbound variable " + a};
    vals.push_back(e);
  }
  (void)f;
  try {
    return Res{it->second(vals) ? Truth::True : Truth::False, {}, {}};
  } catch (const Unsupported& e) {
    return Res{Truth::Unknown, {}, name + ": " + e.what()};
  } catch (const ScalarError& e) {
    return Res{Truth::Unknown, {}, name + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    return Res{Truth::Unknown, {}, name + ": " + e.what()};
  }
}

Res Evaluator::eval_quantifier(const Formula& q) {
  auto inst = ctx_.instantiated.find(&q);
  if (inst != ctx_.instantiated.end()) {
    push(q.var, inst->second);
    Res r = eval(*q.lhs);
    pop();
    r.w.insert(r.w.begin(), Binding{q.var, inst->second});
    return r;
  }
  Block b;
  b.kind = q.kind;
  const Formula* cur = &q;
  while (true) {
    b.vars.emplace_back(cur->var, cur->sort);
    const Formula* next = cur->lhs.get();
    if (next->kind != q.kind || next->origin || ctx_.instantiated.count(next)) {
      b.body = next;
      break;
    }
    cur = next;
  }
  for (const std::string& scope : {current_origin(), ctx_.entry}) {
    if (scope.empty()) continue;
    if (const BlockDecider* d = find_decider(scope + "/" + b.vars.front().first)) {
      try {
        if (auto r = (*d)(*this, b)) return *r;
      } catch (const ScalarError& e) {
        return Res{Truth::Unknown, {}, std::string("capacity: ") + e.what()};
      } catch (const Unsupported& e) {
        return Res{Truth::Unknown, {}, e.what()};
      }
    }
  }
  std::vector<std::string> all;
  for (auto& v : b.vars) all.push_back(v.first);
  return solve(b, all, "");
}

std::optional<Res> Evaluator::settle(const Block& b, const std::set<std::string>& unbound,
                                     const std::string& just_bound) {
  auto ready = [&](const Formula& c) {
    const auto& fv = free_of(c);
    for (const auto& u : unbound)
      if (fv.count(u)) return false;
    return just_bound.empty() || fv.count(just_bound) > 0;
  };
  std::vector<const Formula*> parts;
  if (b.kind == Kind::Exists) {
    flatten(*b.body, Kind::And, parts);
    for (const Formula* c : parts)
      if (ready(*c) && eval(*c).t == Truth::False) return Res{Truth::False, {}, {}};
    return std::nullopt;
  }
  const Formula& body = *b.body;
  if (body.kind == Kind::Implies && !body.origin) {
    flatten(*body.lhs, Kind::And, parts);
    for (const Formula* c : parts)
      if (ready(*c) && eval(*c).t == Truth::False) return Res{Truth::True, {}, {}};
    if (ready(*body.rhs) && eval(*body.rhs).t == Truth::True) return Res{Truth::True, {}, {}};
  } else if (body.kind == Kind::And && !body.origin) {
    flatten(body, Kind::And, parts);
    for (const Formula* c : parts)
      if (ready(*c) && eval(*c).t == Truth::False) return Res{Truth::False, {}, {}};
  } else if (body.kind == Kind::Or && !body.origin) {
    flatten(body, Kind::Or, parts);
    for (const Formula* c : parts)
      if (ready(*c) && eval(*c).t == Truth::True) return Res{Truth::True, {}, {}};
  }
  return std::nullopt;
}

Res Evaluator::solve(const Block& b, std::vector<std::string> unbound,
                     const std::string& just_bound) {
  const bool want_true = b.kind == Kind::Exists;
  std::set<std::string> uset(unbound.begin(), unbound.end());
  if (auto s = settle(b, uset, just_bound)) return *s;
  if (unbound.empty()) return eval(*b.body);
  if (work_ > kWorkLimit) return Res{Truth::Unknown, {}, "work budget exhausted"};

  std::string best_var;
  Sort best_sort = Sort::Ob;
  Candidates best;
  bool have = false;
  for (const std::string& v : unbound) {
    Sort s = Sort::Ob;
    for (auto& [n, so] : b.vars)
      if (n == v) s = so;
    Candidates c = candidates(b, v, s, uset, want_true);
    auto better = [&]() {
      if (!have) return true;
      if (c.exact != best.exact) return c.exact;
      return c.values.size() < best.values.size();
    };
    if (better()) {
      best_var = v;
      best_sort = s;
      best = std::move(c);
      have = true;
    }
    if (best.exact && best.values.size() <= 1) break;
  }
  std::vector<std::string> rest;
  for (auto& v : unbound)
    if (v != best_var) rest.push_back(v);

  const std::size_t n = std::min(best.values.size(), cap());
  const bool truncated = best.values.size() > n;
  bool unknown = false;
  std::string why;
  for (std::size_t i = 0; i < n; ++i) {
    push(best_var, best.values[i]);
    Res r = solve(b, rest, best_var);
    pop();
    if (r.t == (want_true ? Truth::True : Truth::False)) {
      r.w.insert(r.w.begin(), Binding{best_var, best.values[i]});
      return r;
    }
    if (r.t == Truth::Unknown) {
      if (!unknown) why = r.why;
      unknown = true;
    }
  }
  if (best.exact && !truncated && !unknown)
    return Res{want_true ? Truth::False : Truth::True, {}, {}};
  if (!best.exact || truncated) {
    why = std::string(want_true ? "exists " : "forall ") + best_var + ":" + to_string(best_sort) +
          ": no " + (want_true ? "witness" : "counterexample") + " among " + std::to_string(n) +
          " candidates";
  }
  return Res{Truth::Unknown, {}, why};
}

Res Evaluator::eval_unique(const Formula& q) {
  Block b;
  b.kind = Kind::Exists;
  b.vars.emplace_back(q.var, q.sort);
  b.body = q.lhs.get();
  Candidates c = candidates(b, q.var, q.sort, {q.var}, true);
  const std::size_t n = std::min(c.values.size(), cap());
  std::vector<std::size_t> hits;
  bool unknown = false;
  std::string why;
  for (std::size_t i = 0; i < n; ++i) {
    push(q.var, c.values[i]);
    Res r = eval(*q.lhs);
    pop();
    if (r.t == Truth::True) {
      hits.push_back(i);
      if (hits.size() == 2)
        return Res{Truth::False,
                   {Binding{q.var, c.values[hits[0]]}, Binding{q.var, c.values[hits[1]]}},
                   {}};
    } else if (r.t == Truth::Unknown) {
      if (!unknown) why = r.why;
      unknown = true;
    }
  }
  const bool complete = n == c.values.size() && !unknown;
  if (hits.size() == 1 && complete && c.all_values)
    return Res{Truth::True, {Binding{q.var, c.values[hits[0]]}}, {}};
  if (hits.empty() && complete && c.exact) return Res{Truth::False, {}, {}};
  if (why.empty() || complete)
    why = "exists! " + q.var + ":" + to_string(q.sort) + ": uniqueness not settled among " +
          std::to_string(n) + " candidates";
  return Res{Truth::Unknown, {}, why};
}

void Evaluator::branches(const Formula& f, bool positive, const std::set<std::string>& unbound,
                         std::vector<Branch>& out, bool& overflow) {
  constexpr std::size_t kMaxBranches = 64;
  std::function<std::vector<Branch>(const Formula&, bool)> go =
      [&](const Formula& g, bool pos) -> std::vector<Branch> {
    if (overflow) return {Branch{}};
    if (is_leaf(g)) {
      static const std::string names[] = {"T", "R", "="};
      if (g.kind == Kind::Atom) return {Branch{Lit{names[static_cast<int>(g.prim)], &g.args, pos}}};
      if (g.kind == Kind::Defined) return {Branch{Lit{g.name, &g.args, pos}}};
      return {Branch{Lit{g.origin->name, &g.origin->args, pos}}};
    }
    std::vector<Branch> r;
    switch (g.kind) {
      case Kind::Not: r = go(*g.lhs, !pos); break;
      case Kind::And:
        r = pos ? product(go(*g.lhs, true), go(*g.rhs, true))
                : join(go(*g.lhs, false), go(*g.rhs, false));
        break;
      case Kind::Or:
        r = pos ? join(go(*g.lhs, true), go(*g.rhs, true))
                : product(go(*g.lhs, false), go(*g.rhs, false));
        break;
      case Kind::Implies:
        r = pos ? join(go(*g.lhs, false), go(*g.rhs, true))
                : product(go(*g.lhs, true), go(*g.rhs, false));
        break;
      case Kind::Iff:
        r = pos ? join(product(go(*g.lhs, true), go(*g.rhs, true)),
                       product(go(*g.lhs, false), go(*g.rhs, false)))
                : join(product(go(*g.lhs, true), go(*g.rhs, false)),
                       product(go(*g.lhs, false), go(*g.rhs, true)));
        break;
      case Kind::Exists:
      case Kind::Forall: {
        const bool descend = (g.kind == Kind::Exists) == pos;
        if (!descend || unbound.count(g.var) || lookup(g.var)) return {Branch{}};
        r = go(*g.lhs, pos);
        break;
      }
      default: return {Branch{}};
    }
    if (r.size() > kMaxBranches) {
      overflow = true;
      return {Branch{}};
    }
    return r;
  };
  out = go(f, positive);
  if (overflow) out = {Branch{}};
}

Candidates Evaluator::candidates(const Block& b, const std::string& var, Sort sort,
                                 const std::set<std::string>& unbound, bool searching_true) {
  Candidates keyed;
  bool have_keyed = false;
  for (const std::string& scope : {current_origin(), ctx_.entry}) {
    if (scope.empty() || have_keyed) continue;
    if (const Provider* p = find_provider(scope + "/" + var)) {
      try {
        if (auto c = (*p)(*this, b, var, unbound)) {
          if (c->exact) return *c;
          keyed = std::move(*c);
          have_keyed = true;
        }
      } catch (const ScalarError&) {
      } catch (const Unsupported&) {
      }
    }
  }
  try {
    if (auto c = class_orbit(*this, b, var, sort, unbound)) return *c;
    if (auto c = incidence_orbit(*this, b, var, sort, unbound)) {
      if (c->exact) return *c;
    }
  } catch (const ScalarError&) {
  }

  std::vector<Branch> brs;
  bool overflow = false;
  branches(*b.body, searching_true, unbound, brs, overflow);
  Candidates out;
  out.exact = !overflow;
  out.all_values = !overflow;
  for (const Branch& br : brs) {
    Candidates c;
    try {
      c = solve_branch(*this, b, br, var, sort, unbound);
    } catch (const ScalarError&) {
      c = Candidates{};
    }
    out.exact = out.exact && c.exact;
    out.all_values = out.all_values && c.all_values;
    for (auto& v : c.values) add_unique(out.values, v);
  }
  if (have_keyed) {
    std::vector<Entity> merged = keyed.values;
    for (auto& v : out.values) add_unique(merged, v);
    out.values = std::move(merged);
  }
  if (!out.exact) {
    Candidates s = sample_values(*this, b, sort);
    for (auto& v : s.values) add_unique(out.values, v);
  }
  return out;
}

}  // namespace detail
}  // namespace relcheck
