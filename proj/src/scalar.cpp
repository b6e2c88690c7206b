#include "relcheck/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace relcheck {

using Vec = std::vector<mpq_class>;

struct Gen {
  int level = 1;
  std::string key;  // rendering of the radicand
  Scalar radicand;  // value over its own minimal tower
  Vec rad;          // radicand embedded over the prefix of this tower
};

class Tower {
 public:
  std::vector<Gen> gens;
  std::string key;
  int depth = 0;
  std::unordered_map<std::string, int> index;
  int size() const { return static_cast<int>(gens.size()); }
};

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

TowerLimits& limits_ref() {
  static TowerLimits l;
  return l;
}

bool all_zero(const mpq_class* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (sgn(x[i]) != 0) return false;
  return true;
}

std::string rat_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace

// Arithmetic on raw coefficient vectors over the first k generators of a tower.
class TowerOps {
 public:
  explicit TowerOps(const Tower* t) : t_(t) {}

  Vec mul(int k, const mpq_class* x, const mpq_class* y) const {
    if (k == 0) return Vec{x[0] * y[0]};
    const std::size_t h = std::size_t{1} << (k - 1);
    const bool bx = all_zero(x + h, h), by = all_zero(y + h, h);
    Vec out(2 * h);
    Vec ac = mul(k - 1, x, y);
    std::copy(ac.begin(), ac.end(), out.begin());
    if (!bx && !by) {
      Vec bd = mul(k - 1, x + h, y + h);
      Vec bdr = mul(k - 1, bd.data(), t_->gens[k - 1].rad.data());
      for (std::size_t i = 0; i < h; ++i) out[i] += bdr[i];
    }
    if (!by) {
      Vec ad = mul(k - 1, x, y + h);
      for (std::size_t i = 0; i < h; ++i) out[h + i] += ad[i];
    }
    if (!bx) {
      Vec bc = mul(k - 1, x + h, y);
      for (std::size_t i = 0; i < h; ++i) out[h + i] += bc[i];
    }
    return out;
  }

  Vec inv(int k, const mpq_class* x) const {
    if (k == 0) {
      if (sgn(x[0]) == 0) throw DivisionByZero();
      return Vec{1 / mpq_class(x[0])};
    }
    const std::size_t h = std::size_t{1} << (k - 1);
    Vec a(x, x + h), b(x + h, x + 2 * h);
    Vec aa = mul(k - 1, a.data(), a.data());
    if (!all_zero(b.data(), h)) {
      Vec bb = mul(k - 1, b.data(), b.data());
      Vec bbr = mul(k - 1, bb.data(), t_->gens[k - 1].rad.data());
      for (std::size_t i = 0; i < h; ++i) aa[i] -= bbr[i];
    }
    Vec ni = inv(k - 1, aa.data());
    Vec lo = mul(k - 1, a.data(), ni.data());
    Vec hi = mul(k - 1, b.data(), ni.data());
    Vec out(2 * h);
    for (std::size_t i = 0; i < h; ++i) {
      out[i] = lo[i];
      out[h + i] = -hi[i];
    }
    return out;
  }

  int sign(int k, const mpq_class* x) const {
    if (k == 0) return sgn(x[0]);
    const std::size_t h = std::size_t{1} << (k - 1);
    const int sb = all_zero(x + h, h) ? 0 : sign(k - 1, x + h);
    const int sa = sign(k - 1, x);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sa == 0 ? sb : sa;
    // a and b g have opposite signs: compare a^2 with b^2 r.
    Vec aa = mul(k - 1, x, x);
    Vec bb = mul(k - 1, x + h, x + h);
    Vec bbr = mul(k - 1, bb.data(), t_->gens[k - 1].rad.data());
    for (std::size_t i = 0; i < h; ++i) aa[i] -= bbr[i];
    return sa * sign(k - 1, aa.data());
  }

  // Non-negative square root inside the first k generators, if one exists.
  std::optional<Vec> sqrt_search(int k, const mpq_class* x) const {
    const std::size_t n = std::size_t{1} << k;
    if (sign(k, x) < 0) return std::nullopt;
    if (all_zero(x, n)) return Vec(n);
    if (k == 0) return rational_sqrt(x[0]);
    const std::size_t h = n / 2;
    const Vec& r = t_->gens[k - 1].rad;
    Vec a(x, x + h), b(x + h, x + n);
    if (all_zero(b.data(), h)) {
      if (auto s = sqrt_search(k - 1, a.data())) {
        Vec out(n);
        std::copy(s->begin(), s->end(), out.begin());
        return out;
      }
      Vec rinv = inv(k - 1, r.data());
      Vec q = mul(k - 1, a.data(), rinv.data());
      if (auto s = sqrt_search(k - 1, q.data())) {
        Vec out(n);
        std::copy(s->begin(), s->end(), out.begin() + h);
        return out;
      }
      return std::nullopt;
    }
    Vec nrm = mul(k - 1, a.data(), a.data());
    {
      Vec bb = mul(k - 1, b.data(), b.data());
      Vec bbr = mul(k - 1, bb.data(), r.data());
      for (std::size_t i = 0; i < h; ++i) nrm[i] -= bbr[i];
    }
    auto s = sqrt_search(k - 1, nrm.data());
    if (!s) return std::nullopt;
    for (int sg : {1, -1}) {
      Vec c2(h);
      for (std::size_t i = 0; i < h; ++i) c2[i] = (a[i] + sg * (*s)[i]) / 2;
      auto c = sqrt_search(k - 1, c2.data());
      if (!c || all_zero(c->data(), h)) continue;
      Vec twoc(h);
      for (std::size_t i = 0; i < h; ++i) twoc[i] = 2 * (*c)[i];
      Vec ic = inv(k - 1, twoc.data());
      Vec d = mul(k - 1, b.data(), ic.data());
      Vec y(n);
      std::copy(c->begin(), c->end(), y.begin());
      std::copy(d.begin(), d.end(), y.begin() + h);
      Vec yy = mul(k, y.data(), y.data());
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) ok = (yy[i] == x[i]);
      if (!ok) continue;
      if (sign(k, y.data()) < 0)
        for (auto& v : y) v = -v;
      return y;
    }
    return std::nullopt;
  }

  static std::optional<Vec> rational_sqrt(const mpq_class& q) {
    if (sgn(q) < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
      return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    mpq_class r(n, d);
    r.canonicalize();
    return Vec{r};
  }

  double to_double(int k, const mpq_class* x) const {
    if (k == 0) return x[0].get_d();
    const std::size_t h = std::size_t{1} << (k - 1);
    double a = to_double(k - 1, x), b = to_double(k - 1, x + h);
    double r = to_double(k - 1, t_->gens[k - 1].rad.data());
    return a + b * std::sqrt(std::max(r, 0.0));
  }

  // Scalar factory used by the tower machinery.
  static Scalar make(const Tower* t, Vec c) { return Scalar(t, std::move(c)); }

 private:
  const Tower* t_;
};

namespace {

struct Registry {
  std::map<std::string, std::unique_ptr<Tower>> towers;
  struct JoinInfo {
    const Tower* w = nullptr;
    std::vector<int> t_map;  // generator index in w for each generator of t
    std::vector<Vec> u_img;  // image of each generator of u, over w
  };
  std::map<std::pair<const Tower*, const Tower*>, JoinInfo> joins;
};

Registry& registry() {
  static Registry r;
  return r;
}

// Ordering of generators inside a tower: by nesting level, then by key.
bool gen_less(int la, const std::string& ka, int lb, const std::string& kb) {
  if (la != lb) return la < lb;
  if (ka.size() != kb.size()) return ka.size() < kb.size();
  return ka < kb;
}

// Embed x (over tower src) into w, where every generator of src occurs in w.
Vec remap(const Tower* src, const Vec& x, const Tower* w) {
  const int ws = w ? w->size() : 0;
  Vec out(std::size_t{1} << ws);
  if (!src) {
    out[0] = x[0];
    return out;
  }
  std::vector<int> idx(src->size());
  for (int i = 0; i < src->size(); ++i) idx[i] = w->index.at(src->gens[i].key);
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (sgn(x[m]) == 0) continue;
    std::size_t nm = 0;
    for (int i = 0; i < src->size(); ++i)
      if (m >> i & 1) nm |= std::size_t{1} << idx[i];
    out[nm] = x[m];
  }
  return out;
}

const Tower* intern_locked(std::vector<Scalar> radicands);

// Smallest tower (subset of t's generators) carrying x; returns projected vector.
std::pair<const Tower*, Vec> minimize_locked(const Tower* t, const Vec& x) {
  if (!t) return {nullptr, x};
  const int k = t->size();
  std::vector<bool> need(k, false);
  for (std::size_t m = 0; m < x.size(); ++m)
    if (sgn(x[m]) != 0)
      for (int i = 0; i < k; ++i)
        if (m >> i & 1) need[i] = true;
  for (int i = k - 1; i >= 0; --i) {
    if (!need[i]) continue;
    const Tower* rt = t->gens[i].radicand.tower();
    if (!rt) continue;
    for (const Gen& g : rt->gens) need[t->index.at(g.key)] = true;
  }
  if (std::all_of(need.begin(), need.end(), [](bool b) { return b; })) return {t, x};
  std::vector<Scalar> rads;
  std::vector<int> keep;
  for (int i = 0; i < k; ++i)
    if (need[i]) {
      keep.push_back(i);
      rads.push_back(t->gens[i].radicand);
    }
  const Tower* sub = intern_locked(rads);
  Vec out(std::size_t{1} << keep.size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (sgn(x[m]) == 0) continue;
    std::size_t nm = 0;
    for (std::size_t j = 0; j < keep.size(); ++j)
      if (m >> keep[j] & 1) nm |= std::size_t{1} << j;
    out[nm] = x[m];
  }
  return {sub, out};
}

std::string render_locked(const Scalar& s);

// Interns the tower with the given radicands (any order; sorted here).
const Tower* intern_locked(std::vector<Scalar> radicands) {
  if (radicands.empty()) return nullptr;
  struct Item {
    int level;
    std::string key;
    Scalar r;
  };
  std::vector<Item> items;
  for (auto& r : radicands) {
    int lvl = 1 + (r.tower() ? r.tower()->depth : 0);
    items.push_back({lvl, render_locked(r), r});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return gen_less(a.level, a.key, b.level, b.key);
  });
  std::string key;
  for (auto& it : items) key += "[" + it.key + "]";
  auto& reg = registry();
  auto found = reg.towers.find(key);
  if (found != reg.towers.end()) return found->second.get();
  auto t = std::make_unique<Tower>();
  t->key = key;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Gen g;
    g.level = items[i].level;
    g.key = items[i].key;
    g.radicand = items[i].r;
    t->index[g.key] = static_cast<int>(i);
    t->depth = std::max(t->depth, g.level);
    t->gens.push_back(std::move(g));
  }
  // Radicands are embedded over the prefix; the prefix is a valid tower since
  // generators are ordered by level.
  for (std::size_t i = 0; i < t->gens.size(); ++i) {
    Gen& g = t->gens[i];
    const Tower* rt = g.radicand.tower();
    Vec full = remap(rt, g.radicand.coefficients(), t.get());
    g.rad.assign(full.begin(), full.begin() + (std::size_t{1} << i));
  }
  const Tower* out = t.get();
  reg.towers.emplace(key, std::move(t));
  return out;
}

Scalar from_vec_locked(const Tower* t, const Vec& v) {
  auto [mt, mv] = minimize_locked(t, v);
  return TowerOps::make(mt, std::move(mv));
}

std::string render_locked(const Scalar& s) {
  const Tower* t = s.tower();
  if (!t) return rat_string(s.coefficients()[0]);
  const int k = t->size();
  const std::size_t h = std::size_t{1} << (k - 1);
  const Vec& c = s.coefficients();
  Vec a(c.begin(), c.begin() + h), b(c.begin() + h, c.end());
  // Prefix tower of the first k-1 generators.
  std::vector<Scalar> rads;
  for (int i = 0; i + 1 < k; ++i) rads.push_back(t->gens[i].radicand);
  const Tower* pre = intern_locked(rads);
  Scalar as = from_vec_locked(pre, a), bs = from_vec_locked(pre, b);
  std::string out = as.is_rational() ? render_locked(as) : "(" + render_locked(as) + ")";
  if (bs.is_rational()) {
    mpq_class bq = bs.coefficients()[0];
    out += sgn(bq) < 0 ? " - " : " + ";
    out += rat_string(abs(bq));
  } else {
    out += " + (" + render_locked(bs) + ")";
  }
  out += "*sqrt(" + t->gens[k - 1].key + ")";
  return out;
}

// Builds or fetches the join of two towers.
const Registry::JoinInfo& join_locked(const Tower* t, const Tower* u);

Vec embed_general(const Tower* w, const Registry::JoinInfo& ji, const Tower* u, const Vec& x) {
  const int ws = w ? w->size() : 0;
  const std::size_t n = std::size_t{1} << ws;
  Vec out(n);
  TowerOps ops(w);
  std::vector<Vec> basis(x.size());
  basis[0] = Vec(n);
  basis[0][0] = 1;
  for (std::size_t m = 1; m < x.size(); ++m) {
    int hi = 0;
    while ((m >> (hi + 1)) != 0) ++hi;
    std::size_t rest = m & ~(std::size_t{1} << hi);
    basis[m] = ops.mul(ws, basis[rest].data(), ji.u_img[hi].data());
  }
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (sgn(x[m]) == 0) continue;
    for (std::size_t i = 0; i < n; ++i) out[i] += x[m] * basis[m][i];
  }
  (void)u;
  return out;
}

void check_limits(const Tower* t) {
  if (!t) return;
  const auto& l = limits_ref();
  if (t->depth > l.max_depth)
    throw CapacityError("tower depth cap " + std::to_string(l.max_depth) + " exceeded");
  if (t->size() > l.max_generators)
    throw CapacityError("tower generator cap " + std::to_string(l.max_generators) + " exceeded");
}

// Adds a new generator sqrt(r) (r a Scalar not a square in its own tower)
// to tower w, returning the new tower.
const Tower* extend_locked(const Tower* w, const Scalar& r) {
  std::vector<Scalar> rads;
  if (w)
    for (const Gen& g : w->gens) rads.push_back(g.radicand);
  rads.push_back(r);
  const Tower* nt = intern_locked(rads);
  check_limits(nt);
  return nt;
}

// Clears denominators and square content of a radicand: r = (f/d)^2 * r'.
std::pair<mpq_class, Scalar> normalize_radicand_locked(const Scalar& r) {
  const Vec& c = r.coefficients();
  mpz_class den = 1;
  for (auto& q : c)
    if (sgn(q) != 0) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  // Multiply by den^2 to make coefficients integral.
  Vec ci(c.size());
  mpz_class g = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    ci[i] = c[i] * den * den;
    if (sgn(ci[i]) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ci[i].get_num_mpz_t());
  }
  // Extract square factors of the content by trial division.
  mpz_class f = 1, rem = g;
  for (unsigned long p = 2; p < 2000; ++p) {
    mpz_class pp = mpz_class(p) * p;
    if (pp > rem) break;
    while (mpz_divisible_p(rem.get_mpz_t(), pp.get_mpz_t())) {
      rem /= pp;
      f *= p;
    }
  }
  if (mpz_perfect_square_p(rem.get_mpz_t()) && rem > 1) {
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), rem.get_mpz_t());
    f *= s;
  }
  for (auto& q : ci) q /= mpq_class(f * f);
  mpq_class scale(f, den);
  scale.canonicalize();
  return {scale, TowerOps::make(r.tower(), ci)};
}

const Registry::JoinInfo& join_locked(const Tower* t, const Tower* u) {
  auto& reg = registry();
  auto key = std::make_pair(t, u);
  auto it = reg.joins.find(key);
  if (it != reg.joins.end()) return it->second;
  // Generators of u are processed in order; each either already occurs in the
  // working tower, has a square root there, or is adjoined.
  const Tower* w = t;
  std::vector<Scalar> u_vals;  // value of each u generator, as Scalars
  for (int j = 0; j < u->size(); ++j) {
    const Gen& g = u->gens[j];
    if (w && w->index.count(g.key)) {
      Vec e(std::size_t{1} << w->size());
      e[std::size_t{1} << w->index.at(g.key)] = 1;
      u_vals.push_back(TowerOps::make(w, e));
      continue;
    }
    // Express the radicand in w using the images of earlier generators.
    const Scalar& r = g.radicand;
    Scalar rw;
    if (r.is_rational()) {
      rw = r;
    } else {
      // r lives on a sub-tower of u's prefix; evaluate its polynomial form.
      const Tower* rt = r.tower();
      Vec acc(std::size_t{1} << (w ? w->size() : 0));
      TowerOps ops(w);
      const int ws = w ? w->size() : 0;
      for (std::size_t m = 0; m < r.coefficients().size(); ++m) {
        if (sgn(r.coefficients()[m]) == 0) continue;
        Vec term(acc.size());
        term[0] = r.coefficients()[m];
        for (int i = 0; i < rt->size(); ++i) {
          if (!(m >> i & 1)) continue;
          int uj = u->index.at(rt->gens[i].key);
          Vec img = remap(u_vals[uj].tower(), u_vals[uj].coefficients(), w);
          term = ops.mul(ws, term.data(), img.data());
        }
        for (std::size_t q = 0; q < acc.size(); ++q) acc[q] += term[q];
      }
      rw = from_vec_locked(w, acc);
    }
    // Square root of rw inside w?
    Vec rwv = remap(rw.tower(), rw.coefficients(), w);
    TowerOps ops(w);
    if (auto s = ops.sqrt_search(w ? w->size() : 0, rwv.data())) {
      u_vals.push_back(from_vec_locked(w, *s));
      continue;
    }
    auto [scale, rn] = normalize_radicand_locked(rw);
    const Tower* nw = extend_locked(w, rn);
    // Re-express previous images over the grown tower lazily via remap.
    Vec e(std::size_t{1} << nw->size());
    e[std::size_t{1} << nw->index.at(render_locked(rn))] = scale;
    u_vals.push_back(from_vec_locked(nw, e));
    w = nw;
  }
  Registry::JoinInfo ji;
  ji.w = w;
  if (t)
    for (const Gen& g : t->gens) ji.t_map.push_back(w->index.at(g.key));
  for (auto& v : u_vals) ji.u_img.push_back(remap(v.tower(), v.coefficients(), w));
  return reg.joins.emplace(key, std::move(ji)).first->second;
}

// Brings two scalars over one common tower.
const Tower* unify_locked(const Scalar& a, const Scalar& b, Vec& av, Vec& bv) {
  const Tower* ta = a.tower();
  const Tower* tb = b.tower();
  if (ta == tb) {
    av = a.coefficients();
    bv = b.coefficients();
    return ta;
  }
  if (!tb) {
    av = a.coefficients();
    bv = Vec(av.size());
    bv[0] = b.coefficients()[0];
    return ta;
  }
  if (!ta) {
    bv = b.coefficients();
    av = Vec(bv.size());
    av[0] = a.coefficients()[0];
    return tb;
  }
  const auto& ji = join_locked(ta, tb);
  av = remap(ta, a.coefficients(), ji.w);
  bool pure = true;
  for (std::size_t j = 0; j < ji.u_img.size() && pure; ++j) {
    int nz = 0;
    for (auto& q : ji.u_img[j]) nz += sgn(q) != 0;
    auto at = ji.w->index.find(tb->gens[j].key);
    pure = nz == 1 && at != ji.w->index.end() && ji.u_img[j][std::size_t{1} << at->second] == 1;
  }
  if (pure)
    bv = remap(tb, b.coefficients(), ji.w);
  else
    bv = embed_general(ji.w, ji, tb, b.coefficients());
  return ji.w;
}

}  // namespace

Scalar Scalar::rational(long num, long den) {
  if (den == 0) throw DivisionByZero();
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

const mpq_class& Scalar::rational_value() const {
  if (tower_) throw ScalarError("scalar is not rational");
  return c_[0];
}

int Scalar::sign() const {
  if (!tower_) return sgn(c_[0]);
  std::lock_guard<std::mutex> lk(registry_mutex());
  return TowerOps(tower_).sign(tower_->size(), c_.data());
}

double Scalar::to_double() const {
  if (!tower_) return c_[0].get_d();
  std::lock_guard<std::mutex> lk(registry_mutex());
  return TowerOps(tower_).to_double(tower_->size(), c_.data());
}

std::string Scalar::str() const { return render_scalar(*this); }

Scalar& Scalar::operator+=(const Scalar& o) {
  if (!tower_ && !o.tower_) {
    c_[0] += o.c_[0];
    return *this;
  }
  std::lock_guard<std::mutex> lk(registry_mutex());
  Vec a, b;
  const Tower* t = unify_locked(*this, o, a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  *this = from_vec_locked(t, a);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  if (!tower_ && !o.tower_) {
    c_[0] -= o.c_[0];
    return *this;
  }
  std::lock_guard<std::mutex> lk(registry_mutex());
  Vec a, b;
  const Tower* t = unify_locked(*this, o, a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  *this = from_vec_locked(t, a);
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (!tower_ && !o.tower_) {
    c_[0] *= o.c_[0];
    return *this;
  }
  std::lock_guard<std::mutex> lk(registry_mutex());
  if (!o.tower_) {
    for (auto& q : c_) q *= o.c_[0];
    *this = from_vec_locked(tower_, c_);
    return *this;
  }
  if (!tower_) {
    Vec v = o.c_;
    for (auto& q : v) q *= c_[0];
    *this = from_vec_locked(o.tower_, v);
    return *this;
  }
  Vec a, b;
  const Tower* t = unify_locked(*this, o, a, b);
  Vec p = TowerOps(t).mul(t->size(), a.data(), b.data());
  *this = from_vec_locked(t, p);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw DivisionByZero();
  if (!tower_ && !o.tower_) {
    c_[0] /= o.c_[0];
    return *this;
  }
  Scalar inv;
  {
    std::lock_guard<std::mutex> lk(registry_mutex());
    if (!o.tower_) {
      inv = Scalar(1 / o.c_[0]);
    } else {
      Vec v = TowerOps(o.tower_).inv(o.tower_->size(), o.c_.data());
      inv = from_vec_locked(o.tower_, v);
    }
  }
  return *this *= inv;
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  for (auto& q : r.c_) q = -q;
  return r;
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.tower_ == b.tower_) return a.c_ == b.c_;
  if (!a.tower_ || !b.tower_) return false;  // minimal towers differ
  return (a - b).is_zero();
}

bool operator<(const Scalar& a, const Scalar& b) {
  if (!a.tower_ && !b.tower_) return a.c_[0] < b.c_[0];
  return (a - b).sign() < 0;
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << render_scalar(s); }

Scalar arith(ArithOp op, const Scalar& a, const Scalar& b) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
  }
  return a;
}

Ordering compare(const Scalar& a, const Scalar& b) {
  int s = (a - b).sign();
  return s < 0 ? Ordering::LT : (s > 0 ? Ordering::GT : Ordering::EQ);
}

Scalar abs(const Scalar& s) { return s.sign() < 0 ? -s : s; }

bool try_sqrt_in_tower(const Scalar& a, Scalar& out) {
  if (a.sign() < 0) return false;
  std::lock_guard<std::mutex> lk(registry_mutex());
  const Tower* t = a.tower();
  auto s = TowerOps(t).sqrt_search(t ? t->size() : 0, a.coefficients().data());
  if (!s) return false;
  out = from_vec_locked(t, *s);
  return true;
}

Scalar sqrt_nonneg(const Scalar& a) {
  if (a.sign() < 0) throw DomainError("sqrt of negative scalar " + render_scalar(a));
  Scalar found;
  if (try_sqrt_in_tower(a, found)) return found;
  std::lock_guard<std::mutex> lk(registry_mutex());
  auto [scale, rn] = normalize_radicand_locked(a);
  if (rn.is_rational()) {
    // Rational radicand: strip remaining square factors of the integer.
    mpz_class m = rn.coefficients()[0].get_num();
    mpz_class f = 1;
    for (unsigned long p = 2; p < 10000; ++p) {
      mpz_class pp = mpz_class(p) * p;
      if (pp > m) break;
      while (mpz_divisible_p(m.get_mpz_t(), pp.get_mpz_t())) {
        m /= pp;
        f *= p;
      }
    }
    scale *= f;
    rn = Scalar(mpq_class(m));
  }
  const Tower* nt = extend_locked(a.tower(), rn);
  Vec e(std::size_t{1} << nt->size());
  e[std::size_t{1} << nt->index.at(render_locked(rn))] = scale;
  return from_vec_locked(nt, e);
}

TowerLimits tower_limits() {
  std::lock_guard<std::mutex> lk(registry_mutex());
  return limits_ref();
}

void set_tower_limits(TowerLimits limits) {
  std::lock_guard<std::mutex> lk(registry_mutex());
  limits_ref() = limits;
}

int nesting_depth(const Scalar& s) { return s.tower() ? s.tower()->depth : 0; }
int generator_count(const Scalar& s) { return s.tower() ? s.tower()->size() : 0; }

std::string render_scalar(const Scalar& s) {
  if (s.is_rational()) return rat_string(s.coefficients()[0]);
  std::lock_guard<std::mutex> lk(registry_mutex());
  return render_locked(s);
}

namespace {

class ScalarParser {
 public:
  explicit ScalarParser(std::string_view t) : s_(t) {}

  Scalar parse() {
    Scalar v = scalar();
    skip();
    if (p_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  Scalar scalar() {
    Scalar a = atom();
    skip();
    if (p_ < s_.size() && (s_[p_] == '+' || s_[p_] == '-')) {
      const bool neg = s_[p_] == '-';
      ++p_;
      Scalar c = atom();
      skip();
      expect('*');
      skip();
      if (s_.substr(p_, 5) != "sqrt(") fail("expected sqrt(");
      p_ += 5;
      Scalar r = scalar();
      skip();
      expect(')');
      Scalar root = sqrt_nonneg(r);
      return neg ? a - c * root : a + c * root;
    }
    return a;
  }

  Scalar atom() {
    skip();
    if (p_ < s_.size() && s_[p_] == '(') {
      ++p_;
      Scalar v = scalar();
      skip();
      expect(')');
      return v;
    }
    return rat();
  }

  Scalar rat() {
    skip();
    std::size_t start = p_;
    if (p_ < s_.size() && s_[p_] == '-') ++p_;
    std::size_t d0 = p_;
    while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
    if (p_ == d0) fail("expected digits");
    std::string num(s_.substr(start, p_ - start));
    std::string den = "1";
    if (p_ < s_.size() && s_[p_] == '/') {
      ++p_;
      std::size_t e0 = p_;
      while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
      if (p_ == e0) fail("expected denominator digits");
      den = std::string(s_.substr(e0, p_ - e0));
    }
    mpz_class n(num), d(den);
    if (d == 0) throw DivisionByZero();
    mpq_class q(n, d);
    q.canonicalize();
    return Scalar(q);
  }

  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  void expect(char c) {
    if (p_ >= s_.size() || s_[p_] != c) fail(std::string("expected '") + c + "'");
    ++p_;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw ScalarParseError("scalar parse error at column " + std::to_string(p_ + 1) + ": " +
                           what + " in \"" + std::string(s_) + "\"");
  }

  std::string_view s_;
  std::size_t p_ = 0;
};

}  // namespace

Scalar parse_scalar(std::string_view text) { return ScalarParser(text).parse(); }

}  // namespace relcheck
