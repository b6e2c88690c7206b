#include "relcheck/minkowski.hpp"

#include <stdexcept>

namespace relcheck {

const char* to_string(Causal c) {
  switch (c) {
    case Causal::Timelike: return "timelike";
    case Causal::Lightlike: return "lightlike";
    case Causal::Spacelike: return "spacelike";
  }
  return "?";
}

Line make_line(const Vec4& point, const Vec4& dir) {
  int k = -1;
  for (int i = 0; i < 4; ++i)
    if (!dir(i).is_zero()) {
      k = i;
      break;
    }
  if (k < 0) throw std::invalid_argument("line direction must be nonzero");
  Line l;
  l.dir = dir / dir(k);
  l.base = point - l.dir * point(k);
  l.cls = classify_vector(l.dir);
  return l;
}

Line line_through(const Vec4& p, const Vec4& q) { return make_line(p, q - p); }

bool on_line(const Line& l, const Vec4& p) { return proportional<Scalar>(p - l.base, l.dir); }

bool same_direction(const Line& a, const Line& b) { return vec_equal(a.dir, b.dir); }

bool same_line(const Line& a, const Line& b) {
  return vec_equal(a.dir, b.dir) && vec_equal(a.base, b.base);
}

Vec4 line_point(const Line& l, const Scalar& t) { return l.base + l.dir * t; }

Scalar line_param(const Line& l, const Vec4& p) {
  for (int i = 0; i < 4; ++i)
    if (!l.dir(i).is_zero()) return (p(i) - l.base(i)) / l.dir(i);
  return Scalar(0);
}

bool is_null_segment(const Segment& s) { return mnorm<Scalar>(s.end - s.beg).is_zero(); }

bool is_future_directed(const Segment& s) { return (s.end(0) - s.beg(0)).sign() >= 0; }

Intersection lines_intersect(const Line& a, const Line& b) {
  Intersection out;
  if (same_line(a, b)) {
    out.kind = Meet::Identical;
    out.point = a.base;
    return out;
  }
  // base_a + s dir_a = base_b + t dir_b
  std::vector<Vec4> cols{a.dir, -b.dir};
  auto sol = solve_columns<Scalar, 4>(cols, Vec4(b.base - a.base));
  if (!sol) return out;
  if (proportional<Scalar>(a.dir, b.dir)) return out;  // parallel and distinct
  out.kind = Meet::Point;
  out.point = line_point(a, (*sol)[0]);
  return out;
}

bool lines_coplanar(const Line& a, const Line& b) {
  // rank of {dir_a, dir_b, base_b - base_a} is at most 2
  Vec4 o = b.base - a.base;
  const Vec4* v[3] = {&a.dir, &b.dir, &o};
  for (int r0 = 0; r0 < 4; ++r0)
    for (int r1 = r0 + 1; r1 < 4; ++r1)
      for (int r2 = r1 + 1; r2 < 4; ++r2) {
        const int rr[3] = {r0, r1, r2};
        Scalar m[3][3];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) m[i][j] = (*v[j])(rr[i]);
        Scalar det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (!det.is_zero()) return false;
      }
  return true;
}

bool validate_isometry(const PoincareMap& t) {
  Mat4 eta = Mat4::Identity();
  eta(0, 0) = Scalar(-1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Scalar s(0);
      for (int k = 0; k < 4; ++k) s += t.linear(k, i) * eta(k, k) * t.linear(k, j);
      if (s != eta(i, j)) return false;
    }
  return true;
}

Vec4 apply_linear(const PoincareMap& t, const Vec4& v) {
  Vec4 out;
  for (int i = 0; i < 4; ++i) {
    Scalar s(0);
    for (int k = 0; k < 4; ++k)
      if (!t.linear(i, k).is_zero() && !v(k).is_zero()) s += t.linear(i, k) * v(k);
    out(i) = s;
  }
  return out;
}

Vec4 apply_poincare(const PoincareMap& t, const Vec4& x) {
  return apply_linear(t, x) + t.translation;
}

Line apply_poincare(const PoincareMap& t, const Line& l) {
  return make_line(apply_poincare(t, l.base), apply_linear(t, l.dir));
}

Segment apply_poincare(const PoincareMap& t, const Segment& s) {
  return Segment{apply_poincare(t, s.beg), apply_poincare(t, s.end)};
}

PoincareMap compose(const PoincareMap& outer, const PoincareMap& inner_map) {
  PoincareMap r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Scalar s(0);
      for (int k = 0; k < 4; ++k) s += outer.linear(i, k) * inner_map.linear(k, j);
      r.linear(i, j) = s;
    }
  r.translation = apply_poincare(outer, inner_map.translation);
  return r;
}

bool tarski_bw_f(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ba = b - a, ca = c - a;
  bool c_eq_a = ca(0).is_zero() && ca(1).is_zero() && ca(2).is_zero();
  if (c_eq_a) return ba(0).is_zero() && ba(1).is_zero() && ba(2).is_zero();
  int k = 0;
  while (ca(k).is_zero()) ++k;
  Scalar t = ba(k) / ca(k);
  for (int i = 0; i < 3; ++i)
    if (ba(i) != t * ca(i)) return false;
  return t.sign() >= 0 && t <= Scalar(1);
}

bool tarski_eq_f(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  Vec3 u = a - b, v = c - d;
  return u(0) * u(0) + u(1) * u(1) + u(2) * u(2) == v(0) * v(0) + v(1) * v(1) + v(2) * v(2);
}

bool determinant_bw_f(const Vec3& a, const Vec3& b, const Vec3& c) {
  Scalar det = a(0) * (b(1) * c(2) - b(2) * c(1)) - a(1) * (b(0) * c(2) - b(2) * c(0)) +
               a(2) * (b(0) * c(1) - b(1) * c(0));
  if (!det.is_zero()) return false;
  return (a(0) <= b(0) && b(0) <= c(0)) || (c(0) <= b(0) && b(0) <= a(0));
}

std::string render_vec(const Vec4& v) {
  std::string s = "(";
  for (int i = 0; i < 4; ++i) {
    if (i) s += ", ";
    s += v(i).str();
  }
  return s + ")";
}

}  // namespace relcheck
