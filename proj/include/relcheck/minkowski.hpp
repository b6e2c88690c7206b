#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "relcheck/scalar.hpp"

namespace relcheck {

template <class S>
using Vec4T = Eigen::Matrix<S, 4, 1>;
template <class S>
using Vec3T = Eigen::Matrix<S, 3, 1>;
template <class S>
using Mat4T = Eigen::Matrix<S, 4, 4>;

using Vec4 = Vec4T<Scalar>;
using Vec3 = Vec3T<Scalar>;
using Mat4 = Mat4T<Scalar>;

enum class Causal { Timelike, Lightlike, Spacelike };

const char* to_string(Causal c);

// -x0 y0 + x1 y1 + x2 y2 + x3 y3
template <class S>
S inner(const Vec4T<S>& x, const Vec4T<S>& y) {
  return -(x(0) * y(0)) + x(1) * y(1) + x(2) * y(2) + x(3) * y(3);
}

template <class S>
S mnorm(const Vec4T<S>& x) {
  return inner(x, x);
}

template <class S>
Causal classify_vector(const Vec4T<S>& v) {
  const int s = mnorm(v).sign();
  return s < 0 ? Causal::Timelike : (s > 0 ? Causal::Spacelike : Causal::Lightlike);
}

template <class S>
Causal classify_interval(const Vec4T<S>& p, const Vec4T<S>& q) {
  return classify_vector<S>(q - p);
}

template <class S>
bool is_zero_vec(const Vec4T<S>& v) {
  return v(0).is_zero() && v(1).is_zero() && v(2).is_zero() && v(3).is_zero();
}

template <class S>
bool vec_equal(const Vec4T<S>& a, const Vec4T<S>& b) {
  for (int i = 0; i < 4; ++i)
    if (a(i) != b(i)) return false;
  return true;
}

// Causal and future: nonzero with non-positive norm and positive time part.
template <class S>
bool future_causal(const Vec4T<S>& v) {
  return !is_zero_vec(v) && mnorm(v).sign() <= 0 && v(0).sign() > 0;
}

// Projection onto the Minkowski-orthogonal complement of a non-null d.
template <class S>
Vec4T<S> perp(const Vec4T<S>& v, const Vec4T<S>& d) {
  return v - d * (inner(v, d) / mnorm(d));
}

// Induced form on the quotient by d: the norm of the projection of v.
template <class S>
S qnorm(const Vec4T<S>& v, const Vec4T<S>& d) {
  const S vd = inner(v, d);
  return mnorm(v) - vd * vd / mnorm(d);
}

template <class S>
S qinner(const Vec4T<S>& u, const Vec4T<S>& v, const Vec4T<S>& d) {
  return inner(u, v) - inner(u, d) * inner(v, d) / mnorm(d);
}

// Two vectors are parallel (proportional, zero counts as parallel to anything).
template <class S>
bool proportional(const Vec4T<S>& a, const Vec4T<S>& b) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (a(i) * b(j) != a(j) * b(i)) return false;
  return true;
}

// Lines are stored in canonical form: the first nonzero coordinate of dir is 1
// and the base has a zero in that coordinate.
struct Line {
  Vec4 base;
  Vec4 dir;
  Causal cls = Causal::Timelike;
};

Line make_line(const Vec4& point, const Vec4& dir);
Line line_through(const Vec4& p, const Vec4& q);
bool on_line(const Line& l, const Vec4& p);
bool same_line(const Line& a, const Line& b);
bool same_direction(const Line& a, const Line& b);
// Point base + t*dir.
Vec4 line_point(const Line& l, const Scalar& t);
// Parameter of a point known to lie on the line.
Scalar line_param(const Line& l, const Vec4& p);

struct Segment {
  Vec4 beg;
  Vec4 end;
};

bool is_null_segment(const Segment& s);
bool is_future_directed(const Segment& s);

enum class Meet { None, Point, Identical };
struct Intersection {
  Meet kind = Meet::None;
  Vec4 point;
};
Intersection lines_intersect(const Line& a, const Line& b);
// Affine plane spanned by two lines exists (intersecting or parallel).
bool lines_coplanar(const Line& a, const Line& b);

struct PoincareMap {
  Mat4 linear = Mat4::Identity();
  Vec4 translation = Vec4::Zero();
};

bool validate_isometry(const PoincareMap& t);
Vec4 apply_poincare(const PoincareMap& t, const Vec4& x);
Vec4 apply_linear(const PoincareMap& t, const Vec4& v);
Line apply_poincare(const PoincareMap& t, const Line& l);
Segment apply_poincare(const PoincareMap& t, const Segment& s);
PoincareMap compose(const PoincareMap& outer, const PoincareMap& inner_map);

// Euclidean relations on F^3.
bool tarski_bw_f(const Vec3& a, const Vec3& b, const Vec3& c);
bool tarski_eq_f(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
// Determinant of absolute coordinates plus first-coordinate ordering. Kept
// only to document where it disagrees with affine betweenness.
bool determinant_bw_f(const Vec3& a, const Vec3& b, const Vec3& c);

// Solves sum_j cols[j] * x_j = rhs exactly. Returns nullopt when the system
// is inconsistent; free variables are set to zero.
template <class S, int R>
std::optional<std::vector<S>> solve_columns(const std::vector<Eigen::Matrix<S, R, 1>>& cols,
                                            const Eigen::Matrix<S, R, 1>& rhs) {
  const int n = static_cast<int>(cols.size());
  const int rows = static_cast<int>(rhs.size());
  std::vector<std::vector<S>> m(rows, std::vector<S>(n + 1));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c) m[r][c] = cols[c](r);
    m[r][n] = rhs(r);
  }
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < n && row < rows; ++c) {
    int p = -1;
    for (int r = row; r < rows; ++r)
      if (!m[r][c].is_zero()) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(m[p], m[row]);
    for (int r = 0; r < rows; ++r) {
      if (r == row || m[r][c].is_zero()) continue;
      S f = m[r][c] / m[row][c];
      for (int k = c; k <= n; ++k) m[r][k] -= f * m[row][k];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (int r = row; r < rows; ++r)
    if (!m[r][n].is_zero()) return std::nullopt;
  std::vector<S> x(n, S(0));
  for (int i = 0; i < row; ++i) x[pivot_col[i]] = m[i][n] / m[i][pivot_col[i]];
  return x;
}

std::string render_vec(const Vec4& v);

}  // namespace relcheck
