#include <doctest.h>

#include "relcheck/minkowski.hpp"

using namespace relcheck;

namespace {
Vec4 v(long a, long b, long c, long d) { return Vec4(Scalar(a), Scalar(b), Scalar(c), Scalar(d)); }
Vec3 p3(long a, long b, long c) { return Vec3(Scalar(a), Scalar(b), Scalar(c)); }

PoincareMap boost_x1() {
  PoincareMap m;
  m.linear(0, 0) = Scalar::rational(5, 4);
  m.linear(0, 1) = Scalar::rational(3, 4);
  m.linear(1, 0) = Scalar::rational(3, 4);
  m.linear(1, 1) = Scalar::rational(5, 4);
  return m;
}
}  // namespace

TEST_CASE("causal classification uses the squared x3 term") {
  CHECK(classify_vector(v(1, 0, 0, 0)) == Causal::Timelike);
  CHECK(classify_vector(v(1, 1, 0, 0)) == Causal::Lightlike);
  CHECK(classify_vector(v(1, 2, 0, 0)) == Causal::Spacelike);
  CHECK(mnorm(v(0, 0, 0, -2)) == Scalar(4));
  CHECK(classify_vector(v(2, 0, 0, -2)) == Causal::Lightlike);
}

TEST_CASE("lines are stored canonically") {
  Line a = make_line(v(3, 6, 0, 0), v(2, 4, 0, 0));
  Line b = make_line(v(0, 0, 0, 0), v(-1, -2, 0, 0));
  CHECK(same_line(a, b));
  CHECK(a.dir(0) == Scalar(1));
  CHECK(on_line(a, v(7, 14, 0, 0)));
  CHECK_FALSE(on_line(a, v(7, 13, 0, 0)));
  CHECK_THROWS(make_line(v(0, 0, 0, 0), v(0, 0, 0, 0)));
}

TEST_CASE("line intersection and coplanarity") {
  Line a = make_line(v(0, 0, 0, 0), v(1, 0, 0, 0));
  Line b = make_line(v(0, 1, 0, 0), v(1, 0, 0, 0));
  Line c = make_line(v(2, 0, 0, 0), v(0, 1, 0, 0));
  Line d = make_line(v(0, 0, 1, 0), v(0, 1, 0, 0));
  CHECK(lines_intersect(a, b).kind == Meet::None);
  CHECK(lines_coplanar(a, b));
  auto m = lines_intersect(a, c);
  REQUIRE(m.kind == Meet::Point);
  CHECK(vec_equal(m.point, v(2, 0, 0, 0)));
  CHECK(lines_intersect(a, d).kind == Meet::None);
  CHECK_FALSE(lines_coplanar(a, d));
  CHECK(lines_intersect(a, a).kind == Meet::Identical);
}

TEST_CASE("Poincare maps") {
  PoincareMap b = boost_x1();
  CHECK(validate_isometry(b));
  PoincareMap t;
  t.translation = v(5, 7, 0, 0);
  CHECK(validate_isometry(t));
  CHECK(vec_equal(apply_poincare(t, v(0, 0, 0, 0)), v(5, 7, 0, 0)));
  PoincareMap scale;
  scale.linear = Mat4::Identity() * Scalar(2);
  CHECK_FALSE(validate_isometry(scale));
  PoincareMap bt = compose(t, b);
  Vec4 x = v(1, 2, 3, 4);
  CHECK(vec_equal(apply_poincare(bt, x), apply_poincare(t, apply_poincare(b, x))));
  CHECK(mnorm(apply_linear(b, x)) == mnorm(x));
}

TEST_CASE("affine betweenness differs from the determinant reading") {
  // Non-collinear points with zero determinant (a and c are collinear with
  // the origin, b is not between them) expose the difference.
  Vec3 a = p3(1, 0, 0), b = p3(2, 5, 0), c = p3(3, 0, 0);
  CHECK(determinant_bw_f(a, b, c));
  CHECK_FALSE(tarski_bw_f(a, b, c));
  CHECK(tarski_bw_f(p3(0, 0, 0), p3(1, 1, 1), p3(2, 2, 2)));
  CHECK(tarski_bw_f(p3(0, 0, 0), p3(0, 0, 0), p3(2, 2, 2)));
  CHECK_FALSE(tarski_bw_f(p3(0, 0, 0), p3(3, 3, 3), p3(2, 2, 2)));
  CHECK(tarski_eq_f(p3(0, 0, 0), p3(3, 4, 0), p3(1, 1, 1), p3(1, 6, 1)));
}

TEST_CASE("exact column solver") {
  std::vector<Vec4> cols{v(1, 0, 0, 0), v(0, 1, 0, 0)};
  auto s = solve_columns<Scalar, 4>(cols, v(3, -2, 0, 0));
  REQUIRE(s);
  CHECK((*s)[0] == Scalar(3));
  CHECK((*s)[1] == Scalar(-2));
  CHECK_FALSE(solve_columns<Scalar, 4>(cols, v(0, 0, 1, 0)));
}
