#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace relcheck {

struct ScalarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisionByZero : ScalarError {
  DivisionByZero() : ScalarError("division by zero") {}
};
struct DomainError : ScalarError {
  using ScalarError::ScalarError;
};
// Raised when a square root would push the tower past its configured limits.
// Callers must treat this as an Unknown outcome, never as false.
struct CapacityError : ScalarError {
  using ScalarError::ScalarError;
};
struct ScalarParseError : ScalarError {
  using ScalarError::ScalarError;
};

class Tower;

enum class Ordering { LT = -1, EQ = 0, GT = 1 };

// An element of Q(g_1,...,g_k) with g_i = +sqrt(r_i) and r_i in Q(g_1..g_{i-1}).
// The coefficient vector has one entry per subset of generators; bit i of the
// index selects g_i. Values are always stored over their minimal tower.
class Scalar {
 public:
  Scalar() : c_(1) {}
  Scalar(int v) : c_{mpq_class(v)} {}  // NOLINT(runtime/explicit)
  Scalar(long v) : c_{mpq_class(v)} {}  // NOLINT(runtime/explicit)
  Scalar(const mpq_class& q) : c_{q} { c_[0].canonicalize(); }  // NOLINT
  static Scalar rational(long num, long den);

  bool is_rational() const { return tower_ == nullptr; }
  const mpq_class& rational_value() const;  // requires is_rational()
  int sign() const;
  bool is_zero() const { return tower_ == nullptr && sgn(c_[0]) == 0; }
  double to_double() const;
  std::string str() const;
  const Tower* tower() const { return tower_; }
  const std::vector<mpq_class>& coefficients() const { return c_; }

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  Scalar operator-() const;

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
  friend bool operator<(const Scalar& a, const Scalar& b);
  friend bool operator>(const Scalar& a, const Scalar& b) { return b < a; }
  friend bool operator<=(const Scalar& a, const Scalar& b) { return !(b < a); }
  friend bool operator>=(const Scalar& a, const Scalar& b) { return !(a < b); }

 private:
  friend class TowerOps;
  Scalar(const Tower* t, std::vector<mpq_class> c) : tower_(t), c_(std::move(c)) {}
  const Tower* tower_ = nullptr;
  std::vector<mpq_class> c_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

enum class ArithOp { Add, Sub, Mul, Div };
Scalar arith(ArithOp op, const Scalar& a, const Scalar& b);
Ordering compare(const Scalar& a, const Scalar& b);

// Non-negative square root. Reuses the argument's tower when possible.
Scalar sqrt_nonneg(const Scalar& a);
// Square root only if it already exists in the argument's own tower.
bool try_sqrt_in_tower(const Scalar& a, Scalar& out);

Scalar parse_scalar(std::string_view text);
std::string render_scalar(const Scalar& s);

Scalar abs(const Scalar& s);
inline Scalar square(const Scalar& s) { return s * s; }

struct TowerLimits {
  int max_depth = 4;        // nesting level of radicals
  int max_generators = 10;  // total adjoined square roots in one tower
};
TowerLimits tower_limits();
void set_tower_limits(TowerLimits limits);
// Nesting depth of the element's tower (0 for rationals).
int nesting_depth(const Scalar& s);
int generator_count(const Scalar& s);

}  // namespace relcheck

namespace Eigen {
template <>
struct NumTraits<relcheck::Scalar> : GenericNumTraits<relcheck::Scalar> {
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  using Real = relcheck::Scalar;
  using NonInteger = relcheck::Scalar;
  using Nested = relcheck::Scalar;
  using Literal = relcheck::Scalar;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
