#pragma once

// Exact arithmetic over Q and towers of quadratic extensions Q(√D1)(√D2).
//
// An element of a depth-d tower is stored as 2^d rational coordinates. Bit i of
// a coordinate index selects the generator of level i+1, so an element splits as
// lower + upper·s where s is the top generator.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hhp/errors.hpp"

namespace hhp {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;

inline constexpr int kMaxTowerDepth = 2;

enum class Branch { Plus, Minus };

inline Branch flip(Branch b) { return b == Branch::Plus ? Branch::Minus : Branch::Plus; }
inline int sign_of(Branch b) { return b == Branch::Plus ? 1 : -1; }

// Numeric character of a value; exact zero is tracked separately from real.
enum class Phase { Zero, Real, Imaginary, Complex };

class Tower;
using TowerPtr = std::shared_ptr<const Tower>;

class ExactScalar {
 public:
  ExactScalar();
  ExactScalar(int v);        // NOLINT(google-explicit-constructor)
  ExactScalar(long v);       // NOLINT(google-explicit-constructor)
  ExactScalar(long long v);  // NOLINT(google-explicit-constructor)
  ExactScalar(const Integer& v);   // NOLINT(google-explicit-constructor)
  ExactScalar(const Rational& q);  // NOLINT(google-explicit-constructor)
  ExactScalar(TowerPtr tower, std::vector<Rational> coords);

  static ExactScalar ratio(long num, long den);
  // The top generator of a tower, i.e. ±√D with the tower's branch sign.
  static ExactScalar generator(const TowerPtr& tower);

  int depth() const;
  const TowerPtr& tower() const { return tower_; }
  std::span<const Rational> coords() const { return coords_; }

  bool is_zero() const;
  bool is_rational() const { return !tower_; }
  const Rational& rational() const;

  // Parts with respect to the top generator, as elements of the parent tower.
  ExactScalar lower() const;
  ExactScalar upper() const;
  // a + b·s  →  a − b·s at the top level.
  ExactScalar conjugate() const;
  ExactScalar inverse() const;

  ExactScalar& operator+=(const ExactScalar& o);
  ExactScalar& operator-=(const ExactScalar& o);
  ExactScalar& operator*=(const ExactScalar& o);
  ExactScalar& operator/=(const ExactScalar& o);

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b);
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) { return a * b.inverse(); }
  ExactScalar operator-() const;
  ExactScalar operator+() const { return *this; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b);

  // Shrinks the tower while the top coordinate half vanishes.
  void normalize();

  // Coordinates padded to a tower that has this element's tower as a prefix.
  std::vector<Rational> coords_in(const TowerPtr& target) const;

  std::string str() const;

 private:
  TowerPtr tower_;
  std::vector<Rational> coords_;
};

ExactScalar pow(const ExactScalar& x, unsigned n);

class Tower {
 public:
  Tower(TowerPtr parent, ExactScalar discriminant, Branch branch);

  int depth() const { return depth_; }
  const TowerPtr& parent() const { return parent_; }
  // Discriminant as an element of the parent tower (coordinates padded to it).
  const ExactScalar& discriminant() const { return discriminant_; }
  Branch branch() const { return branch_; }
  // Numeric character of the generator: Real for D>0, Imaginary for real D<0.
  Phase phase() const { return phase_; }

  bool same_as(const Tower& other) const;

 private:
  TowerPtr parent_;
  ExactScalar discriminant_;
  Branch branch_;
  int depth_;
  Phase phase_;
};

bool same_tower(const TowerPtr& a, const TowerPtr& b);
// Is `shorter` a prefix of `longer`? The null tower (Q) is a prefix of everything.
bool is_prefix(const TowerPtr& shorter, const TowerPtr& longer);
TowerPtr common_tower(const TowerPtr& a, const TowerPtr& b);

// Square root of D inside its own field, or inside a larger context tower,
// if one exists (sign unspecified).
std::optional<ExactScalar> sqrt_in_field(const ExactScalar& d);
std::optional<ExactScalar> sqrt_in_field(const ExactScalar& d, const TowerPtr& context);

struct RadicalRoot {
  ExactScalar value;
  bool extended = false;
};

// √D as an exact element of the context tower (or D's own tower) when D is a
// square there; otherwise a new level with a canonicalized discriminant is put on
// top of it. Plus selects the principal root, Minus its negative; new levels
// always use the principal generator, so both signs live in the same field.
RadicalRoot adjoin_sqrt(const ExactScalar& d, Branch branch = Branch::Plus, const TowerPtr& context = nullptr);
inline ExactScalar sqrt_exact(const ExactScalar& d, Branch branch = Branch::Plus,
                              const TowerPtr& context = nullptr) {
  return adjoin_sqrt(d, branch, context).value;
}

struct ComplexValue {
  BigFloat re;
  BigFloat im;
  Phase phase = Phase::Zero;
};

// Sets the thread's default mpfr precision for the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits_;
};

ComplexValue evaluate(const ExactScalar& x, unsigned bits = 128);
// Real embedding; throws a domain error unless the value is real.
BigFloat to_float(const ExactScalar& x, unsigned bits = 128);
// Imaginary part of a purely imaginary value (domain error otherwise).
BigFloat to_float_imag(const ExactScalar& x, unsigned bits = 128);
Phase phase_of(const ExactScalar& x);

// Parses an integer or "p/q"; decimals and exponents are rejected.
Rational parse_rational(std::string_view text);
std::string rational_str(const Rational& q);
// Parses the nested form produced by ExactScalar::str().
ExactScalar parse_scalar(std::string_view text);

}  // namespace hhp
