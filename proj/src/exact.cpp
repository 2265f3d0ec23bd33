#include "hhp/exact.hpp"

#include <gmp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace hhp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TowerMismatch: return "tower mismatch";
    case ErrorKind::DivisionByZero: return "division by zero";
    case ErrorKind::TowerDepth: return "tower depth exceeded";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Window: return "truncation window";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::DegenerateModel: return "degenerate model";
    case ErrorKind::NotApplicable: return "not applicable";
    case ErrorKind::Obstruction: return "obstruction";
    case ErrorKind::MissingEnergy: return "missing energy";
    case ErrorKind::DegenerateParameter: return "degenerate parameter";
    case ErrorKind::DegenerateQuartic: return "degenerate quartic";
    case ErrorKind::NotAFunction: return "not a function of initial data";
    case ErrorKind::NoRealMotion: return "no real motion";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::StepUnderflow: return "step underflow";
    case ErrorKind::Radius: return "radius";
    case ErrorKind::Parse: return "parse error";
  }
  return "error";
}

namespace {

std::size_t dim(int depth) { return std::size_t{1} << depth; }
int depth_of(const TowerPtr& t) { return t ? t->depth() : 0; }

bool all_zero(std::span<const Rational> v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q.is_zero(); });
}

ExactScalar compose(const TowerPtr& t, const ExactScalar& lo, const ExactScalar& up) {
  auto a = lo.coords_in(t->parent());
  auto b = up.coords_in(t->parent());
  a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
  return ExactScalar(t, std::move(a));
}

std::pair<ExactScalar, ExactScalar> split(const ExactScalar& x, const TowerPtr& t) {
  auto c = x.coords_in(t);
  std::size_t half = c.size() / 2;
  std::vector<Rational> lo(c.begin(), c.begin() + half), up(c.begin() + half, c.end());
  return {ExactScalar(t->parent(), std::move(lo)), ExactScalar(t->parent(), std::move(up))};
}

Phase phase_mul(Phase a, Phase b) {
  if (a == Phase::Zero || b == Phase::Zero) return Phase::Zero;
  if (a == Phase::Complex || b == Phase::Complex) return Phase::Complex;
  return a == b ? Phase::Real : Phase::Imaginary;
}

Phase phase_add(Phase a, Phase b) {
  if (a == Phase::Zero) return b;
  if (b == Phase::Zero) return a;
  return a == b ? a : Phase::Complex;
}

Phase phase_at(std::span<const Rational> c, const Tower* t) {
  if (!t) return c[0].is_zero() ? Phase::Zero : Phase::Real;
  std::size_t half = c.size() / 2;
  Phase lo = phase_at(c.subspan(0, half), t->parent().get());
  Phase up = phase_at(c.subspan(half), t->parent().get());
  return phase_add(lo, phase_mul(up, t->phase()));
}

unsigned digits_for(unsigned bits) { return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 3; }

BigFloat big_of(const Rational& q) {
  BigFloat n(boost::multiprecision::numerator(q).str());
  BigFloat d(boost::multiprecision::denominator(q).str());
  return n / d;
}

ComplexValue principal_sqrt(const ComplexValue& z) {
  ComplexValue r;
  if (z.phase == Phase::Zero) return r;
  if (z.phase == Phase::Real) {
    if (z.re > 0) {
      r.re = sqrt(z.re);
      r.im = 0;
      r.phase = Phase::Real;
    } else {
      r.re = 0;
      r.im = sqrt(-z.re);
      r.phase = Phase::Imaginary;
    }
    return r;
  }
  BigFloat mod = sqrt(z.re * z.re + z.im * z.im);
  r.re = sqrt((mod + z.re) / 2);
  r.im = sqrt((mod - z.re) / 2);
  if (z.im < 0) r.im = -r.im;
  r.phase = Phase::Complex;
  return r;
}

ComplexValue eval_at(std::span<const Rational> c, const Tower* t) {
  if (!t) {
    ComplexValue v;
    v.re = big_of(c[0]);
    v.im = 0;
    v.phase = c[0].is_zero() ? Phase::Zero : Phase::Real;
    return v;
  }
  std::size_t half = c.size() / 2;
  ComplexValue lo = eval_at(c.subspan(0, half), t->parent().get());
  ComplexValue up = eval_at(c.subspan(half), t->parent().get());
  auto dc = t->discriminant().coords_in(t->parent());
  ComplexValue s = principal_sqrt(eval_at(dc, t->parent().get()));
  if (t->branch() == Branch::Minus) {
    s.re = -s.re;
    s.im = -s.im;
  }
  ComplexValue out;
  out.re = lo.re + up.re * s.re - up.im * s.im;
  out.im = lo.im + up.re * s.im + up.im * s.re;
  out.phase = phase_add(lo.phase, phase_mul(up.phase, t->phase()));
  if (out.phase == Phase::Real) out.im = 0;
  if (out.phase == Phase::Imaginary) out.re = 0;
  return out;
}

std::optional<Rational> rational_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  Integer n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  if (!mpz_perfect_square_p(n.backend().data()) || !mpz_perfect_square_p(d.backend().data()))
    return std::nullopt;
  return Rational(Integer(sqrt(n)), Integer(sqrt(d)));
}

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned limit = 20000;
    std::vector<bool> composite(limit + 1, false);
    std::vector<unsigned> out;
    for (unsigned i = 2; i <= limit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// n = s²·m with m as square-free as trial division can certify.
void square_part(Integer n, Integer& s, Integer& m) {
  s = 1;
  m = 1;
  for (unsigned p : small_primes()) {
    if (Integer(p) * p > n) break;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) s *= p;
    if (e % 2) m *= p;
  }
  if (n > 1) {
    if (mpz_perfect_square_p(n.backend().data()))
      s *= Integer(sqrt(n));
    else
      m *= n;
  }
}

std::optional<ExactScalar> sqrt_in(const ExactScalar& d, const TowerPtr& t) {
  if (d.is_zero()) return ExactScalar();
  if (!t) {
    if (!d.is_rational()) return std::nullopt;
    if (auto r = rational_sqrt(d.rational())) return ExactScalar(*r);
    return std::nullopt;
  }
  auto [a, b] = split(d, t);
  const ExactScalar& D = t->discriminant();
  const TowerPtr& p = t->parent();
  if (b.is_zero()) {
    if (auto r = sqrt_in(a, p)) return *r;
    if (auto r = sqrt_in(a / D, p)) return *r * ExactScalar::generator(t);
    return std::nullopt;
  }
  auto n = sqrt_in(a * a - b * b * D, p);
  if (!n) return std::nullopt;
  for (int sgn : {1, -1}) {
    ExactScalar half = (a + ExactScalar(sgn) * *n) * ExactScalar::ratio(1, 2);
    if (half.is_zero()) continue;
    if (auto u = sqrt_in(half, p)) return compose(t, *u, b / (ExactScalar(2) * *u));
  }
  return std::nullopt;
}

bool is_principal(const ComplexValue& v) {
  switch (v.phase) {
    case Phase::Zero: return true;
    case Phase::Real: return v.re > 0;
    case Phase::Imaginary: return v.im > 0;
    case Phase::Complex: return v.re > 0 || (v.re == 0 && v.im > 0);
  }
  return true;
}

}  // namespace

// ---- ExactScalar ----------------------------------------------------------

ExactScalar::ExactScalar() : coords_(1) {}
ExactScalar::ExactScalar(int v) : coords_{Rational(v)} {}
ExactScalar::ExactScalar(long v) : coords_{Rational(v)} {}
ExactScalar::ExactScalar(long long v) : coords_{Rational(v)} {}
ExactScalar::ExactScalar(const Integer& v) : coords_{Rational(v)} {}
ExactScalar::ExactScalar(const Rational& q) : coords_{q} {}

ExactScalar::ExactScalar(TowerPtr tower, std::vector<Rational> coords)
    : tower_(std::move(tower)), coords_(std::move(coords)) {
  if (coords_.size() != dim(depth_of(tower_)))
    throw Error(ErrorKind::Domain, "coordinate count does not match tower depth");
  normalize();
}

ExactScalar ExactScalar::ratio(long num, long den) { return ExactScalar(Rational(num, den)); }

ExactScalar ExactScalar::generator(const TowerPtr& tower) {
  std::vector<Rational> c(dim(tower->depth()));
  c[dim(tower->depth() - 1)] = 1;
  return ExactScalar(tower, std::move(c));
}

int ExactScalar::depth() const { return depth_of(tower_); }

bool ExactScalar::is_zero() const { return !tower_ && coords_[0].is_zero(); }

const Rational& ExactScalar::rational() const {
  if (tower_) throw Error(ErrorKind::Domain, "scalar is not rational: " + str());
  return coords_[0];
}

void ExactScalar::normalize() {
  while (tower_) {
    std::size_t half = coords_.size() / 2;
    if (!all_zero(std::span<const Rational>(coords_).subspan(half))) break;
    coords_.resize(half);
    tower_ = tower_->parent();
  }
}

std::vector<Rational> ExactScalar::coords_in(const TowerPtr& target) const {
  if (!is_prefix(tower_, target)) throw Error(ErrorKind::TowerMismatch, "cannot embed " + str());
  std::vector<Rational> out(coords_);
  out.resize(dim(depth_of(target)));
  return out;
}

ExactScalar ExactScalar::lower() const {
  if (!tower_) return *this;
  return split(*this, tower_).first;
}

ExactScalar ExactScalar::upper() const {
  if (!tower_) return ExactScalar();
  return split(*this, tower_).second;
}

ExactScalar ExactScalar::conjugate() const {
  if (!tower_) return *this;
  auto [a, b] = split(*this, tower_);
  return compose(tower_, a, -b);
}

ExactScalar ExactScalar::inverse() const {
  if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero");
  if (!tower_) return ExactScalar(Rational(1) / coords_[0]);
  auto [a, b] = split(*this, tower_);
  ExactScalar norm = a * a - b * b * tower_->discriminant();
  if (norm.is_zero()) throw std::logic_error("vanishing norm of a nonzero element; discriminant is a square");
  ExactScalar inv = norm.inverse();
  return compose(tower_, a * inv, -(b * inv));
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
  if (!tower_ && !o.tower_) {
    coords_[0] += o.coords_[0];
    return *this;
  }
  TowerPtr t = common_tower(tower_, o.tower_);
  auto a = coords_in(t);
  auto b = o.coords_in(t);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  tower_ = t;
  coords_ = std::move(a);
  normalize();
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) { return *this += -o; }
ExactScalar& ExactScalar::operator*=(const ExactScalar& o) { return *this = *this * o; }
ExactScalar& ExactScalar::operator/=(const ExactScalar& o) { return *this = *this / o; }

ExactScalar ExactScalar::operator-() const {
  ExactScalar r(*this);
  for (auto& q : r.coords_) q = -q;
  return r;
}

ExactScalar operator*(const ExactScalar& x, const ExactScalar& y) {
  if (!x.tower_ && !y.tower_) return ExactScalar(x.coords_[0] * y.coords_[0]);
  if (!x.tower_ || !y.tower_) {
    const ExactScalar& q = x.tower_ ? y : x;
    const ExactScalar& e = x.tower_ ? x : y;
    if (q.coords_[0].is_zero()) return ExactScalar();
    ExactScalar r(e);
    for (auto& c : r.coords_) c *= q.coords_[0];
    return r;
  }
  TowerPtr t = common_tower(x.tower_, y.tower_);
  auto [a, b] = split(x, t);
  auto [c, d] = split(y, t);
  ExactScalar lo = a * c;
  if (!b.is_zero() && !d.is_zero()) lo += b * d * t->discriminant();
  ExactScalar up = a * d + b * c;
  return compose(t, lo, up);
}

bool operator==(const ExactScalar& a, const ExactScalar& b) {
  if (!a.tower_ && !b.tower_) return a.coords_[0] == b.coords_[0];
  TowerPtr t = common_tower(a.tower_, b.tower_);
  return a.coords_in(t) == b.coords_in(t);
}

namespace {

std::string print_at(std::span<const Rational> c, const Tower* t) {
  if (!t) return rational_str(c[0]);
  std::size_t half = c.size() / 2;
  auto dc = t->discriminant().coords_in(t->parent());
  std::string out = "(" + print_at(c.subspan(0, half), t->parent().get()) + ") + (" +
                    print_at(c.subspan(half), t->parent().get()) + ")*";
  if (t->branch() == Branch::Minus) out += "-";
  return out + "sqrt(" + print_at(dc, t->parent().get()) + ")";
}

}  // namespace

std::string ExactScalar::str() const { return print_at(coords_, tower_.get()); }

ExactScalar pow(const ExactScalar& x, unsigned n) {
  ExactScalar result(1), base(x);
  while (n) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n) base = base * base;
  }
  return result;
}

// ---- Tower ----------------------------------------------------------------

Tower::Tower(TowerPtr parent, ExactScalar discriminant, Branch branch)
    : parent_(std::move(parent)),
      discriminant_(std::move(discriminant)),
      branch_(branch),
      depth_(depth_of(parent_) + 1),
      phase_(Phase::Real) {
  if (depth_ > kMaxTowerDepth)
    throw Error(ErrorKind::TowerDepth, "at most " + std::to_string(kMaxTowerDepth) + " adjoined roots");
  if (!is_prefix(discriminant_.tower(), parent_))
    throw Error(ErrorKind::TowerMismatch, "discriminant outside the parent field");
  if (discriminant_.is_zero()) throw Error(ErrorKind::Domain, "zero discriminant");
  PrecisionScope scope(256);
  ComplexValue d = evaluate(discriminant_, 256);
  if (d.phase == Phase::Real)
    phase_ = d.re > 0 ? Phase::Real : Phase::Imaginary;
  else
    phase_ = Phase::Complex;
}

bool Tower::same_as(const Tower& o) const {
  if (this == &o) return true;
  if (depth_ != o.depth_ || branch_ != o.branch_) return false;
  if (!same_tower(parent_, o.parent_)) return false;
  return discriminant_.coords_in(parent_) == o.discriminant_.coords_in(parent_);
}

bool same_tower(const TowerPtr& a, const TowerPtr& b) {
  if (!a || !b) return !a && !b;
  return a->same_as(*b);
}

bool is_prefix(const TowerPtr& shorter, const TowerPtr& longer) {
  if (!shorter) return true;
  const Tower* t = longer.get();
  while (t && t->depth() > shorter->depth()) t = t->parent().get();
  return t && t->same_as(*shorter);
}

TowerPtr common_tower(const TowerPtr& a, const TowerPtr& b) {
  if (is_prefix(a, b)) return b;
  if (is_prefix(b, a)) return a;
  throw Error(ErrorKind::TowerMismatch, "elements live in incompatible towers");
}

// ---- roots ----------------------------------------------------------------

std::optional<ExactScalar> sqrt_in_field(const ExactScalar& d, const TowerPtr& context) {
  return sqrt_in(d, common_tower(d.tower(), context));
}

std::optional<ExactScalar> sqrt_in_field(const ExactScalar& d) { return sqrt_in(d, d.tower()); }

RadicalRoot adjoin_sqrt(const ExactScalar& d, Branch branch, const TowerPtr& context) {
  TowerPtr field = common_tower(d.tower(), context);
  if (auto r = sqrt_in(d, field)) {
    ExactScalar root = *r;
    bool principal = is_principal(evaluate(root, 192));
    if (principal != (branch == Branch::Plus)) root = -root;
    return {root, false};
  }
  if (depth_of(field) >= kMaxTowerDepth)
    throw Error(ErrorKind::TowerDepth, "cannot adjoin sqrt(" + d.str() + ")");

  // Pull the rational content out of the discriminant: d = c·d', c = (s/q)²·m.
  Rational content;
  if (d.is_rational()) {
    content = abs(d.rational());
  } else {
    Integer g = 0, l = 1;
    for (const Rational& q : d.coords()) {
      if (q.is_zero()) continue;
      g = gcd(g, Integer(boost::multiprecision::numerator(q)));
      l = lcm(l, Integer(boost::multiprecision::denominator(q)));
    }
    content = Rational(abs(g), l);
  }
  Integer num = boost::multiprecision::numerator(content), den = boost::multiprecision::denominator(content);
  Integer s, m;
  square_part(num * den, s, m);
  ExactScalar disc = d * ExactScalar(Rational(m) / content);
  // The generator is always the principal root so that both signs share a field.
  auto tower = std::make_shared<const Tower>(field, disc, Branch::Plus);
  return {ExactScalar(Rational(sign_of(branch) * s, den)) * ExactScalar::generator(tower), true};
}

// ---- numeric embedding ----------------------------------------------------

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits_(BigFloat::default_precision()) {
  BigFloat::default_precision(digits_for(bits));
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(saved_digits_); }

ComplexValue evaluate(const ExactScalar& x, unsigned bits) {
  if (bits < 64) throw Error(ErrorKind::Domain, "precision below 64 bits");
  PrecisionScope scope(bits);
  return eval_at(x.coords(), x.tower().get());
}

BigFloat to_float(const ExactScalar& x, unsigned bits) {
  ComplexValue v = evaluate(x, bits);
  if (v.phase == Phase::Imaginary || v.phase == Phase::Complex)
    throw Error(ErrorKind::Domain, "non-real scalar requested as real: " + x.str());
  return v.re;
}

BigFloat to_float_imag(const ExactScalar& x, unsigned bits) {
  ComplexValue v = evaluate(x, bits);
  if (v.phase == Phase::Real || v.phase == Phase::Complex)
    throw Error(ErrorKind::Domain, "scalar is not purely imaginary: " + x.str());
  return v.im;
}

Phase phase_of(const ExactScalar& x) { return phase_at(x.coords(), x.tower().get()); }

// ---- text -----------------------------------------------------------------

std::string rational_str(const Rational& q) {
  const Integer& d = boost::multiprecision::denominator(q);
  if (d == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + d.str();
}

Rational parse_rational(std::string_view text) {
  auto is_int = [](std::string_view s, bool allow_sign) {
    if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string_view num = text, den;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
    if (!is_int(den, false)) throw Error(ErrorKind::Parse, "bad denominator in '" + std::string(text) + "'");
  }
  if (!is_int(num, true))
    throw Error(ErrorKind::Parse, "expected an integer or p/q, got '" + std::string(text) + "'");
  std::string n(num);
  if (n[0] == '+') n.erase(0, 1);
  Integer a(n);
  Integer b = den.empty() ? Integer(1) : Integer(std::string(den));
  if (b == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
  return Rational(a, b);
}

namespace {

struct RawScalar {
  TowerPtr tower;
  std::vector<Rational> coords;
};

class ScalarParser {
 public:
  explicit ScalarParser(std::string_view s) : s_(s) {}

  ExactScalar parse() {
    RawScalar r = scalar();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return ExactScalar(r.tower, std::move(r.coords));
  }

 private:
  RawScalar scalar() {
    skip();
    if (!accept('(')) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' ||
                                  s_[pos_] == '/' || s_[pos_] == '+'))
        ++pos_;
      return {nullptr, {parse_rational(s_.substr(start, pos_ - start))}};
    }
    RawScalar lo = scalar();
    expect(')');
    expect('+');
    expect('(');
    RawScalar up = scalar();
    expect(')');
    expect('*');
    Branch branch = accept('-') ? Branch::Minus : Branch::Plus;
    for (char c : std::string_view("sqrt")) expect(c);
    expect('(');
    RawScalar d = scalar();
    expect(')');
    if (!same_tower(lo.tower, d.tower) || !same_tower(up.tower, d.tower))
      fail("components are not written over the discriminant's field");
    ExactScalar disc(d.tower, d.coords);
    if (disc.is_zero() || sqrt_in(disc, d.tower)) fail("discriminant is a square in its field");
    auto tower = std::make_shared<const Tower>(d.tower, disc, branch);
    lo.coords.insert(lo.coords.end(), up.coords.begin(), up.coords.end());
    return {tower, std::move(lo.coords)};
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

ExactScalar parse_scalar(std::string_view text) { return ScalarParser(text).parse(); }

}  // namespace hhp
