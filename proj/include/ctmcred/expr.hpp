#pragma once

// Rate expressions: rational functions of a single parameter lambda with
// exact arbitrary-precision rational coefficients. Expressions are parsed
// from text (grammar below), brought to a canonical form (coprime numerator
// and denominator, monic denominator), and support exact limits at
// lambda -> infinity plus exact affine decomposition a*lambda + b.
//
//   expr   := term { ("+"|"-") term }
//   term   := factor { ("*"|"/") factor }
//   factor := NUMBER | "lambda" | "(" expr ")" | "-" factor
//   NUMBER := decimal literal with optional fraction part
//
// Floating point enters only in evaluate(); everything else is exact.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctmcred/errors.hpp"

namespace ctmcred {

using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

/// Dense univariate polynomial over Rat, coefficients in ascending powers,
/// trailing zeros trimmed. The zero polynomial has an empty coefficient list
/// and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rat> coeffs) : c_(std::move(coeffs)) {
    trim();
  }

  static Polynomial constant(Rat v) {
    return Polynomial(std::vector<Rat>{std::move(v)});
  }
  static Polynomial lambda() { return Polynomial({Rat(0), Rat(1)}); }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rat>& coeffs() const { return c_; }
  Rat coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }
  const Rat& leading() const { return c_.back(); }

  Rat eval(const Rat& x) const {
    Rat acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Polynomial(std::move(c));
  }
  Polynomial operator-() const {
    std::vector<Rat> c(c_);
    for (auto& v : c) v = -v;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<Rat> c(a.c_.size() + b.c_.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.c_ == b.c_;
  }

  /// Euclidean division: a = q*b + r with deg r < deg b. b must be nonzero.
  static void divmod(const Polynomial& a, const Polynomial& b, Polynomial* q,
                     Polynomial* r) {
    std::vector<Rat> rem = a.c_;
    std::vector<Rat> quot;
    const int db = b.degree();
    if (static_cast<int>(rem.size()) - 1 >= db)
      quot.assign(rem.size() - db, Rat(0));
    while (static_cast<int>(rem.size()) - 1 >= db && !rem.empty()) {
      const int dr = static_cast<int>(rem.size()) - 1;
      Rat factor = rem.back() / b.leading();
      quot[dr - db] = factor;
      for (int i = 0; i <= db; ++i) rem[dr - db + i] -= factor * b.c_[i];
      while (!rem.empty() && rem.back() == 0) rem.pop_back();
    }
    if (q) *q = Polynomial(std::move(quot));
    if (r) *r = Polynomial(std::move(rem));
  }

  Polynomial monic() const {
    if (is_zero()) return *this;
    std::vector<Rat> c(c_);
    const Rat lc = c.back();
    for (auto& v : c) v /= lc;
    return Polynomial(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rat> c_;
};

inline Polynomial poly_gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r;
    Polynomial::divmod(a, b, nullptr, &r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Limit of a rate expression as lambda -> infinity. Either a finite exact
/// rational or +infinity; eventually negative expressions are rejected at
/// construction, so -infinity and negative finite limits never appear here.
struct LimitValue {
  bool infinite = false;
  Rat value;  // meaningful when !infinite

  static LimitValue plus_infinity() { return {true, Rat(0)}; }
  static LimitValue finite(Rat v) { return {false, std::move(v)}; }

  friend bool operator==(const LimitValue& a, const LimitValue& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

/// Canonical rational function of lambda: numerator/denominator coprime,
/// denominator monic and nonzero. Immutable after construction; equality is
/// decidable coefficient-wise.
class RationalExpr {
 public:
  RationalExpr() : num_(), den_(Polynomial::constant(Rat(1))) {}

  RationalExpr(Polynomial num, Polynomial den)
      : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw ZeroDenominator();
    normalize();
  }

  static RationalExpr constant(Rat v) {
    return RationalExpr(Polynomial::constant(std::move(v)),
                        Polynomial::constant(Rat(1)));
  }
  static RationalExpr lambda() {
    return RationalExpr(Polynomial::lambda(), Polynomial::constant(Rat(1)));
  }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  friend RationalExpr operator+(const RationalExpr& a, const RationalExpr& b) {
    return RationalExpr(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalExpr operator-(const RationalExpr& a, const RationalExpr& b) {
    return RationalExpr(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalExpr operator*(const RationalExpr& a, const RationalExpr& b) {
    return RationalExpr(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalExpr operator/(const RationalExpr& a, const RationalExpr& b) {
    if (b.num_.is_zero()) throw ZeroDenominator();
    return RationalExpr(a.num_ * b.den_, a.den_ * b.num_);
  }
  RationalExpr operator-() const { return RationalExpr(-num_, den_); }

  friend bool operator==(const RationalExpr& a, const RationalExpr& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Exact value at a rational point; throws PoleAtLambda if the denominator
  /// vanishes there.
  Rat eval_exact(const Rat& x) const {
    Rat d = den_.eval(x);
    if (d == 0) throw PoleAtLambda(to_double(x));
    return num_.eval(x) / d;
  }

  /// Floating-point value at lambda > 0. The quotient is computed exactly
  /// and rounded once.
  double evaluate(double lambda) const {
    if (!(lambda > 0))
      throw std::invalid_argument("evaluate: lambda must be positive");
    Rat x(lambda);
    Rat d = den_.eval(x);
    if (d == 0) throw PoleAtLambda(lambda);
    return to_double(num_.eval(x) / d);
  }

  /// Exact limit as lambda -> infinity by degree comparison. Throws
  /// EventuallyNegative when the leading-coefficient ratio is negative.
  LimitValue limit_at_infinity() const {
    if (num_.is_zero()) return LimitValue::finite(Rat(0));
    const Rat ratio = num_.leading() / den_.leading();
    if (ratio < 0) throw EventuallyNegative();
    const int dn = num_.degree(), dd = den_.degree();
    if (dn > dd) return LimitValue::plus_infinity();
    if (dn == dd) return LimitValue::finite(ratio);
    return LimitValue::finite(Rat(0));
  }

  /// (a, b) such that the expression is exactly a*lambda + b, or nullopt if
  /// it is not an affine polynomial.
  std::optional<std::pair<Rat, Rat>> affine_decompose() const {
    if (den_.degree() != 0 || num_.degree() > 1) return std::nullopt;
    // canonical denominator is monic, so degree 0 means den == 1
    return std::make_pair(num_.coeff(1), num_.coeff(0));
  }

  std::string to_string() const;

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Polynomial::constant(Rat(1));
      return;
    }
    Polynomial g = poly_gcd(num_, den_);
    if (g.degree() > 0) {
      Polynomial q;
      Polynomial::divmod(num_, g, &q, nullptr);
      num_ = q;
      Polynomial::divmod(den_, g, &q, nullptr);
      den_ = q;
    }
    const Rat lc = den_.leading();
    if (lc != 1) {
      std::vector<Rat> n(num_.coeffs()), d(den_.coeffs());
      for (auto& v : n) v /= lc;
      for (auto& v : d) v /= lc;
      num_ = Polynomial(std::move(n));
      den_ = Polynomial(std::move(d));
    }
  }

  Polynomial num_, den_;
};

// ---- printing ----

namespace detail {

inline std::string rat_to_string(const Rat& r) {
  return r.str();  // "n" or "n/d", denominator positive
}

inline std::string monomial_to_string(const Rat& abs_coeff, int power) {
  std::string s;
  if (power == 0 || abs_coeff != 1) s = rat_to_string(abs_coeff);
  for (int k = 0; k < power; ++k) {
    if (!s.empty()) s += "*";
    s += "lambda";
  }
  return s;
}

inline std::string poly_to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string s;
  for (int k = p.degree(); k >= 0; --k) {
    const Rat c = p.coeff(static_cast<std::size_t>(k));
    if (c == 0) continue;
    if (s.empty()) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    s += monomial_to_string(abs(c), k);
  }
  return s;
}

}  // namespace detail

inline std::string RationalExpr::to_string() const {
  if (den_.degree() == 0) return detail::poly_to_string(num_);
  return "(" + detail::poly_to_string(num_) + ")/(" +
         detail::poly_to_string(den_) + ")";
}

// ---- parser ----

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  RationalExpr parse() {
    RationalExpr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "end of expression");
    return e;
  }

 private:
  RationalExpr parse_expr() {
    RationalExpr e = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+'))
        e = e + parse_term();
      else if (consume('-'))
        e = e - parse_term();
      else
        return e;
    }
  }

  RationalExpr parse_term() {
    RationalExpr e = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*'))
        e = e * parse_factor();
      else if (consume('/'))
        e = e / parse_factor();
      else
        return e;
    }
  }

  RationalExpr parse_factor() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "factor");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return -parse_factor();
    }
    if (c == '(') {
      ++pos_;
      RationalExpr e = parse_expr();
      skip_ws();
      if (!consume(')')) throw SyntaxError(pos_, "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (text_.substr(start, pos_ - start) == "lambda")
        return RationalExpr::lambda();
      throw SyntaxError(start, "'lambda'");
    }
    throw SyntaxError(pos_, "factor");
  }

  RationalExpr parse_number() {
    using boost::multiprecision::cpp_int;
    cpp_int numerator = 0, scale = 1;
    bool digits = false;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      numerator = numerator * 10 + (text_[pos_] - '0');
      ++pos_;
      digits = true;
    }
    if (!digits) throw SyntaxError(pos_, "digit");
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      bool frac = false;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        numerator = numerator * 10 + (text_[pos_] - '0');
        scale *= 10;
        ++pos_;
        frac = true;
      }
      if (!frac) throw SyntaxError(pos_, "fraction digits");
    }
    return RationalExpr::constant(Rat(numerator, scale));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse a rate-expression string into canonical form.
inline RationalExpr parse(const std::string& text) {
  return detail::ExprParser(text).parse();
}

}  // namespace ctmcred
