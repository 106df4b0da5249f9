#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "sosperturb/errors.hpp"
#include "sosperturb/polynomial.hpp"

namespace sosperturb {

namespace detail {

// Recursive-descent parser for
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' integer)?
//   primary := number ('/' number)? | 'x' integer | '(' expr ')'
class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, std::size_t n_vars)
      : text_(text), n_vars_(n_vars) {}

  Polynomial parse() {
    skip_ws();
    if (at_end()) throw SyntaxError(pos_, "empty expression");
    Polynomial p = expr();
    skip_ws();
    if (!at_end()) throw SyntaxError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return p;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        throw SyntaxError(pos_, "exponent must be a nonnegative integer");
      }
      const long k = integer();
      if (k > 1000) throw SyntaxError(start, "exponent too large");
      base = base.pow(static_cast<int>(k));
      skip_ws();
      if (peek() == '^') throw SyntaxError(pos_, "chained exponents are not allowed");
    }
    return base;
  }

  Polynomial primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) throw SyntaxError(pos_, "expected ')'");
      return inner;
    }
    if (c == 'x' || c == 'X') {
      ++pos_;
      const std::size_t start = pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        throw SyntaxError(pos_, "expected variable index after 'x'");
      }
      const long k = integer();
      if (k < 1 || static_cast<std::size_t>(k) > n_vars_) {
        throw VariableOutOfRange("variable x" + std::to_string(k) + " at position " +
                                 std::to_string(start) + " exceeds nvars = " +
                                 std::to_string(n_vars_));
      }
      return Polynomial::variable(n_vars_, static_cast<std::size_t>(k - 1));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = number();
      skip_ws();
      if (peek() == '/') {
        ++pos_;
        skip_ws();
        const std::size_t at = pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek())) && peek() != '.') {
          throw SyntaxError(at, "'/' is only allowed between numeric literals");
        }
        const double den = number();
        if (den == 0.0) throw SyntaxError(at, "division by zero");
        value /= den;
      }
      return Polynomial::constant(n_vars_, value);
    }
    if (at_end()) throw SyntaxError(pos_, "unexpected end of input");
    throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  long integer() {
    long v = 0;
    const auto* first = text_.data() + pos_;
    const auto* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) throw SyntaxError(pos_, "bad integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  double number() {
    double v = 0.0;
    const auto* first = text_.data() + pos_;
    const auto* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (ec != std::errc() || !std::isfinite(v)) throw SyntaxError(pos_, "bad number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string_view text_;
  std::size_t n_vars_;
  std::size_t pos_ = 0;
};

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses polynomial text over the variables x1..xn.
inline Polynomial parse(std::string_view text, std::size_t n_vars) {
  if (n_vars == 0) throw InvalidArgument("parse: n_vars must be >= 1");
  return detail::PolynomialParser(text, n_vars).parse();
}

/// Renders f in the parse grammar, terms in graded lex order, with
/// shortest round-trip coefficients, e.g. "1 - 3*x1^2*x2^2 + x1^4*x2^2".
inline std::string to_string(const Polynomial& f) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [alpha, c] : f.terms()) {
    double mag = c;
    if (first) {
      if (c < 0) {
        out += "-";
        mag = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      mag = std::abs(c);
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < alpha.n_vars(); ++i) {
      if (alpha[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (alpha[i] > 1) mono += "^" + std::to_string(alpha[i]);
    }
    if (mono.empty()) {
      out += detail::format_double(mag);
    } else if (mag == 1.0) {
      out += mono;
    } else {
      out += detail::format_double(mag) + "*" + mono;
    }
  }
  return out;
}

}  // namespace sosperturb
