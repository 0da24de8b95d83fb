#pragma once

// Integer-rational arithmetic expressions over named integer parameters:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?       exponent must evaluate to an integer
//   atom  := integer | name | '(' expr ')'

#include "ehhk/rational.hpp"

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ehhk {

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Bindings = std::map<std::string, long>;

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view src, const Bindings& vars) : src_(src), vars_(vars) {}

  Rational parse() {
    Rational v = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return v;
  }

 private:
  std::string_view src_;
  const Bindings& vars_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ExprError("expression '" + std::string(src_) + "' at column " +
                    std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Rational expr() {
    Rational v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  Rational term() {
    Rational v = unary();
    for (;;) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        Rational d = unary();
        if (d == 0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  Rational unary() {
    if (eat('-')) return -unary();
    return power();
  }

  Rational power() {
    Rational base = atom();
    if (!eat('^')) return base;
    Rational e = unary();
    if (boost::multiprecision::denominator(e) != 1) fail("non-integer exponent");
    long k = boost::multiprecision::numerator(e).convert_to<long>();
    if (k < 0 && base == 0) fail("zero to a negative power");
    Rational r = 1;
    for (long i = 0; i < (k < 0 ? -k : k); ++i) r *= base;
    return k < 0 ? Rational(1) / r : r;
  }

  Rational atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Rational v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return Rational(Integer(std::string(src_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      auto it = vars_.find(name);
      if (it == vars_.end()) fail("unbound variable '" + name + "'");
      return Rational(it->second);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace detail

inline Rational eval_expr(std::string_view src, const Bindings& vars = {}) {
  return detail::ExprParser(src, vars).parse();
}

}  // namespace ehhk
