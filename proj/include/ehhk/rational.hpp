#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ehhk {

// Expression templates off: generic code below writes `T x = a * b` for both
// double and Rational, which must not capture temporaries.
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

struct UnsupportedSpace : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvariantError : std::runtime_error {
  std::string field;
  InvariantError(std::string f, const std::string& what)
      : std::runtime_error(what), field(std::move(f)) {}
};

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational make_rational(long num, long den = 1) { return Rational(num) / Rational(den); }

inline std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

inline int sign(const Rational& q) { return q.sign(); }
inline int sign(double x) { return (x > 0) - (x < 0); }

// Exact square root when q is the square of a rational; used to keep equality
// cases exact.
inline bool exact_sqrt(const Rational& q, Rational& out) {
  if (q.sign() < 0) return false;
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  Integer rn = boost::multiprecision::sqrt(num);
  Integer rd = boost::multiprecision::sqrt(den);
  if (rn * rn != num || rd * rd != den) return false;
  out = Rational(rn) / Rational(rd);
  return true;
}

}  // namespace ehhk
