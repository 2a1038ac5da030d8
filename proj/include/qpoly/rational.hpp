#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "qpoly/errors.hpp"

namespace qpoly {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << '/' << denominator(r);
  return out.str();
}

// Accepts "p", "p/q", "-p/q".
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw InputError("malformed rational '" + std::string(text) + "'");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw InputError("malformed rational '" + std::string(text) + "'");
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') throw InputError("malformed rational '" + std::string(text) + "'");
    return BigInt(std::string(s));
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt num = parse_int(text.substr(0, slash));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / boost::multiprecision::gcd(a, b) * b);
}

inline std::int64_t to_int64(const BigInt& v) {
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN)) throw ResourceLimit("integer overflow converting rational data");
  return v.convert_to<std::int64_t>();
}

}  // namespace qpoly
