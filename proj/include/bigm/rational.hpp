#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace bigm {

// Exact arithmetic base. mpq_rational keeps values in lowest terms with a
// positive denominator as long as it is constructed through canonicalizing
// paths; parse_rational below is the only string entry point we use.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

class A1ViolationError : public std::runtime_error {
 public:
  explicit A1ViolationError(const std::string& what) : std::runtime_error(what) {}
};

// Parses "p/q" or "p". The two-argument Rational constructor canonicalizes;
// a bare string constructor would not, and GMP arithmetic assumes canonical
// operands.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(Integer(text));
    }
    Integer num(text.substr(0, slash));
    Integer den(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + text + "'");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw ParseError("malformed rational literal '" + text + "'");
  }
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline bool is_integral(const Rational& r) { return denominator(r) == 1; }

inline Vec zeros(std::size_t n) { return Vec(n, Rational(0)); }

inline Rational dot(const Vec& a, const Vec& b) {
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec mat_vec(const Mat& m, const Vec& x) {
  Vec out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(dot(row, x));
  return out;
}

inline Rational linf_norm(const Vec& v) {
  Rational m(0);
  for (const auto& x : v)
    if (abs(x) > m) m = abs(x);
  return m;
}

inline Rational l1_norm(const Vec& v) {
  Rational s(0);
  for (const auto& x : v) s += abs(x);
  return s;
}

// Lexicographic order on exact vectors; used to canonicalize enumeration
// output so concurrent workers merge deterministically.
inline bool lex_less(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

}  // namespace bigm
