#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace spreadlab {

/// Exact arbitrary-precision rational. Every quantity in the library is one
/// of these; there is no floating point in the core.
using Rational = boost::multiprecision::mpq_rational;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (rational literals, JSON documents, flags).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A structurally well-formed object violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Parses "p/q", "-p/q" or an integer string. Rejects zero denominators,
/// whitespace, decimals and exponents.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& value);

/// Approximate decimal rendering for human-facing output only.
double to_double(const Rational& value);

inline Rational positive_part(const Rational& x) { return x > 0 ? x : Rational(0); }
inline Rational negative_part(const Rational& x) { return x < 0 ? Rational(-x) : Rational(0); }

/// 2^-k as an exact rational.
Rational pow2_inverse(unsigned k);

}  // namespace spreadlab
