#include "spreadlab/rational.hpp"

#include <cctype>

namespace spreadlab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw ParseError("malformed rational \"" + std::string(text) + "\"");
  }
  const boost::multiprecision::mpz_int d{std::string(den)};
  if (d == 0) {
    throw ParseError("zero denominator in rational \"" + std::string(text) + "\"");
  }
  Rational value(boost::multiprecision::mpz_int{std::string(num)}, d);
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) { return value.str(); }

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational pow2_inverse(unsigned k) {
  boost::multiprecision::mpz_int den(1);
  den <<= k;
  return Rational(boost::multiprecision::mpz_int(1), den);
}

}  // namespace spreadlab
