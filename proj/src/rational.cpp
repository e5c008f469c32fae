#include "pathid/rational.hpp"

#include "pathid/errors.hpp"

namespace pathid {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error("empty number");
  auto dot = s.find('.');
  try {
    if (dot == std::string::npos) {
      Rational r(s, 10);
      if (r.get_den() == 0) throw Error("zero denominator");
      r.canonicalize();
      return r;
    }
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
        whole.find_first_not_of("0123456789") != std::string::npos) {
      throw Error("bad decimal");
    }
    Rational r(mpz_class(whole + frac, 10), mpz_class("1" + std::string(frac.size(), '0'), 10));
    r.canonicalize();
    return negative ? Rational(-r) : r;
  } catch (const std::invalid_argument&) {
    throw Error("invalid number '" + s + "'");
  } catch (const Error&) {
    throw Error("invalid number '" + s + "'");
  }
}

std::string to_string(const Rational& value) { return value.get_str(); }

}  // namespace pathid
