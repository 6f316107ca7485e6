#include "oslab/rational.hpp"

namespace oslab {

Rational parse_rational(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    Rational r(text);
    r.canonicalize();
    return r;
  }
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::string den = "1" + std::string(text.size() - dot - 1, '0');
  Rational r{mpz_class(digits), mpz_class(den)};
  r.canonicalize();
  return r;
}

}  // namespace oslab
