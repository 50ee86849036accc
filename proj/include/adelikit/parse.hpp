#pragma once
// Infix polynomial parser: "x^2 - 3/4*x*y + 2".

#include <cctype>
#include <string>
#include <vector>

#include "adelikit/polynomial.hpp"

namespace adelikit {

namespace detail {

class PolyParser {
 public:
  PolyParser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  Poly parse() {
    Poly p = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return p;
  }

 private:
  const std::string& s_;
  const std::vector<std::string>& vars_;
  size_t i_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw DomainError("cannot parse polynomial '" + s_ + "': " + why);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly p(vars_.size());
    bool neg = eat('-');
    if (!neg) eat('+');
    p = neg ? -term() : term();
    for (;;) {
      if (eat('+')) p += term();
      else if (eat('-')) p -= term();
      else return p;
    }
  }
  Poly term() {
    Poly p = power();
    for (;;) {
      if (eat('*')) p = p * power();
      else if (eat('/')) {
        Poly d = power();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        p *= 1 / d.constant_term();
      } else return p;
    }
  }
  Poly power() {
    Poly b = atom();
    if (eat('^')) {
      skip();
      size_t st = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (st == i_) fail("expected exponent");
      b = b.pow(static_cast<unsigned>(std::stoul(s_.substr(st, i_ - st))));
    }
    return b;
  }
  Poly atom() {
    skip();
    if (eat('(')) {
      Poly p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (eat('-')) return -atom();
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      size_t st = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return Poly(vars_.size(), Rational(Integer(s_.substr(st, i_ - st))));
    }
    size_t st = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    std::string name = s_.substr(st, i_ - st);
    if (name.empty()) fail("expected a term");
    for (size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == name) return Poly::var(vars_.size(), k);
    fail("unknown variable '" + name + "'");
  }
};

}  // namespace detail

inline Poly parse_poly(const std::string& s, const std::vector<std::string>& vars) {
  return detail::PolyParser(s, vars).parse();
}

}  // namespace adelikit
