// SPDX-License-Identifier: Apache-2.0
#include "qsc/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace qsc {

SymbolTable& SymbolTable::instance() {
  static SymbolTable t;
  return t;
}

Symbol SymbolTable::intern(std::string_view name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  Symbol s = static_cast<Symbol>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), s);
  return s;
}

const std::string& SymbolTable::name(Symbol s) const { return names_.at(s); }

unsigned Monomial::total_degree() const {
  unsigned d = 0;
  for (auto& [s, e] : factors) d += e;
  return d;
}

std::uint32_t Monomial::exponent_of(Symbol s) const {
  for (auto& [t, e] : factors)
    if (t == s) return e;
  return 0;
}

std::string Monomial::to_string() const {
  if (factors.empty()) return "1";
  std::string out;
  for (auto& [s, e] : factors) {
    if (!out.empty()) out += "*";
    out += sym_name(s);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  auto& tab = SymbolTable::instance();
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    Symbol sa = a.factors[i].first, sb = b.factors[j].first;
    if (sa != sb) return tab.name_less(sa, sb);
    if (a.factors[i].second != b.factors[j].second)
      return a.factors[i].second > b.factors[j].second;  // higher power first
    ++i, ++j;
  }
  return i == a.factors.size() && j < b.factors.size();  // proper prefix sorts first
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  auto& tab = SymbolTable::instance();
  Monomial out;
  size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() ||
        (i < a.factors.size() && tab.name_less(a.factors[i].first, b.factors[j].first))) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() || tab.name_less(b.factors[j].first, a.factors[i].first)) {
      out.factors.push_back(b.factors[j++]);
    } else {
      out.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
      ++i, ++j;
    }
  }
  return out;
}

Polynomial::Polynomial(Rat c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
}

Polynomial Polynomial::variable(Symbol s) {
  Polynomial p;
  Monomial m;
  m.factors.emplace_back(s, 1);
  p.terms_.emplace(std::move(m), Rat(1));
  return p;
}

Polynomial Polynomial::term(Rat c, Monomial m) {
  Polynomial p;
  if (!c.is_zero()) p.terms_.emplace(std::move(m), std::move(c));
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.factors.empty());
}

Rat Polynomial::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rat(0) : it->second;
}

unsigned Polynomial::total_degree() const {
  unsigned d = 0;
  for (auto& [m, c] : terms_) d = std::max(d, m.total_degree());
  return d;
}

unsigned Polynomial::degree_in(const std::set<Symbol>& vars) const {
  unsigned d = 0;
  for (auto& [m, c] : terms_) {
    unsigned t = 0;
    for (auto& [s, e] : m.factors)
      if (vars.count(s)) t += e;
    d = std::max(d, t);
  }
  return d;
}

std::set<Symbol> Polynomial::variables() const {
  std::set<Symbol> out;
  for (auto& [m, c] : terms_)
    for (auto& [s, e] : m.factors) out.insert(s);
  return out;
}

bool Polynomial::uses(Symbol s) const {
  for (auto& [m, c] : terms_)
    if (m.exponent_of(s) > 0) return true;
  return false;
}

std::map<Monomial, Polynomial, MonomialLess> Polynomial::collect(const std::set<Symbol>& vars) const {
  std::map<Monomial, Polynomial, MonomialLess> out;
  for (auto& [m, c] : terms_) {
    Monomial key, rest;
    for (auto& [s, e] : m.factors)
      (vars.count(s) ? key : rest).factors.emplace_back(s, e);
    out[key] += Polynomial::term(c, rest);
  }
  return out;
}

Rat Polynomial::linear_coeff(Symbol s) const {
  Rat out(0);
  for (auto& [m, c] : terms_)
    if (m.factors.size() == 1 && m.factors[0].first == s && m.factors[0].second == 1) out += c;
  return out;
}

Rat Polynomial::evaluate(const std::map<Symbol, Rat>& point) const {
  Rat out(0);
  for (auto& [m, c] : terms_) {
    Rat t = c;
    for (auto& [s, e] : m.factors) {
      auto it = point.find(s);
      if (it == point.end())
        throw std::invalid_argument("evaluate: no value for variable " + sym_name(s));
      t *= it->second.pow(static_cast<long>(e));
    }
    out += t;
  }
  return out;
}

Polynomial Polynomial::substitute(const std::map<Symbol, Polynomial>& bindings) const {
  Polynomial out;
  for (auto& [m, c] : terms_) {
    Polynomial t(c);
    Monomial untouched;
    for (auto& [s, e] : m.factors) {
      auto it = bindings.find(s);
      if (it == bindings.end())
        untouched.factors.emplace_back(s, e);
      else
        t *= it->second.pow(e);
    }
    out += t * Polynomial::term(Rat(1), untouched);
  }
  return out;
}

Polynomial Polynomial::substitute_values(const std::map<Symbol, Rat>& values) const {
  Polynomial out;
  for (auto& [m, c] : terms_) {
    Rat coeff = c;
    Monomial rest;
    for (auto& [s, e] : m.factors) {
      auto it = values.find(s);
      if (it == values.end())
        rest.factors.emplace_back(s, e);
      else
        coeff *= it->second.pow(static_cast<long>(e));
    }
    out.add_term(rest, coeff);
  }
  return out;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial out(Rat(1));
  Polynomial base = *this;
  while (e) {
    if (e & 1u) out *= base;
    base = base * base;
    e >>= 1u;
  }
  return out;
}

void Polynomial::add_term(const Monomial& m, const Rat& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (auto& [ma, ca] : a.terms_)
    for (auto& [mb, cb] : b.terms_) out.add_term(mono_mul(ma, mb), ca * cb);
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  *this = *this * o;
  return *this;
}

Polynomial& Polynomial::operator*=(const Rat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

Polynomial operator-(const Polynomial& a) {
  Polynomial out = a;
  out *= Rat(-1);
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto& [m, c] : terms_) {
    bool neg = c.sign() < 0;
    Rat a = c.abs();
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (m.factors.empty())
      out += a.to_string();
    else if (a.is_one())
      out += m.to_string();
    else
      out += a.to_string() + "*" + m.to_string();
  }
  return out;
}

}  // namespace qsc
