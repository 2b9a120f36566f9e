// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc {

/// Interned variable identifier. Ordering used throughout (monomials,
/// emission) is the lexicographic order of the *names*, so that output is
/// byte-stable regardless of interning order.
using Symbol = std::uint32_t;

class SymbolTable {
public:
  static SymbolTable& instance();
  Symbol intern(std::string_view name);
  const std::string& name(Symbol s) const;
  bool name_less(Symbol a, Symbol b) const { return name(a) < name(b); }

private:
  std::vector<std::string> names_;
  std::map<std::string, Symbol, std::less<>> index_;
};

inline Symbol sym(std::string_view name) { return SymbolTable::instance().intern(name); }
inline const std::string& sym_name(Symbol s) { return SymbolTable::instance().name(s); }

/// Power product: (symbol, exponent) pairs sorted by symbol name, exponents > 0.
struct Monomial {
  std::vector<std::pair<Symbol, std::uint32_t>> factors;

  unsigned total_degree() const;
  std::uint32_t exponent_of(Symbol s) const;
  bool operator==(const Monomial& o) const { return factors == o.factors; }
  std::string to_string() const;
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

Monomial mono_mul(const Monomial& a, const Monomial& b);

/// Exact multivariate polynomial with rational coefficients. Canonical form:
/// no zero coefficients stored, terms ordered deterministically.
class Polynomial {
public:
  using TermMap = std::map<Monomial, Rat, MonomialLess>;

  Polynomial() = default;
  Polynomial(Rat c);
  Polynomial(long c) : Polynomial(Rat(c)) {}
  static Polynomial variable(Symbol s);
  static Polynomial term(Rat c, Monomial m);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (zero if absent); equals the value when is_constant().
  Rat constant_value() const;

  unsigned total_degree() const;
  /// Total degree counting only the given symbols.
  unsigned degree_in(const std::set<Symbol>& vars) const;
  std::set<Symbol> variables() const;
  bool uses(Symbol s) const;

  /// Coefficient of the monomial formed by `vars` exponents within each term;
  /// groups terms by their projection onto `vars`, remainder becomes the
  /// coefficient polynomial. Deterministic order.
  std::map<Monomial, Polynomial, MonomialLess> collect(const std::set<Symbol>& vars) const;

  /// Coefficient of `s^1` and the remainder, for affine polynomials.
  Rat linear_coeff(Symbol s) const;

  Rat evaluate(const std::map<Symbol, Rat>& point) const;
  /// Substitutes the mapped symbols; unmapped symbols remain.
  Polynomial substitute(const std::map<Symbol, Polynomial>& bindings) const;
  /// Replaces each mapped symbol by a constant, keeping the rest symbolic.
  Polynomial substitute_values(const std::map<Symbol, Rat>& values) const;

  Polynomial pow(unsigned e) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const Rat& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rat& c) { return a *= c; }
  friend Polynomial operator*(const Rat& c, Polynomial a) { return a *= c; }
  friend Polynomial operator-(const Polynomial& a);

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  const TermMap& terms() const { return terms_; }
  std::string to_string() const;

private:
  void add_term(const Monomial& m, const Rat& c);
  TermMap terms_;
};

inline Polynomial var(Symbol s) { return Polynomial::variable(s); }
inline Polynomial var(std::string_view name) { return Polynomial::variable(sym(name)); }

}  // namespace qsc
