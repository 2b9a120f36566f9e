// SPDX-License-Identifier: Apache-2.0
#include "qsc/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace qsc {

Rat::Rat(long n, long d) : v_(n, d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  v_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::invalid_argument("rational division by zero");
  v_ /= o.v_;
  return *this;
}

std::optional<Rat> Rat::parse(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string text(s);
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    try {
      mpz_class n(num), d(den);
      if (d == 0) return std::nullopt;
      mpq_class q(n, d);
      q.canonicalize();
      return Rat(q);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string head = text.substr(0, dot), frac = text.substr(dot + 1);
    if (frac.empty()) return std::nullopt;
    for (char c : frac)
      if (c < '0' || c > '9') return std::nullopt;
    bool neg = !head.empty() && head[0] == '-';
    if (neg || (!head.empty() && head[0] == '+')) head = head.substr(1);
    if (head.empty()) head = "0";
    try {
      mpz_class ip(head);
      mpz_class fp(frac);
      mpz_class scale = 1;
      for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
      mpq_class q(ip * scale + fp, scale);
      q.canonicalize();
      if (neg) q = -q;
      return Rat(q);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  try {
    return Rat(mpz_class(text));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

mpz_class Rat::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

mpz_class Rat::ceil() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

Rat Rat::pow(long e) const {
  if (e == 0) return Rat(1);
  bool inv = e < 0;
  unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  if (inv && is_zero()) throw std::invalid_argument("zero to a negative power");
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), v_.get_num().get_mpz_t(), k);
  mpz_pow_ui(d.get_mpz_t(), v_.get_den().get_mpz_t(), k);
  mpq_class q = inv ? mpq_class(d, n) : mpq_class(n, d);
  q.canonicalize();
  return Rat(q);
}

std::string Rat::to_string() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

}  // namespace qsc
