// Copyright 2026 The Fisherkit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fisher {

// Exact rational number. Always canonical: gcd(num, den) = 1, den > 0,
// zero is 0/1. Every arithmetic path in the toolkit goes through this
// type; there are no floating-point entry points.
class Rat {
 public:
  Rat() : q_(0) {}
  Rat(long n) : q_(n) {}  // NOLINT: implicit on purpose, integers embed
  Rat(long n, long d) : q_(n, d == 0 ? throw_zero_den() : d) {
    q_.canonicalize();
  }
  Rat(const mpz_class& n, const mpz_class& d) : q_(n, d) {
    if (d == 0) throw_zero_den();
    q_.canonicalize();
  }
  explicit Rat(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Parses "p/q" or a bare integer "p". Whitespace is not accepted.
  static Rat parse(std::string_view s) {
    const auto bad = [&] {
      throw std::invalid_argument("not a rational: '" + std::string(s) + "'");
    };
    if (s.empty()) bad();
    const auto slash = s.find('/');
    try {
      if (slash == std::string_view::npos) {
        mpz_class n(std::string(s), 10);
        return Rat(n, 1);
      }
      if (slash == 0 || slash + 1 == s.size()) bad();
      mpz_class n(std::string(s.substr(0, slash)), 10);
      mpz_class d(std::string(s.substr(slash + 1)), 10);
      if (d == 0) bad();
      return Rat(n, d);
    } catch (const std::invalid_argument&) {
      bad();
    }
    return Rat();  // unreachable
  }

  // Canonical "p/q" form, denominator always printed ("4/1", "-1/2").
  std::string str() const {
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  const mpz_class& num() const { return q_.get_num(); }
  const mpz_class& den() const { return q_.get_den(); }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  Rat abs() const { return Rat(::abs(q_), canonical_tag{}); }

  // Display only; never feeds back into computation.
  double to_double() const { return q_.get_d(); }

  Rat operator-() const { return Rat(-q_, canonical_tag{}); }

  Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
  Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
  Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
  friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
  friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
  friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.q_ >= b.q_; }

  const mpq_class& raw() const { return q_; }

 private:
  struct canonical_tag {};
  Rat(mpq_class q, canonical_tag) : q_(std::move(q)) {}
  static long throw_zero_den() {
    throw std::domain_error("rational with zero denominator");
  }
  mpq_class q_;
};

inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// base^e for integer base and small nonnegative exponent.
inline mpz_class int_pow(long base, unsigned e) {
  mpz_class r, b(base);
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

// 1 / n^e, the scale the reduction gadgets live at.
inline Rat inv_pow(long n, unsigned e) {
  if (n == 0) throw std::domain_error("inv_pow of zero");
  return Rat(mpz_class(1), int_pow(n, e));
}

inline Rat pow(const Rat& base, unsigned e) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.num().get_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.den().get_mpz_t(), e);
  return Rat(n, d);
}

// floor(x) as an integer.
inline mpz_class floor_int(const Rat& x) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
  return q;
}

// ceil(x) as an integer.
inline mpz_class ceil_int(const Rat& x) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), x.num().get_mpz_t(), x.den().get_mpz_t());
  return q;
}

// Best rational approximation to x with denominator <= den_bound, found by
// walking the continued-fraction convergents; the answer is the last
// convergent that fits or the best semiconvergent past it, whichever is
// nearer. Ties resolve to the smaller value, so the result is deterministic.
inline Rat round_to_den_bound(const Rat& x, const mpz_class& den_bound) {
  if (den_bound < 1) throw std::domain_error("den_bound must be >= 1");
  if (x.den() <= den_bound) return x;

  // Convergent recurrence h_n = a_n h_{n-1} + h_{n-2}, seeded with
  // h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1.
  mpz_class pa = x.num(), qa = x.den();
  mpz_class hp = 1, kp = 0;   // convergent n-1
  mpz_class hpp = 0, kpp = 1;  // convergent n-2
  while (qa != 0) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), pa.get_mpz_t(), qa.get_mpz_t());
    mpz_class hn = a * hp + hpp;
    mpz_class kn = a * kp + kpp;
    if (kn > den_bound) {
      // kp >= 1 here: the first convergent has k = 1 <= den_bound.
      Rat conv(hp, kp);
      mpz_class t = (den_bound - kpp) / kp;
      Rat semi(hpp + t * hp, kpp + t * kp);
      Rat dc = (conv - x).abs();
      Rat ds = (semi - x).abs();
      if (ds < dc) return semi;
      if (dc < ds) return conv;
      return min(conv, semi);
    }
    hpp = hp; kpp = kp;
    hp = hn; kp = kn;
    mpz_class r = pa - a * qa;
    pa = qa;
    qa = r;
  }
  return Rat(hp, kp);  // x itself was representable after all
}

// FNV-1a over a byte string; used for file digests and price-vector hashes.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_value(const Rat& x) { return fnv1a64(x.str()); }

}  // namespace fisher
