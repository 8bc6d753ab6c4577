/*
Copyright 2026 The affkms Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace affkms {

using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Default tolerance for real comparisons.
inline constexpr double kDefaultTol = 1e-10;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// ---------------------------------------------------------------------------
// Checked 64-bit arithmetic. Overflow raises std::range_error.

inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::range_error("affkms: integer overflow in multiplication");
  return r;
}

inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::range_error("affkms: integer overflow in addition");
  return r;
}

inline u64 checked_mul(u64 a, u64 b) {
  u64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::range_error("affkms: integer overflow in multiplication");
  return r;
}

inline u64 lcm_checked(u64 a, u64 b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / std::gcd(a, b), b);
}

/// Non-negative remainder of a modulo m (m > 0).
inline u64 mod_floor(i64 a, u64 m) {
  const i64 mm = static_cast<i64>(m);
  i64 r = a % mm;
  if (r < 0) r += mm;
  return static_cast<u64>(r);
}

// ---------------------------------------------------------------------------
// Primes

namespace detail {

inline constexpr u64 kSieveLimit = 1'000'000;

inline std::vector<u64> sieve_primes(u64 limit) {
  std::vector<u64> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    if (i <= limit / i)
      for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace detail

/// Primes up to 10^6, built once. Immutable after initialization.
inline const std::vector<u64>& prime_table() {
  static const std::vector<u64> table = detail::sieve_primes(detail::kSieveLimit);
  return table;
}

/// All primes <= limit. Served from the shared table when possible.
inline std::vector<u64> primes_up_to(u64 limit) {
  const auto& t = prime_table();
  if (limit <= detail::kSieveLimit) return {t.begin(), std::upper_bound(t.begin(), t.end(), limit)};
  return detail::sieve_primes(limit);
}

/// The first `count` primes.
inline std::vector<u64> first_primes(std::size_t count) {
  const auto& t = prime_table();
  if (count > t.size()) throw std::invalid_argument("first_primes: count exceeds prime table");
  return {t.begin(), t.begin() + static_cast<std::ptrdiff_t>(count)};
}

/// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Factorization

struct PrimePower {
  u64 prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = prod prime^exponent with primes strictly increasing.
struct Factorization {
  u64 value = 1;
  std::vector<PrimePower> factors;

  std::vector<u64> primes() const {
    std::vector<u64> out;
    out.reserve(factors.size());
    for (const auto& f : factors) out.push_back(f.prime);
    return out;
  }
  bool square_free() const {
    return std::all_of(factors.begin(), factors.end(), [](const PrimePower& f) { return f.exponent == 1; });
  }
  /// Product of the distinct primes.
  u64 radical() const {
    u64 r = 1;
    for (const auto& f : factors) r *= f.prime;
    return r;
  }
};

/// Trial division by the primes below 10^6. A leftover cofactor is accepted when it is
/// provably prime (below 10^12, or Miller-Rabin); otherwise a range error is raised.
inline Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  if (n >= (u64{1} << 63)) throw std::range_error("factorize: n must be below 2^63");
  Factorization out;
  out.value = n;
  u64 rest = n;
  for (u64 p : prime_table()) {
    if (p * p > rest) break;
    if (rest % p != 0) continue;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    out.factors.push_back({p, e});
  }
  if (rest > 1) {
    const u64 bound = detail::kSieveLimit * detail::kSieveLimit;
    if (rest >= bound && !is_prime(rest))
      throw std::range_error("factorize: cofactor " + std::to_string(rest) + " has no prime factor below 10^6");
    out.factors.push_back({rest, 1});
  }
  return out;
}

inline int mobius(u64 n) {
  const auto f = factorize(n);
  if (!f.square_free()) return 0;
  return (f.factors.size() % 2 == 0) ? 1 : -1;
}

/// Euler's totient, exact.
inline u64 totient(u64 n) {
  u64 r = n;
  for (const auto& f : factorize(n).factors) r = r / f.prime * (f.prime - 1);
  return r;
}

/// Generalized totient n^beta prod_{p|n} (1 - p^-beta). Equals Euler's totient at
/// beta = 1 and the indicator of n = 1 at beta = 0.
inline double totient_beta(u64 n, double beta) {
  if (beta < 0) throw std::invalid_argument("totient_beta: beta must be non-negative");
  double r = std::pow(static_cast<double>(n), beta);
  for (const auto& f : factorize(n).factors) r *= 1.0 - std::pow(static_cast<double>(f.prime), -beta);
  return r;
}

/// Sorted divisors of n.
inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> out{1};
  for (const auto& f : factorize(n).factors) {
    const std::size_t prev = out.size();
    u64 pk = 1;
    for (unsigned e = 1; e <= f.exponent; ++e) {
      pk *= f.prime;
      for (std::size_t i = 0; i < prev; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Square-free divisors of n with their Mobius signs.
inline std::vector<std::pair<u64, int>> squarefree_divisors(u64 n) {
  std::vector<std::pair<u64, int>> out{{1, 1}};
  for (u64 p : factorize(n).primes()) {
    const std::size_t prev = out.size();
    for (std::size_t i = 0; i < prev; ++i) out.emplace_back(out[i].first * p, -out[i].second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prime sets and smooth numbers

/// A finite set of primes, kept sorted and duplicate-free.
class PrimeSet {
 public:
  PrimeSet() = default;
  explicit PrimeSet(std::vector<u64> primes, std::optional<std::string> label = std::nullopt)
      : primes_(std::move(primes)), label_(std::move(label)) {
    std::sort(primes_.begin(), primes_.end());
    primes_.erase(std::unique(primes_.begin(), primes_.end()), primes_.end());
    for (u64 p : primes_)
      if (!is_prime(p)) throw std::invalid_argument("PrimeSet: " + std::to_string(p) + " is not prime");
  }
  PrimeSet(std::initializer_list<u64> primes) : PrimeSet(std::vector<u64>(primes)) {}

  /// The first n primes 2, 3, 5, ..., p_n.
  static PrimeSet first(std::size_t n) {
    return PrimeSet(first_primes(n), "first " + std::to_string(n) + " primes");
  }
  static PrimeSet up_to(u64 bound) { return PrimeSet(primes_up_to(bound), "primes <= " + std::to_string(bound)); }

  std::span<const u64> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  bool empty() const { return primes_.empty(); }
  bool contains(u64 p) const { return std::binary_search(primes_.begin(), primes_.end(), p); }
  const std::optional<std::string>& label() const { return label_; }

  /// Product of the members (checked).
  u64 product() const {
    u64 r = 1;
    for (u64 p : primes_) r = checked_mul(r, p);
    return r;
  }
  PrimeSet without(const PrimeSet& other) const {
    std::vector<u64> out;
    std::set_difference(primes_.begin(), primes_.end(), other.primes_.begin(), other.primes_.end(),
                        std::back_inserter(out));
    return PrimeSet(std::move(out));
  }
  friend bool operator==(const PrimeSet& a, const PrimeSet& b) { return a.primes_ == b.primes_; }

 private:
  std::vector<u64> primes_;
  std::optional<std::string> label_;
};

/// Elements of N_F (integers whose prime factors all lie in F) up to bound, ascending.
inline std::vector<u64> smooth_numbers(const PrimeSet& primes, u64 bound) {
  if (bound == 0) throw std::invalid_argument("smooth_numbers: bound must be positive");
  std::vector<u64> out{1};
  for (u64 p : primes.primes()) {
    const std::size_t prev = out.size();
    for (std::size_t i = 0; i < prev; ++i) {
      u64 v = out[i];
      while (v <= bound / p) {
        v *= p;
        out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Euler product prod_{p in F} (1 - p^-beta)^-1.
inline double partial_zeta(const PrimeSet& primes, double beta) {
  if (beta < 0) throw std::invalid_argument("partial_zeta: beta must be non-negative");
  if (beta == 0 && !primes.empty()) throw std::domain_error("partial_zeta: divergent factor at beta = 0");
  double r = 1.0;
  for (u64 p : primes.primes()) r /= 1.0 - std::pow(static_cast<double>(p), -beta);
  return r;
}

/// Given g on the divisors of N, returns f with g(n) = sum_{d|n} f(d) for every n | N.
inline std::map<u64, double> mobius_invert(const std::map<u64, double>& g, u64 N) {
  const auto divs = divisors(N);
  for (u64 d : divs)
    if (!g.contains(d)) throw std::invalid_argument("mobius_invert: g missing divisor " + std::to_string(d));
  std::map<u64, double> f;
  for (u64 n : divs) {
    double acc = 0.0;
    for (auto [d, mu] : squarefree_divisors(n)) acc += mu * g.at(n / d);
    f[n] = acc;
  }
  return f;
}

/// Dirichlet summation n -> sum_{d|n} f(d) over the divisors of N.
inline std::map<u64, double> divisor_sum(const std::map<u64, double>& f, u64 N) {
  std::map<u64, double> g;
  for (u64 n : divisors(N)) {
    double acc = 0.0;
    for (u64 d : divisors(n)) acc += f.at(d);
    g[n] = acc;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Hurwitz zeta

namespace detail {

/// Euler-Maclaurin evaluation valid for any a > 0 and beta > 1.
inline double hurwitz_em(double beta, double a, double tol) {
  // B_2/2!, B_4/4!, B_6/6!, B_8/8!, and B_10/10! for the remainder estimate.
  static constexpr double kBernoulliOverFactorial[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0,
                                                       -1.0 / 1209600.0, 1.0 / 47900160.0};
  auto remainder_bound = [&](double x) {
    double rising = 1.0;
    for (int j = 0; j < 9; ++j) rising *= beta + j;
    return std::abs(kBernoulliOverFactorial[4]) * rising * std::pow(x, -beta - 9.0);
  };
  std::size_t terms = 16;
  while (remainder_bound(static_cast<double>(terms) + a) > tol && terms < (std::size_t{1} << 24)) terms *= 2;

  // Sum the direct terms smallest first.
  double sum = 0.0;
  for (std::size_t n = terms; n-- > 0;) sum += std::pow(static_cast<double>(n) + a, -beta);
  const double x = static_cast<double>(terms) + a;
  sum += std::pow(x, 1.0 - beta) / (beta - 1.0) + 0.5 * std::pow(x, -beta);
  double rising = beta;  // beta (beta+1) ... (beta+2j-2)
  double xpow = std::pow(x, -beta - 1.0);
  for (int j = 0; j < 4; ++j) {
    sum += kBernoulliOverFactorial[j] * rising * xpow;
    rising *= (beta + 2 * j + 1) * (beta + 2 * j + 2);
    xpow /= x * x;
  }
  return sum;
}

}  // namespace detail

/// zeta(beta, a) = sum_{n>=0} (n + a)^-beta for beta > 1 and a in (0, 1].
inline double hurwitz_zeta(double beta, double a, double tol = 1e-12) {
  if (!(beta > 1.0)) throw std::domain_error("hurwitz_zeta: beta must exceed 1");
  if (!(a > 0.0 && a <= 1.0)) throw std::domain_error("hurwitz_zeta: a must lie in (0, 1]");
  return detail::hurwitz_em(beta, a, tol);
}

/// Riemann zeta for beta > 1.
inline double riemann_zeta(double beta) { return hurwitz_zeta(beta, 1.0); }

/// Tail sum_{c > C} c^-beta for beta > 1.
inline double zeta_tail(double beta, u64 C) {
  if (!(beta > 1.0)) throw std::domain_error("zeta_tail: beta must exceed 1");
  return detail::hurwitz_em(beta, static_cast<double>(C) + 1.0, 1e-16);
}

}  // namespace affkms

namespace affkms {

/// Partial power sums sum_{c <= C, c = j mod q} c^-beta for every residue j, plus the
/// full zeta(beta) and the tail sum_{c > C} c^-beta. Requires beta > 1.
struct ResiduePowerSums {
  u64 modulus = 1;
  double beta = 2.0;
  u64 truncation = 1;
  std::vector<double> sums;
  double partial = 0.0;
  double zeta = 0.0;
  double tail = 0.0;
};

inline ResiduePowerSums residue_power_sums(double beta, u64 modulus, u64 C) {
  if (!(beta > 1.0)) throw std::domain_error("residue_power_sums: beta must exceed 1");
  if (modulus == 0 || C == 0) throw std::invalid_argument("residue_power_sums: modulus and truncation must be positive");
  if (modulus > (u64{1} << 24)) throw std::invalid_argument("residue_power_sums: modulus too large");
  ResiduePowerSums out;
  out.modulus = modulus;
  out.beta = beta;
  out.truncation = C;
  out.sums.assign(modulus, 0.0);
  std::vector<double> comp(modulus, 0.0);
  // Smallest terms first, Kahan-compensated per residue class.
  for (u64 c = C; c >= 1; --c) {
    const u64 j = c % modulus;
    const double y = std::pow(static_cast<double>(c), -beta) - comp[j];
    const double t = out.sums[j] + y;
    comp[j] = (t - out.sums[j]) - y;
    out.sums[j] = t;
  }
  double comp_total = 0.0;
  for (double s : out.sums) {
    const double y = s - comp_total;
    const double t = out.partial + y;
    comp_total = (t - out.partial) - y;
    out.partial = t;
  }
  out.zeta = riemann_zeta(beta);
  out.tail = zeta_tail(beta, C);
  return out;
}

}  // namespace affkms
