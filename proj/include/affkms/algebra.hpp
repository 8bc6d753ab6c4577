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
#include <complex>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include <json.hpp>

#include "affkms/arith.hpp"
#include "affkms/root_of_unity.hpp"

namespace affkms {

/// The spanning monomial V_a U^k V_b^*. The triple is already a normal form.
struct Monomial {
  u64 a = 1;
  i64 k = 0;
  u64 b = 1;

  Monomial() = default;
  Monomial(u64 a_, i64 k_, u64 b_) : a(a_), k(k_), b(b_) {
    if (a == 0 || b == 0) throw std::invalid_argument("Monomial: a and b must be positive");
  }

  static Monomial identity() { return {1, 0, 1}; }
  static Monomial U(i64 k) { return {1, k, 1}; }
  static Monomial V(u64 a) { return {a, 0, 1}; }

  std::string str() const { return "(" + std::to_string(a) + "," + std::to_string(k) + "," + std::to_string(b) + ")"; }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial& x, const Monomial& y) {
    return std::tie(x.a, x.b, x.k) <=> std::tie(y.a, y.b, y.k);
  }
};

/// Product of monomials. With x = (a,m,b), y = (c,n,d), g = gcd(b,c), c' = c/g, b' = b/g:
/// x y = (a c', m c' + n b', b' d).
inline Monomial mono_mul(const Monomial& x, const Monomial& y) {
  const u64 g = std::gcd(x.b, y.a);
  const u64 cp = y.a / g;
  const u64 bp = x.b / g;
  const i64 k = checked_add(checked_mul(x.k, static_cast<i64>(cp)), checked_mul(y.k, static_cast<i64>(bp)));
  return {checked_mul(x.a, cp), k, checked_mul(bp, y.b)};
}

inline Monomial adjoint(const Monomial& x) {
  if (x.k == std::numeric_limits<i64>::min()) throw std::range_error("adjoint: k out of range");
  return {x.b, -x.k, x.a};
}

/// The scalar (a/b)^-beta with sigma_{i beta}(x) = (a/b)^-beta x.
inline double sigma_ibeta_factor(const Monomial& x, double beta) {
  if (x.a == x.b) return 1.0;
  return std::pow(static_cast<double>(x.a) / static_cast<double>(x.b), -beta);
}

/// Finite linear combination of monomials with complex coefficients.
class AlgebraElement {
 public:
  using Terms = std::map<Monomial, cplx>;

  AlgebraElement() = default;
  explicit AlgebraElement(const Monomial& m, cplx c = 1.0) { add(m, c); }

  static AlgebraElement zero() { return {}; }
  static AlgebraElement one() { return AlgebraElement(Monomial::identity()); }

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c * m, dropping the entry if it cancels exactly.
  void add(const Monomial& m, cplx c) {
    if (c == cplx{}) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx{}) terms_.erase(it);
    }
  }

  cplx coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? cplx{} : it->second;
  }

  /// Drops coefficients whose real and imaginary parts are both below threshold.
  AlgebraElement& cleanup(double threshold = 1e-14) {
    std::erase_if(terms_, [&](const auto& kv) {
      return std::abs(kv.second.real()) < threshold && std::abs(kv.second.imag()) < threshold;
    });
    return *this;
  }

  bool is_integral() const {
    for (const auto& [m, c] : terms_)
      if (c.imag() != 0.0 || c.real() != std::round(c.real())) return false;
    return true;
  }

  /// Exact comparison for integer coefficients, 1e-12 coefficient-wise otherwise.
  friend bool operator==(const AlgebraElement& x, const AlgebraElement& y) {
    if (x.is_integral() && y.is_integral()) return x.terms_ == y.terms_;
    return approx_equal(x, y, 1e-12);
  }

  friend bool approx_equal(const AlgebraElement& x, const AlgebraElement& y, double tol) {
    auto close = [&](cplx d) { return std::abs(d.real()) <= tol && std::abs(d.imag()) <= tol; };
    for (const auto& [m, c] : x.terms_)
      if (!close(c - y.coefficient(m))) return false;
    for (const auto& [m, c] : y.terms_)
      if (!x.terms_.contains(m) && !close(c)) return false;
    return true;
  }

 private:
  Terms terms_;
};

inline AlgebraElement elem_add(const AlgebraElement& x, const AlgebraElement& y) {
  AlgebraElement out = x;
  for (const auto& [m, c] : y.terms()) out.add(m, c);
  return out;
}

inline AlgebraElement elem_scale(const AlgebraElement& x, cplx s) {
  AlgebraElement out;
  if (s == cplx{}) return out;
  for (const auto& [m, c] : x.terms()) out.add(m, s * c);
  return out;
}

inline AlgebraElement elem_mul(const AlgebraElement& x, const AlgebraElement& y) {
  AlgebraElement out;
  for (const auto& [mx, cx] : x.terms())
    for (const auto& [my, cy] : y.terms()) out.add(mono_mul(mx, my), cx * cy);
  return out;
}

inline AlgebraElement elem_adjoint(const AlgebraElement& x) {
  AlgebraElement out;
  for (const auto& [m, c] : x.terms()) out.add(adjoint(m), std::conj(c));
  return out;
}

inline AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y) { return elem_add(x, y); }
inline AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y) { return elem_add(x, elem_scale(y, -1.0)); }
inline AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y) { return elem_mul(x, y); }
inline AlgebraElement operator*(cplx s, const AlgebraElement& x) { return elem_scale(x, s); }

/// e_F = sum over square-free F-products d of mu(d) V_d V_d^*.
inline AlgebraElement projection_eF(const PrimeSet& F) {
  if (F.size() > 20) throw std::invalid_argument("projection_eF: at most 20 primes supported");
  AlgebraElement out;
  const auto ps = F.primes();
  const std::size_t n = ps.size();
  for (u64 mask = 0; mask < (u64{1} << n); ++mask) {
    u64 d = 1;
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        d = checked_mul(d, ps[i]);
        sign = -sign;
      }
    out.add({d, 0, d}, static_cast<double>(sign));
  }
  return out;
}

/// e_{a,b} = sum_{d | a/b} mu(d) V_{bd} V_{bd}^*.
inline AlgebraElement projection_eab(u64 a, u64 b) {
  if (a == 0 || b == 0 || a % b != 0) throw std::invalid_argument("projection_eab: b must divide a");
  AlgebraElement out;
  for (auto [d, mu] : squarefree_divisors(a / b)) out.add({b * d, 0, b * d}, static_cast<double>(mu));
  return out;
}

/// alpha_a(x) = V_a x V_a^*.
inline AlgebraElement alpha_a(u64 a, const AlgebraElement& x) {
  const AlgebraElement va(Monomial::V(a));
  return va * x * elem_adjoint(va);
}

/// A point (z, d) of the level spectrum T x Delta_a, with z restricted to roots of unity.
struct SpectrumPoint {
  RootOfUnity z;
  u64 d = 1;
  friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

/// Psi_{a,b}(z, d) = (z^{d / gcd(a,d)}, gcd(a,d)) for a | b and d | b.
inline SpectrumPoint spectra_project(const SpectrumPoint& p, u64 a, u64 b) {
  if (a == 0 || b == 0 || p.d == 0) throw std::invalid_argument("spectra_project: indices must be positive");
  if (b % a != 0) throw std::invalid_argument("spectra_project: a must divide b");
  if (b % p.d != 0) throw std::invalid_argument("spectra_project: divisor label must divide b");
  const u64 g = std::gcd(a, p.d);
  return {p.z.pow(static_cast<i64>(p.d / g)), g};
}

// ---------------------------------------------------------------------------
// JSON: a list of {a, k, b, re, im} records.

inline nlohmann::json to_json(const AlgebraElement& x) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [m, c] : x.terms())
    out.push_back({{"a", m.a}, {"k", m.k}, {"b", m.b}, {"re", c.real()}, {"im", c.imag()}});
  return out;
}

inline AlgebraElement algebra_element_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("algebra element JSON must be an array");
  AlgebraElement out;
  for (const auto& t : j) {
    const Monomial m(t.at("a").get<u64>(), t.at("k").get<i64>(), t.at("b").get<u64>());
    out.add(m, {t.value("re", 0.0), t.value("im", 0.0)});
  }
  return out;
}

}  // namespace affkms
