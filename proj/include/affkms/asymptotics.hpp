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
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "affkms/arith.hpp"
#include "affkms/root_of_unity.hpp"

namespace affkms {

// ---------------------------------------------------------------------------
// Smooth-number counting

/// Counts y-smooth integers in [1, x] by the recursion
/// Psi(x, p_k) = Psi(x, p_{k-1}) + Psi(x / p_k, p_k), memoized per instance.
/// Not thread-safe; use one counter per worker (psi_count does this).
class SmoothCounter {
 public:
  static constexpr u64 kMaxX = 1'000'000'000'000ULL;

  u64 count(u64 x, u64 y) {
    if (y < 2) throw std::invalid_argument("psi_count: y must be at least 2");
    if (x > kMaxX) throw std::invalid_argument("psi_count: x above 10^12");
    if (x == 0) return 0;
    if (y >= x) return x;
    ensure_primes(y);
    const auto k = static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), y) - primes_.begin());
    return rec(x, k);
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  void ensure_primes(u64 y) {
    if (!primes_.empty() && primes_.back() >= y) return;
    if (y <= prime_bound_) return;
    prime_bound_ = std::max<u64>(y, 1000);
    primes_ = primes_up_to(prime_bound_);
  }

  static u64 powers_of_two(u64 x) {
    u64 c = 0;
    for (u64 v = 1; v <= x; v <<= 1) {
      ++c;
      if (v > x / 2) break;
    }
    return c;
  }

  // Number of integers in [1, x] with every prime factor among the first k primes.
  u64 rec(u64 x, std::size_t k) {
    if (x == 0) return 0;
    if (k == 0) return 1;
    if (primes_[k - 1] >= x) return x;
    if (k == 1) return powers_of_two(x);
    const u64 key = (x << 17) | k;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    u64 total = powers_of_two(x);
    for (std::size_t i = 1; i < k; ++i) {
      const u64 p = primes_[i];
      if (p > x) break;
      const u64 q = x / p;
      // Everything up to q < p is p-smooth.
      total += (q < p) ? q : rec(q, i + 1);
    }
    memo_.emplace(key, total);
    return total;
  }

  std::vector<u64> primes_;
  u64 prime_bound_ = 0;
  std::unordered_map<u64, u64> memo_;
};

/// Psi(x, y): the number of integers in [1, x] with no prime factor above y.
inline u64 psi_count(u64 x, u64 y) {
  thread_local SmoothCounter counter;
  return counter.count(x, y);
}

// ---------------------------------------------------------------------------
// Dickman function

/// rho on the grid u_i = i h, i = 0 .. ceil(u_max / h).
struct DickmanGrid {
  double step = 0.01;
  std::vector<double> values;

  double u_max() const { return step * static_cast<double>(values.size() - 1); }

  /// Cubic Lagrange interpolation between grid points.
  double operator()(double u) const {
    if (u < 0) throw std::invalid_argument("DickmanGrid: u must be non-negative");
    if (u <= 1.0) return 1.0;
    const double pos = u / step;
    const auto last = static_cast<std::ptrdiff_t>(values.size()) - 1;
    auto i0 = static_cast<std::ptrdiff_t>(std::floor(pos));
    if (i0 > last) throw std::out_of_range("DickmanGrid: u beyond grid");
    if (std::abs(pos - std::round(pos)) < 1e-12) return values[static_cast<std::size_t>(std::llround(pos))];
    std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(i0 - 1, 0, std::max<std::ptrdiff_t>(0, last - 3));
    double r = 0.0;
    for (std::ptrdiff_t a = lo; a < lo + 4; ++a) {
      double w = 1.0;
      for (std::ptrdiff_t b = lo; b < lo + 4; ++b)
        if (b != a) w *= (pos - static_cast<double>(b)) / static_cast<double>(a - b);
      r += w * values[static_cast<std::size_t>(a)];
    }
    return r;
  }
};

namespace detail {

/// Trapezoidal stepping of u rho(u) = int_{u-1}^u rho(t) dt with 1/h grid points per unit.
inline std::vector<double> dickman_trapezoid(std::size_t per_unit, std::size_t count) {
  const double h = 1.0 / static_cast<double>(per_unit);
  std::vector<double> rho(count, 1.0);
  if (count <= per_unit + 1) return rho;
  // The window sum is rebuilt each step from positive terms. A running update would carry
  // absolute rounding error into the super-exponentially small tail.
  for (std::size_t i = per_unit + 1; i < count; ++i) {
    const double u = static_cast<double>(i) * h;
    double inner = 0.0;
    for (std::size_t j = i - 1; j > i - per_unit; --j) inner += rho[j];
    const double base = h * (inner + 0.5 * rho[i - per_unit]);
    rho[i] = base / (u - 0.5 * h);
  }
  return rho;
}

}  // namespace detail

/// Dickman grid with Richardson extrapolation over steps h and h/2. Requires 1/h integral.
inline DickmanGrid dickman_grid(double u_max, double h) {
  if (!(h > 0 && h <= 0.01)) throw std::invalid_argument("dickman: step must lie in (0, 0.01]");
  if (!(u_max >= 0 && u_max <= 60)) throw std::invalid_argument("dickman: u must lie in [0, 60]");
  const double inv = 1.0 / h;
  const auto per_unit = static_cast<std::size_t>(std::llround(inv));
  if (std::abs(inv - static_cast<double>(per_unit)) > 1e-9 * inv)
    throw std::invalid_argument("dickman: 1/h must be an integer");
  const std::size_t count = static_cast<std::size_t>(std::ceil(u_max * static_cast<double>(per_unit) - 1e-9)) + 4;
  const auto coarse = detail::dickman_trapezoid(per_unit, count);
  const auto fine = detail::dickman_trapezoid(2 * per_unit, 2 * count - 1);
  DickmanGrid g;
  g.step = 1.0 / static_cast<double>(per_unit);
  g.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) g.values[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
  return g;
}

inline double dickman(double u, double h = 0.005) {
  if (u < 0) throw std::invalid_argument("dickman: u must be non-negative");
  if (u <= 1.0) return 1.0;
  if (u > 50) throw std::invalid_argument("dickman: u above 50");
  return dickman_grid(u, h)(u);
}

/// int_0^{u_max} rho by Simpson's rule on the extrapolated grid (u_max / h must be even).
inline double dickman_mass(double u_max, double h = 0.005) {
  const DickmanGrid g = dickman_grid(u_max, h);
  const auto n = static_cast<std::size_t>(std::llround(u_max / g.step));
  if (std::abs(static_cast<double>(n) * g.step - u_max) > 1e-9) throw std::invalid_argument("dickman_mass: u_max must be a multiple of h");
  if (n % 2 != 0) throw std::invalid_argument("dickman_mass: u_max / h must be even");
  double s = g.values[0] + g.values[n];
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g.values[i];
  return s * g.step / 3.0;
}

// ---------------------------------------------------------------------------
// Mertens

struct MertensResult {
  double product = 0.0;
  double scaled = 0.0;
  double rel_dev = 0.0;
};

/// prod_{p <= x} (1 - 1/p), log(x) times it, and the relative deviation from e^-gamma.
inline MertensResult mertens_product(u64 x) {
  if (x < 3) throw std::invalid_argument("mertens_product: x must be at least 3");
  double log_sum = 0.0;
  for (u64 p : primes_up_to(x)) log_sum += std::log1p(-1.0 / static_cast<double>(p));
  MertensResult r;
  r.product = std::exp(log_sum);
  r.scaled = std::log(static_cast<double>(x)) * r.product;
  const double target = std::exp(-kEulerGamma);
  r.rel_dev = std::abs(r.scaled - target) / target;
  return r;
}

// ---------------------------------------------------------------------------
// Sequences and vanishing sums

namespace seq {
struct ConstOne {};
struct PrimeIndicator {};
struct SquareIndicator {};
/// a_m for m = 1 .. values.size(); zero beyond.
struct Custom {
  std::vector<double> values;
};
}  // namespace seq

using SequenceSpec = std::variant<seq::ConstOne, seq::PrimeIndicator, seq::SquareIndicator, seq::Custom>;

inline void validate(const SequenceSpec& a) {
  if (const auto* c = std::get_if<seq::Custom>(&a))
    for (double v : c->values)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("SequenceSpec: values must lie in [0, 1]");
}

inline double sequence_value(const SequenceSpec& a, u64 m) {
  return std::visit(
      [m](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, seq::ConstOne>) return 1.0;
        else if constexpr (std::is_same_v<T, seq::PrimeIndicator>) return is_prime(m) ? 1.0 : 0.0;
        else if constexpr (std::is_same_v<T, seq::SquareIndicator>) {
          const auto r = static_cast<u64>(std::llround(std::sqrt(static_cast<double>(m))));
          for (u64 c = (r > 0 ? r - 1 : 0); c <= r + 1; ++c)
            if (c * c == m) return 1.0;
          return 0.0;
        } else return (m >= 1 && m <= s.values.size()) ? s.values[m - 1] : 0.0;
      },
      a);
}

inline std::string sequence_name(const SequenceSpec& a) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, seq::ConstOne>) return "one";
        else if constexpr (std::is_same_v<T, seq::PrimeIndicator>) return "primes";
        else if constexpr (std::is_same_v<T, seq::SquareIndicator>) return "squares";
        else return "custom";
      },
      a);
}

struct HarmonicSum {
  double value = 0.0;
  /// prod (1 - 1/p) * sum over omitted smooth m > C of 1/m; bounds the omitted part of value.
  double truncation_share = 0.0;
};

/// prod_{p in P_n} (1 - 1/p) * sum_{m in N_n, m <= C} a_m / m, where P_n = first n primes.
inline HarmonicSum smooth_harmonic_sum(std::size_t n_primes, const SequenceSpec& a, u64 C) {
  validate(a);
  const PrimeSet F = PrimeSet::first(n_primes);
  const double euler = 1.0 / partial_zeta(F, 1.0);
  double s = 0.0;
  double harmonic = 0.0;
  auto ms = smooth_numbers(F, C);
  for (auto it = ms.rbegin(); it != ms.rend(); ++it) {
    const double inv = 1.0 / static_cast<double>(*it);
    harmonic += inv;
    s += sequence_value(a, *it) * inv;
  }
  return {euler * s, std::max(0.0, 1.0 - euler * harmonic)};
}

struct TrendRow {
  double parameter = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

struct DensityResult {
  double value = 0.0;
  std::vector<TrendRow> trend;
  bool non_increasing = true;
};

/// smooth_harmonic_sum for an indicator sequence, with the trend over n = 3 .. n_primes.
inline DensityResult density_sum(const SequenceSpec& J, std::size_t n_primes, u64 C) {
  if (n_primes < 3) throw std::invalid_argument("density_sum: n_primes must be at least 3");
  DensityResult out;
  for (std::size_t n = 3; n <= n_primes; ++n) {
    const HarmonicSum h = smooth_harmonic_sum(n, J, C);
    out.trend.push_back({static_cast<double>(n), h.value, h.truncation_share});
  }
  out.value = out.trend.back().value;
  for (std::size_t i = 1; i < out.trend.size(); ++i)
    if (out.trend[i].value > out.trend[i - 1].value) out.non_increasing = false;
  return out;
}

/// prod_{p in P_n} (1 - 1/p) * sum_{m in N_{P_n \ B}, m <= C} nu_hat(ell m + k) / m.
inline cplx wiener_sum(const std::function<cplx(i64)>& nu_hat, std::size_t n_primes, const PrimeSet& B, i64 ell, i64 k, u64 C) {
  if (ell == 0) throw std::invalid_argument("wiener_sum: ell must be nonzero");
  const PrimeSet P = PrimeSet::first(n_primes);
  const double euler = 1.0 / partial_zeta(P, 1.0);
  const auto ms = smooth_numbers(P.without(B), C);
  cplx s{};
  for (auto it = ms.rbegin(); it != ms.rend(); ++it)
    s += nu_hat(checked_add(checked_mul(ell, static_cast<i64>(*it)), k)) / static_cast<double>(*it);
  return euler * s;
}

/// Finitely supported Fourier data; zero off the support.
inline cplx wiener_sum(const std::map<i64, cplx>& nu_hat, std::size_t n_primes, const PrimeSet& B, i64 ell, i64 k, u64 C) {
  for (const auto& [m, c] : nu_hat)
    if (std::abs(c) > 1.0 + 1e-12) throw std::invalid_argument("wiener_sum: |nu_hat| must be at most 1");
  return wiener_sum(
      [&](i64 m) {
        auto it = nu_hat.find(m);
        return it == nu_hat.end() ? cplx{} : it->second;
      },
      n_primes, B, ell, k, C);
}

// ---------------------------------------------------------------------------
// delta(u)

struct DeltaEstimate {
  double value = 0.0;
  double s_max = 0.0;
  /// True when s_max was capped by the counting range before the integrand fell below 1e-6.
  bool truncated = false;
  /// int_{s_max}^{inf} rho, a guide to what the cap omits.
  double omitted_dickman_mass = 0.0;
  std::vector<TrendRow> samples;
};

/// int_u^{s_max} Psi(x^s, x) / x^s ds by the trapezoid rule on 64 points. The limsup over x
/// is approximated by this single x, so the result is an estimate.
inline DeltaEstimate delta_estimate(double u, u64 x, double x_pow_cap = 1e12) {
  if (!(u >= 1.0)) throw std::invalid_argument("delta_estimate: u must be at least 1");
  if (x < 2 || x > 1000) throw std::invalid_argument("delta_estimate: x must lie in [2, 1000]");
  const double lx = std::log(static_cast<double>(x));
  auto integrand = [&](double s) {
    const double t = std::exp(s * lx);
    const auto ti = static_cast<u64>(std::floor(t * (1 + 1e-15)));
    return static_cast<double>(psi_count(ti, x)) / t;
  };
  const double s_cap = std::log(std::min(x_pow_cap, static_cast<double>(SmoothCounter::kMaxX))) / lx;
  DeltaEstimate out;
  // Grow s_max in unit steps until the integrand is negligible or the cap is hit.
  double s_max = u + 1.0;
  while (s_max < s_cap && integrand(s_max) >= 1e-6) s_max += 1.0;
  if (s_max >= s_cap) {
    s_max = s_cap;
    out.truncated = integrand(s_max) >= 1e-6;
  }
  out.s_max = s_max;
  if (s_max <= u) return out;
  constexpr int kPoints = 64;
  const double h = (s_max - u) / (kPoints - 1);
  double acc = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double s = u + h * i;
    const double f = integrand(s);
    out.samples.push_back({s, f, 0.0});
    acc += (i == 0 || i == kPoints - 1) ? 0.5 * f : f;
  }
  out.value = acc * h;
  if (s_max < 59.0) {
    const DickmanGrid g = dickman_grid(60.0, 0.01);
    const auto start = static_cast<std::size_t>(std::ceil(s_max / g.step));
    double tail = 0.0;
    for (std::size_t i = start; i + 1 < g.values.size(); ++i) tail += 0.5 * g.step * (g.values[i] + g.values[i + 1]);
    out.omitted_dickman_mass = tail;
  }
  return out;
}

/// Exact value of int_u^inf Psi(x^s, x) / x^s ds through Abel summation:
/// (1/log x) (prod_{p<=x} (1 - 1/p)^-1 - sum_{m <= y, x-smooth} 1/m + Psi(y, x) / y), y = x^u.
/// Enumerates the smooth numbers up to y, so y is limited to 10^8.
inline double delta_at_x_abel(double u, u64 x) {
  if (!(u >= 1.0)) throw std::invalid_argument("delta_at_x_abel: u must be at least 1");
  const double lx = std::log(static_cast<double>(x));
  const double y = std::exp(u * lx);
  if (y > 1e8) throw std::invalid_argument("delta_at_x_abel: x^u above 10^8");
  const PrimeSet F = PrimeSet::up_to(x);
  const auto yi = static_cast<u64>(std::floor(y * (1 + 1e-15)));
  const auto ms = smooth_numbers(F, yi);
  double partial = 0.0;
  for (auto it = ms.rbegin(); it != ms.rend(); ++it) partial += 1.0 / static_cast<double>(*it);
  return (partial_zeta(F, 1.0) - partial + static_cast<double>(ms.size()) / y) / lx;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_trend_csv(std::ostream& os, const std::vector<TrendRow>& rows) {
  os << "parameter,value,bound\n";
  os.precision(17);
  for (const auto& r : rows) os << r.parameter << ',' << r.value << ',' << r.bound << '\n';
}

}  // namespace affkms
