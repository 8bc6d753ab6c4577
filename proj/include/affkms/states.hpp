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

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <json.hpp>

#include "affkms/algebra.hpp"
#include "affkms/arith.hpp"
#include "affkms/measures.hpp"
#include "affkms/root_of_unity.hpp"

namespace affkms {

/// V_a R_x V_b^* in the Q/Z system.
struct QZMonomial {
  u64 a = 1;
  RootOfUnity x;
  u64 b = 1;
  friend bool operator==(const QZMonomial&, const QZMonomial&) = default;
};

/// Shared, immutable residue power sums keyed by (beta, modulus, truncation).
inline std::shared_ptr<const ResiduePowerSums> cached_residue_sums(double beta, u64 modulus, u64 C) {
  static std::mutex mu;
  static std::map<std::tuple<double, u64, u64>, std::shared_ptr<const ResiduePowerSums>> cache;
  const auto key = std::make_tuple(beta, modulus, C);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const ResiduePowerSums>(residue_power_sums(beta, modulus, C));
  std::lock_guard lock(mu);
  return cache.try_emplace(key, std::move(built)).first->second;
}

namespace spec {

/// psi_{beta,n}.
struct FiniteN {
  u64 n = 1;
  double beta = 1.0;
};
/// psi_{beta,infinity}, the state of Lebesgue measure.
struct LebesgueInf {
  double beta = 1.0;
};
/// psi_{beta,nu} for a subconformal measure nu.
struct FromMeasure {
  AtomicMeasure nu;
  double beta = 1.0;
};
/// phi_{eta,beta} for beta > 1, summed over c <= truncation.
struct LowTemp {
  AtomicMeasure eta;
  double beta = 2.0;
  u64 truncation = 100000;
  std::shared_ptr<const ResiduePowerSums> sums;
};
/// The beta <= 1 extremal state of the Z/n quotient labelled by m | n.
struct Quotient {
  u64 n = 1;
  u64 m = 1;
  double beta = 1.0;
};
/// The beta > 1 extremal state of the Z/n quotient labelled by a root z with ord z | n.
struct QuotientChar {
  u64 n = 1;
  RootOfUnity z;
  double beta = 2.0;
  u64 truncation = 100000;
  std::shared_ptr<const ResiduePowerSums> sums;
};
/// The beta <= 1 state of the Q/Z system for H = (1/m)Z/Z, at level N.
struct QZSubgroup {
  u64 N = 1;
  u64 m = 1;
  double beta = 1.0;
};
/// The beta > 1 state of the Q/Z system for the character chi with chi(1/N) = chi_root.
struct QZChar {
  u64 N = 1;
  RootOfUnity chi;
  double beta = 2.0;
  u64 truncation = 100000;
  std::shared_ptr<const ResiduePowerSums> sums;
};

}  // namespace spec

using StateSpec = std::variant<spec::FiniteN, spec::LebesgueInf, spec::FromMeasure, spec::LowTemp, spec::Quotient,
                               spec::QuotientChar, spec::QZSubgroup, spec::QZChar>;

namespace detail {

inline void require_beta(double beta, double lo, bool lo_open, double hi, const char* what) {
  const bool ok = std::isfinite(beta) && (lo_open ? beta > lo : beta >= lo) && beta <= hi;
  if (!ok) throw std::invalid_argument(std::string(what) + ": beta out of range");
}

}  // namespace detail

inline StateSpec make_finite(u64 n, double beta) {
  if (n == 0) throw std::invalid_argument("FiniteN: n must be positive");
  detail::require_beta(beta, 0.0, false, 1e300, "FiniteN");
  return spec::FiniteN{n, beta};
}

inline StateSpec make_lebesgue(double beta) {
  detail::require_beta(beta, 0.0, false, 1e300, "LebesgueInf");
  return spec::LebesgueInf{beta};
}

inline StateSpec make_from_measure(AtomicMeasure nu, double beta) {
  detail::require_beta(beta, 0.0, false, 1e300, "FromMeasure");
  if (!nu.nonnegative()) throw std::invalid_argument("FromMeasure: measure has negative weights");
  return spec::FromMeasure{std::move(nu), beta};
}

inline StateSpec make_low_temp(AtomicMeasure eta, double beta, u64 C) {
  detail::require_beta(beta, 1.0, true, 1e300, "LowTemp");
  if (C == 0) throw std::invalid_argument("LowTemp: truncation must be positive");
  auto sums = cached_residue_sums(beta, eta.level(), C);
  return spec::LowTemp{std::move(eta), beta, C, std::move(sums)};
}

inline StateSpec make_quotient(u64 n, u64 m, double beta) {
  if (n == 0 || m == 0 || n % m != 0) throw std::invalid_argument("Quotient: m must divide n");
  detail::require_beta(beta, 0.0, false, 1.0, "Quotient");
  return spec::Quotient{n, m, beta};
}

inline StateSpec make_quotient_char(u64 n, RootOfUnity z, double beta, u64 C) {
  if (n == 0 || n % z.order() != 0) throw std::invalid_argument("QuotientChar: order of z must divide n");
  detail::require_beta(beta, 1.0, true, 1e300, "QuotientChar");
  if (C == 0) throw std::invalid_argument("QuotientChar: truncation must be positive");
  return spec::QuotientChar{n, z, beta, C, cached_residue_sums(beta, z.order(), C)};
}

inline StateSpec make_qz_subgroup(u64 N, u64 m, double beta) {
  if (N == 0 || m == 0 || N % m != 0) throw std::invalid_argument("QZSubgroup: m must divide N");
  detail::require_beta(beta, 0.0, false, 1.0, "QZSubgroup");
  return spec::QZSubgroup{N, m, beta};
}

inline StateSpec make_qz_char(u64 N, RootOfUnity chi, double beta, u64 C) {
  if (N == 0 || N % chi.order() != 0) throw std::invalid_argument("QZChar: order of chi must divide N");
  detail::require_beta(beta, 1.0, true, 1e300, "QZChar");
  if (C == 0) throw std::invalid_argument("QZChar: truncation must be positive");
  return spec::QZChar{N, chi, beta, C, cached_residue_sums(beta, chi.order(), C)};
}

inline double beta_of(const StateSpec& s) {
  return std::visit([](const auto& v) { return v.beta; }, s);
}

/// True for the states of the N x Z system (as opposed to its quotients and the Q/Z system).
inline bool is_affine_family(const StateSpec& s) {
  return std::holds_alternative<spec::FiniteN>(s) || std::holds_alternative<spec::LebesgueInf>(s) ||
         std::holds_alternative<spec::FromMeasure>(s) || std::holds_alternative<spec::LowTemp>(s);
}

/// m^-beta sum_{d|m} mu(d) phi_beta(d)/phi(d).
inline double finite_profile(u64 m, double beta) {
  double s = 0.0;
  for (auto [d, mu] : squarefree_divisors(m)) s += mu * totient_beta(d, beta) / static_cast<double>(totient(d));
  return std::pow(static_cast<double>(m), -beta) * s;
}

/// Order of k in Z/n, i.e. n / gcd(n, k) (with gcd(n, 0) = n).
inline u64 order_mod(i64 k, u64 n) { return n / std::gcd(mod_floor(k, n), n); }

struct StateValue {
  cplx value{};
  std::optional<double> tail_bound;
};

namespace detail {

/// sum_j S_j w^(j) over residues j of the sums' modulus, where w(j) is a phase.
template <class Phase>
cplx residue_series(const ResiduePowerSums& rs, Phase phase) {
  cplx s{};
  for (u64 j = 0; j < rs.modulus; ++j) s += rs.sums[j] * phase(j);
  return s;
}

}  // namespace detail

/// Evaluates a state on V_a U^k V_b^* (or V_a R^k V_b^* for the Z/n quotients).
inline StateValue eval_state(const StateSpec& s, const Monomial& x) {
  return std::visit(
      [&](const auto& v) -> StateValue {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::QZSubgroup> || std::is_same_v<T, spec::QZChar>) {
          throw std::invalid_argument("eval_state: Q/Z states take a Q/Z monomial");
        } else {
          const bool series = std::is_same_v<T, spec::LowTemp> || std::is_same_v<T, spec::QuotientChar>;
          if (x.a != x.b) return {cplx{}, series ? std::optional<double>(0.0) : std::nullopt};
          const double aw = std::pow(static_cast<double>(x.a), -v.beta);
          if constexpr (std::is_same_v<T, spec::FiniteN>) {
            return {aw * finite_profile(order_mod(x.k, v.n), v.beta), std::nullopt};
          } else if constexpr (std::is_same_v<T, spec::LebesgueInf>) {
            return {x.k == 0 ? aw : 0.0, std::nullopt};
          } else if constexpr (std::is_same_v<T, spec::FromMeasure>) {
            return {aw * fourier(v.nu, x.k), std::nullopt};
          } else if constexpr (std::is_same_v<T, spec::LowTemp>) {
            const auto& rs = *v.sums;
            const cplx s = detail::residue_series(rs, [&](u64 j) { return fourier(v.eta, checked_mul(x.k, static_cast<i64>(j))); });
            double abs_mass = 0.0;
            for (const auto& [z, w] : v.eta.atoms()) abs_mass += std::abs(w);
            return {aw * s / rs.zeta, aw * abs_mass * rs.tail / rs.zeta};
          } else if constexpr (std::is_same_v<T, spec::Quotient>) {
            return {aw * finite_profile(order_mod(x.k, v.m), v.beta), std::nullopt};
          } else {
            static_assert(std::is_same_v<T, spec::QuotientChar>);
            const auto& rs = *v.sums;
            const RootOfUnity zk = v.z.pow(x.k);
            const cplx s = detail::residue_series(rs, [&](u64 j) {
              const RootOfUnity w = zk.pow(static_cast<i64>(j));
              return RootOfUnity::unit_phase(w.num(), w.den());
            });
            return {aw * s / rs.zeta, aw * rs.tail / rs.zeta};
          }
        }
      },
      s);
}

/// Evaluates a Q/Z-system state on V_a R_x V_b^*.
inline StateValue eval_state(const StateSpec& s, const QZMonomial& x) {
  return std::visit(
      [&](const auto& v) -> StateValue {
        using T = std::decay_t<decltype(v)>;
        if constexpr (!(std::is_same_v<T, spec::QZSubgroup> || std::is_same_v<T, spec::QZChar>)) {
          throw std::invalid_argument("eval_state: a Q/Z monomial needs a Q/Z state");
        } else {
          if (v.N % x.x.den() != 0) throw std::invalid_argument("eval_state: order of x does not divide the level");
          const bool series = std::is_same_v<T, spec::QZChar>;
          if (x.a != x.b) return {cplx{}, series ? std::optional<double>(0.0) : std::nullopt};
          const double aw = std::pow(static_cast<double>(x.a), -v.beta);
          if constexpr (std::is_same_v<T, spec::QZSubgroup>) {
            const u64 q = x.x.den();
            return {aw * finite_profile(q / std::gcd(q, v.m), v.beta), std::nullopt};
          } else {
            const auto& rs = *v.sums;
            // chi(p/q) = chi(1/N)^(p N / q).
            const RootOfUnity cx = v.chi.pow(static_cast<i64>(x.x.num() * (v.N / x.x.den())));
            const cplx s = detail::residue_series(rs, [&](u64 j) {
              const RootOfUnity w = cx.pow(static_cast<i64>(j));
              return RootOfUnity::unit_phase(w.num(), w.den());
            });
            return {aw * s / rs.zeta, aw * rs.tail / rs.zeta};
          }
        }
      },
      s);
}

/// Linear extension to algebra elements. Tail bounds add up weighted by |coefficient|.
inline StateValue eval_state(const StateSpec& s, const AlgebraElement& x) {
  StateValue out;
  for (const auto& [m, c] : x.terms()) {
    const StateValue v = eval_state(s, m);
    out.value += c * v.value;
    if (v.tail_bound) out.tail_bound = out.tail_bound.value_or(0.0) + std::abs(c) * *v.tail_bound;
  }
  return out;
}

/// |psi(x y) - (a/b)^-beta psi(y x)| for x = (a,k,b).
inline double kms_residual(const StateSpec& s, const Monomial& x, const Monomial& y) {
  if (!is_affine_family(s)) throw std::invalid_argument("kms_residual: state is not on the N x Z Toeplitz algebra");
  const cplx lhs = eval_state(s, mono_mul(x, y)).value;
  const cplx rhs = sigma_ibeta_factor(x, beta_of(s)) * eval_state(s, mono_mul(y, x)).value;
  return std::abs(lhs - rhs);
}

/// kappa_b: V_a -> V_a, U -> U^b.
inline Monomial apply_kappa(u64 b, const Monomial& x) {
  if (b > static_cast<u64>(std::numeric_limits<i64>::max())) throw std::range_error("apply_kappa: b out of range");
  return {x.a, checked_mul(static_cast<i64>(b), x.k), x.b};
}

// ---------------------------------------------------------------------------
// Positivity witnesses

struct WitnessValue {
  /// integral of f against A_{beta,F} nu.
  double value = 0.0;
  /// The same quantity as psi_{beta,nu}(e_F f(U) e_F) through the algebra module.
  cplx algebra_value{};
};

/// Real part of f(theta) = sum_j c_j exp(2 pi i j theta) on a uniform grid.
inline double trig_poly_min(const std::map<i64, cplx>& f, std::size_t grid, double* max_imag = nullptr) {
  double lo = std::numeric_limits<double>::infinity();
  double im = 0.0;
  for (std::size_t t = 0; t < grid; ++t) {
    cplx v{};
    for (const auto& [j, c] : f) {
      const RootOfUnity w(checked_mul(j, static_cast<i64>(t)), grid);
      v += c * RootOfUnity::unit_phase(w.num(), w.den());
    }
    lo = std::min(lo, v.real());
    im = std::max(im, std::abs(v.imag()));
  }
  if (max_imag) *max_imag = im;
  return lo;
}

/// Pairs a non-negative trigonometric polynomial f with A_{beta,F} nu. A value below zero
/// certifies that nu is not beta-subconformal.
inline WitnessValue subconformal_witness_value(const AtomicMeasure& nu, double beta, const PrimeSet& F,
                                               const std::map<i64, cplx>& f_coeffs) {
  double max_imag = 0.0;
  const double fmin = trig_poly_min(f_coeffs, 4096, &max_imag);
  if (fmin < -1e-12 || max_imag > 1e-12)
    throw std::invalid_argument("subconformal_witness_value: f is not real and non-negative on the grid");
  WitnessValue out;
  const AtomicMeasure a = apply_A_F(nu, F, beta);
  cplx v{};
  for (const auto& [j, c] : f_coeffs) v += c * fourier(a, j);
  out.value = v.real();

  AtomicMeasure positive = nu;
  positive.set_signed(false);
  const StateSpec st = make_from_measure(positive, beta);
  AlgebraElement fu;
  for (const auto& [j, c] : f_coeffs) fu.add(Monomial::U(j), c);
  const AlgebraElement eF = projection_eF(F);
  out.algebra_value = eval_state(st, eF * fu * eF).value;
  return out;
}

// ---------------------------------------------------------------------------
// Convergence and consistency probes

struct GapBound {
  double gap = 0.0;
  double bound = 0.0;
};

/// |psi_{beta,n}(x) - psi_{beta,inf}(x)| against a^-beta (n/gcd(n,k))^-beta.
inline GapBound weak_star_gap(double beta, u64 n, const Monomial& x) {
  detail::require_beta(beta, 0.0, false, 1.0, "weak_star_gap");
  const cplx fin = eval_state(make_finite(n, beta), x).value;
  const cplx inf = eval_state(make_lebesgue(beta), x).value;
  GapBound out;
  out.gap = std::abs(fin - inf);
  out.bound = std::pow(static_cast<double>(x.a), -beta) * std::pow(static_cast<double>(order_mod(x.k, n)), -beta);
  return out;
}

struct ReconstructionCheck {
  cplx lhs{};
  cplx rhs{};
  double tail_bound = 0.0;
  std::size_t terms = 0;
};

/// psi(U^k) against sum_{a in N_F, a <= C} (a^-beta / zeta_F) zeta_F psi(e_F U^(ak) e_F).
/// Since |psi(e_F u e_F)| <= psi(e_F) = 1/zeta_F, the omitted terms are bounded by
/// 1 - sum_{a <= C} a^-beta / zeta_F.
inline ReconstructionCheck reconstruct_check(const StateSpec& s, const PrimeSet& F, i64 k, u64 C) {
  if (!(std::holds_alternative<spec::FiniteN>(s) || std::holds_alternative<spec::FromMeasure>(s)))
    throw std::invalid_argument("reconstruct_check: state must be FiniteN or FromMeasure");
  const double beta = beta_of(s);
  if (!(beta > 0)) throw std::invalid_argument("reconstruct_check: beta must be positive");
  const double zf = partial_zeta(F, beta);
  const AlgebraElement eF = projection_eF(F);
  ReconstructionCheck out;
  out.lhs = eval_state(s, Monomial::U(k)).value;
  double weight_sum = 0.0;
  for (u64 a : smooth_numbers(F, C)) {
    const double w = std::pow(static_cast<double>(a), -beta) / zf;
    const AlgebraElement u(Monomial::U(checked_mul(static_cast<i64>(a), k)));
    out.rhs += w * zf * eval_state(s, eF * u * eF).value;
    weight_sum += w;
    ++out.terms;
  }
  out.tail_bound = std::max(0.0, 1.0 - weight_sum);
  return out;
}

struct LimitRow {
  double beta = 0.0;
  double distance = 0.0;
};

struct LimitTable {
  std::vector<LimitRow> rows;
  bool non_increasing = true;
  bool strictly_decreasing = true;
};

/// Total-variation distance of T_beta delta_z from the uniform measure on Z_{ord z}.
inline LimitTable limit_beta1(const RootOfUnity& z, const std::vector<double>& betas) {
  LimitTable out;
  const AtomicMeasure uniform = uniform_roots(z.order());
  for (double b : betas) {
    if (!(b > 1.0)) throw std::invalid_argument("limit_beta1: every beta must exceed 1");
    out.rows.push_back({b, total_variation(t_beta_exact_root(z, b), uniform)});
  }
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].distance > out.rows[i - 1].distance) out.non_increasing = false;
    if (!(out.rows[i].distance < out.rows[i - 1].distance)) out.strictly_decreasing = false;
  }
  return out;
}

struct SuperpositionResult {
  double max_deviation = 0.0;
  double tail_bound = 0.0;
  Monomial worst;
  std::size_t monomials = 0;
};

/// Compares psi_{beta,n} with the average of phi_{delta_xi,beta} over primitive n-th roots xi
/// on monomials (a,k,a), a in {1,2,3}, |k| <= 2n, plus two off-diagonal monomials.
inline SuperpositionResult superposition_check(u64 n, double beta, u64 C) {
  detail::require_beta(beta, 1.0, true, 1e300, "superposition_check");
  std::vector<StateSpec> lows;
  const AtomicMeasure primitive = epsilon(n);
  for (const auto& [xi, w] : primitive.atoms()) lows.push_back(make_low_temp(AtomicMeasure::dirac(xi), beta, C));
  const StateSpec fin = make_finite(n, beta);
  std::vector<Monomial> tests;
  const i64 span = 2 * static_cast<i64>(n);
  for (u64 a = 1; a <= 3; ++a)
    for (i64 k = -span; k <= span; ++k) tests.emplace_back(a, k, a);
  tests.emplace_back(1, 1, 2);
  tests.emplace_back(2, 3, 1);
  SuperpositionResult out;
  for (const auto& x : tests) {
    const cplx f = eval_state(fin, x).value;
    cplx avg{};
    double tail = 0.0;
    for (const auto& st : lows) {
      const StateValue v = eval_state(st, x);
      avg += v.value;
      tail += v.tail_bound.value_or(0.0);
    }
    avg /= static_cast<double>(lows.size());
    tail /= static_cast<double>(lows.size());
    const double dev = std::abs(f - avg);
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.worst = x;
    }
    out.tail_bound = std::max(out.tail_bound, tail);
  }
  out.monomials = tests.size();
  return out;
}

struct Coherence {
  cplx lhs{};
  cplx rhs{};
};

/// V_a R_x V_b^* with x of level n, written as the Z/n monomial V_a R^k V_b^*.
inline Monomial qz_to_level(const QZMonomial& x, u64 n) {
  if (n % x.x.den() != 0) throw std::invalid_argument("qz_to_level: order of x does not divide n");
  return {x.a, static_cast<i64>(x.x.num() * (n / x.x.den())), x.b};
}

/// The level-N state for H = (1/m)Z/Z against the Z/n quotient state for H_n = (1/gcd(m,n))Z/Z,
/// which is the quotient label n / gcd(m, n).
inline Coherence qz_coherence(u64 N, u64 m, double beta, const QZMonomial& x, u64 n) {
  if (N == 0 || n == 0 || N % n != 0) throw std::invalid_argument("qz_coherence: n must divide N");
  if (m == 0 || N % m != 0) throw std::invalid_argument("qz_coherence: m must divide N");
  Coherence out;
  out.lhs = eval_state(make_qz_subgroup(N, m, beta), x).value;
  out.rhs = eval_state(make_quotient(n, n / std::gcd(m, n), beta), qz_to_level(x, n)).value;
  return out;
}

/// The level-N character state against the Z/n quotient state of its restriction.
inline Coherence qz_char_coherence(u64 N, const RootOfUnity& chi, double beta, u64 C, const QZMonomial& x, u64 n) {
  if (N == 0 || n == 0 || N % n != 0) throw std::invalid_argument("qz_char_coherence: n must divide N");
  Coherence out;
  out.lhs = eval_state(make_qz_char(N, chi, beta, C), x).value;
  // The restriction to (1/n)Z/Z sends 1/n to chi(1/N)^(N/n).
  out.rhs = eval_state(make_quotient_char(n, chi.pow(static_cast<i64>(N / n)), beta, C), qz_to_level(x, n)).value;
  return out;
}

struct EFMass {
  double value = 0.0;
  double expected = 0.0;
  /// sum_{a in N_F, a <= C} psi(alpha_a(e_F)) and the Euler-product remainder.
  double alpha_sum = 0.0;
  double alpha_tail = 0.0;
};

inline EFMass e_f_mass(const StateSpec& s, const PrimeSet& F, u64 C = 0) {
  if (!is_affine_family(s)) throw std::invalid_argument("e_f_mass: state is not on the N x Z Toeplitz algebra");
  const double beta = beta_of(s);
  EFMass out;
  const AlgebraElement eF = projection_eF(F);
  out.value = eval_state(s, eF).value.real();
  out.expected = 1.0;
  for (u64 p : F.primes()) out.expected *= 1.0 - std::pow(static_cast<double>(p), -beta);
  if (C > 0) {
    double direct = 0.0;
    for (u64 a : smooth_numbers(F, C)) {
      out.alpha_sum += eval_state(s, alpha_a(a, eF)).value.real();
      direct += std::pow(static_cast<double>(a), -beta);
    }
    out.alpha_tail = std::max(0.0, 1.0 - direct * out.expected);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const StateSpec& s) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::FiniteN>) return {{"kind", "finite"}, {"n", v.n}, {"beta", v.beta}};
        else if constexpr (std::is_same_v<T, spec::LebesgueInf>) return {{"kind", "lebesgue"}, {"beta", v.beta}};
        else if constexpr (std::is_same_v<T, spec::FromMeasure>) return {{"kind", "measure"}, {"beta", v.beta}, {"measure", to_json(v.nu)}};
        else if constexpr (std::is_same_v<T, spec::LowTemp>)
          return {{"kind", "lowtemp"}, {"beta", v.beta}, {"truncation", v.truncation}, {"measure", to_json(v.eta)}};
        else if constexpr (std::is_same_v<T, spec::Quotient>) return {{"kind", "quotient"}, {"n", v.n}, {"m", v.m}, {"beta", v.beta}};
        else if constexpr (std::is_same_v<T, spec::QuotientChar>)
          return {{"kind", "quotient-char"}, {"n", v.n}, {"z", v.z.str()}, {"beta", v.beta}, {"truncation", v.truncation}};
        else if constexpr (std::is_same_v<T, spec::QZSubgroup>) return {{"kind", "qz-subgroup"}, {"N", v.N}, {"m", v.m}, {"beta", v.beta}};
        else return {{"kind", "qz-char"}, {"N", v.N}, {"chi", v.chi.str()}, {"beta", v.beta}, {"truncation", v.truncation}};
      },
      s);
}

}  // namespace affkms
