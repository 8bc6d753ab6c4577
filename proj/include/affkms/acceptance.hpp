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

// The end-to-end acceptance suite. Each criterion runs a fixed, seeded experiment and
// reports pass/fail together with the measured quantities. Shared by the acceptance test
// binary and the CLI self-test.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "affkms/affkms.hpp"

namespace affkms::acceptance {

struct Options {
  std::uint64_t seed = 20260101;
  /// Mutation switch: perturbs the weights of nu_{beta,2} fed into the decomposition
  /// criterion. The suite must then report a failure.
  bool corrupt_extremal = false;
};

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline Monomial random_monomial(std::mt19937_64& rng, u64 max_ab, i64 max_k, bool diagonal_bias = true) {
  std::uniform_int_distribution<u64> ab(1, max_ab);
  std::uniform_int_distribution<i64> kk(-max_k, max_k);
  const u64 a = ab(rng);
  const u64 b = (diagonal_bias && rng() % 2 == 0) ? a : ab(rng);
  return {a, kk(rng), b};
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  for (auto& x : w) x /= s;
  return w;
}

/// nu_{beta,2} with its weights shifted, for the mutation run.
inline AtomicMeasure corrupted_nu2(double beta) {
  AtomicMeasure nu = extremal_measure(2, beta);
  nu.add(RootOfUnity(0, 1), 0.05);
  nu.add(RootOfUnity(1, 2), -0.05);
  return nu;
}

}  // namespace detail

inline Result c01_psi2_closed_form(const Options&) {
  Result r{1, "psi_{beta,2} closed form", true, "", 0, 1.0};
  double worst = 0.0;
  for (double beta : {1.0, 0.5}) {
    const StateSpec s = make_finite(2, beta);
    for (u64 a = 1; a <= 20; ++a)
      for (i64 k = -20; k <= 20; ++k) {
        const double aw = std::pow(static_cast<double>(a), -beta);
        const double expected = (k % 2 == 0) ? aw : aw * (std::pow(2.0, 1.0 - beta) - 1.0);
        const cplx got = eval_state(s, Monomial(a, k, a)).value;
        worst = std::max(worst, std::max(std::abs(got.real() - expected), std::abs(got.imag())));
      }
  }
  r.passed = worst <= 1e-12;
  r.detail = "max deviation " + detail::fmt(worst);
  return r;
}

inline Result c02_extremal_oracle(const Options&) {
  Result r{2, "extremal measure = normalized inverse of A on epsilon_n", true, "", 0, 10.0};
  double worst = 0.0;
  for (double beta : {0.3, 0.7, 1.0})
    for (u64 n = 1; n <= 30; ++n) {
      double norm = 1.0;
      for (u64 p : factorize(n).primes()) norm *= 1.0 - std::pow(static_cast<double>(p), -beta);
      const AtomicMeasure route = scaled(apply_A_inv(epsilon(n), n, beta, n), norm);
      worst = std::max(worst, max_atom_diff(extremal_measure(n, beta), route));
    }
  r.passed = worst <= 1e-10;
  r.detail = "max atom deviation " + detail::fmt(worst);
  return r;
}

inline Result c03_decomposition_roundtrip(const Options& opt) {
  Result r{3, "decomposition roundtrip over n | 60", true, "", 0, 30.0};
  std::mt19937_64 rng(opt.seed ^ 0x03);
  const auto ns = divisors(60);
  double worst_coeff = 0.0, worst_atom = 0.0;
  std::string witness;
  for (double beta : {0.3, 1.0}) {
    std::vector<AtomicMeasure> ext;
    for (u64 n : ns) ext.push_back((n == 2 && opt.corrupt_extremal) ? detail::corrupted_nu2(beta) : extremal_measure(n, beta));
    for (int trial = 0; trial < 50; ++trial) {
      const auto w = detail::random_simplex(rng, ns.size());
      std::vector<std::pair<double, AtomicMeasure>> parts;
      for (std::size_t i = 0; i < ns.size(); ++i) parts.emplace_back(w[i], ext[i]);
      AtomicMeasure mix = combine(parts);
      mix.set_signed(false);
      const Decomposition d = decompose(mix, beta);
      for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto it = d.coefficients.find(ns[i]);
        const double got = it == d.coefficients.end() ? 0.0 : it->second;
        const double dev = std::abs(got - w[i]);
        if (dev > worst_coeff) {
          worst_coeff = dev;
          witness = "beta=" + detail::fmt(beta) + " n=" + std::to_string(ns[i]) + " lambda=" + detail::fmt(got) +
                    " expected=" + detail::fmt(w[i]);
        }
      }
      worst_atom = std::max(worst_atom, max_atom_diff(recompose(d.coefficients, beta), mix));
    }
  }
  r.passed = worst_coeff <= 1e-9 && worst_atom <= 1e-9;
  r.detail = "max coefficient error " + detail::fmt(worst_coeff) + ", max atom error " + detail::fmt(worst_atom);
  if (!r.passed) r.detail += "; witness " + witness;
  return r;
}

inline Result c04_kms_identity(const Options& opt) {
  Result r{4, "KMS identity on random monomial pairs", true, "", 0, 5.0};
  std::mt19937_64 rng(opt.seed ^ 0x04);
  std::vector<std::pair<double, AtomicMeasure>> parts;
  const auto w = detail::random_simplex(rng, 6);
  const u64 levels[] = {1, 2, 3, 4, 6, 10};
  for (std::size_t i = 0; i < 6; ++i) parts.emplace_back(w[i], extremal_measure(levels[i], 0.5));
  AtomicMeasure mix = combine(parts);
  mix.set_signed(false);
  const std::vector<std::pair<std::string, StateSpec>> specs = {
      {"FiniteN{6,0.8}", make_finite(6, 0.8)}, {"LebesgueInf{1}", make_lebesgue(1.0)}, {"FromMeasure{mixture,0.5}", make_from_measure(mix, 0.5)}};
  double worst = 0.0;
  for (const auto& [name, s] : specs)
    for (int i = 0; i < 1000; ++i) {
      const Monomial x = detail::random_monomial(rng, 12, 20, false);
      const Monomial y = detail::random_monomial(rng, 12, 20, false);
      worst = std::max(worst, kms_residual(s, x, y));
    }
  const bool sub = check_subconformal(mix, 0.5, 30).passed;
  r.passed = worst <= 1e-10 && sub;
  r.detail = "max residual " + detail::fmt(worst) + (sub ? "" : "; mixture failed the subconformality check");
  return r;
}

inline Result c05_subconformal_detection(const Options&) {
  Result r{5, "subconformality checker and witness", true, "", 0, 20.0};
  bool all_pass = true;
  std::string first_fail;
  for (double beta : {0.3, 1.0})
    for (u64 n = 1; n <= 30; ++n) {
      const auto v = check_subconformal(extremal_measure(n, beta), beta, 30, 1e-9);
      if (!v.passed && all_pass) {
        all_pass = false;
        first_fail = "nu_{" + detail::fmt(beta) + "," + std::to_string(n) + "} min " + detail::fmt(v.min_value);
      }
    }
  const auto bad = check_subconformal(AtomicMeasure::dirac(RootOfUnity(1, 2)), 1.0, 30, 1e-9);
  const bool bad_ok = !bad.passed && std::abs(bad.min_value + 0.5) <= 1e-12 && bad.witness_primes == std::vector<u64>{2} &&
                      bad.witness_atom == RootOfUnity(0, 1);
  const auto wv = subconformal_witness_value(AtomicMeasure::dirac(RootOfUnity(1, 2)), 1.0, PrimeSet{2},
                                             {{0, 1.0}, {1, 0.5}, {-1, 0.5}});
  const bool wit_ok = std::abs(wv.value + 1.0) <= 1e-12 && std::abs(wv.algebra_value - cplx(wv.value)) <= 1e-12;
  r.passed = all_pass && bad_ok && wit_ok;
  r.detail = std::string(all_pass ? "all nu_{beta,n} pass" : "failure: " + first_fail) + "; delta_{1/2} min " + detail::fmt(bad.min_value) +
             " at F={" + (bad.witness_primes.empty() ? std::string() : std::to_string(bad.witness_primes[0])) + "} atom " +
             bad.witness_atom.str() + "; witness value " + detail::fmt(wv.value) + " (algebra " + detail::fmt(wv.algebra_value.real()) + ")";
  return r;
}

inline Result c06_pushforward_lattice(const Options&) {
  Result r{6, "pushforward of extremal measures", true, "", 0, 5.0};
  double worst = 0.0;
  for (double beta : {0.5, 1.0})
    for (u64 n = 1; n <= 30; ++n) {
      const AtomicMeasure nu = extremal_measure(n, beta);
      for (u64 k = 1; k <= 30; ++k)
        worst = std::max(worst, max_atom_diff(pushforward(nu, k), extremal_measure(n / std::gcd(n, k), beta)));
    }
  r.passed = worst <= 1e-12;
  r.detail = "max atom deviation " + detail::fmt(worst);
  return r;
}

inline Result c07_projection_identities(const Options&) {
  Result r{7, "projection identities and e_F mass", true, "", 0, 5.0};
  bool exact = true;
  std::string failure;
  for (u64 a = 1; a <= 60 && exact; ++a)
    for (u64 b : divisors(a)) {
      std::vector<AlgebraElement> fam;
      AlgebraElement sum;
      for (u64 d : divisors(a / b)) {
        fam.push_back(projection_eab(a, b * d));
        sum = sum + fam.back();
      }
      const AlgebraElement vb(Monomial(b, 0, b));
      if (!(sum == vb)) {
        exact = false;
        failure = "sum mismatch at a=" + std::to_string(a) + " b=" + std::to_string(b);
        break;
      }
      for (std::size_t i = 0; i < fam.size() && exact; ++i)
        for (std::size_t j = 0; j < fam.size(); ++j) {
          const AlgebraElement p = fam[i] * fam[j];
          const bool ok = (i == j) ? (p == fam[i]) : p.is_zero();
          if (!ok) {
            exact = false;
            failure = "orthogonality failure at a=" + std::to_string(a) + " b=" + std::to_string(b);
            break;
          }
        }
    }
  double worst = 0.0;
  const std::vector<StateSpec> specs = {make_finite(6, 0.8), make_lebesgue(1.0), make_from_measure(extremal_measure(10, 0.5), 0.5),
                                        make_finite(1, 0.0)};
  const u64 base[] = {2, 3, 5, 7};
  for (const auto& s : specs)
    for (u64 mask = 0; mask < 16; ++mask) {
      std::vector<u64> ps;
      for (int i = 0; i < 4; ++i)
        if (mask >> i & 1) ps.push_back(base[i]);
      const EFMass m = e_f_mass(s, PrimeSet(ps));
      worst = std::max(worst, std::abs(m.value - m.expected));
    }
  r.passed = exact && worst <= 1e-12;
  r.detail = (exact ? std::string("exact identities hold for a <= 60") : failure) + "; max e_F mass deviation " + detail::fmt(worst);
  return r;
}

inline Result c08_t_beta(const Options&) {
  Result r{8, "T_beta consistency", true, "", 0, 30.0};
  const TBetaResult t = t_beta(epsilon(6), 2.0, 100000);
  const double tv = total_variation(t.measure, extremal_measure(6, 2.0));
  const TBetaResult tz = t_beta(AtomicMeasure::dirac(RootOfUnity(1, 4)), 2.0, 1000000);
  const double tv_root = total_variation(t_beta_exact_root(RootOfUnity(1, 4), 2.0), tz.measure);
  r.passed = tv <= t.tail_mass && t.tail_mass < 2e-5 && tv_root <= tz.tail_mass;
  r.detail = "TV " + detail::fmt(tv) + " vs tail " + detail::fmt(t.tail_mass) + "; exact-root TV " + detail::fmt(tv_root) +
             " vs tail " + detail::fmt(tz.tail_mass);
  return r;
}

inline Result c09_limit_trend(const Options&) {
  Result r{9, "beta -> 1+ limit trend", true, "", 0, 5.0};
  std::vector<double> betas;
  for (int j = 1; j <= 6; ++j) betas.push_back(1.0 + std::pow(10.0, -j));
  const LimitTable t = limit_beta1(RootOfUnity(1, 4), betas);
  r.passed = t.strictly_decreasing;
  r.detail = "distances";
  for (const auto& row : t.rows) r.detail += " " + detail::fmt(row.distance);
  return r;
}

inline Result c10_kappa(const Options& opt) {
  Result r{10, "symmetry action kappa_b", true, "", 0, 10.0};
  std::mt19937_64 rng(opt.seed ^ 0x10);
  std::vector<Monomial> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(detail::random_monomial(rng, 10, 40));
  double worst = 0.0;
  for (double beta : {0.7, 1.0})
    for (u64 n = 1; n <= 30; ++n)
      for (u64 b = 0; b <= 30; ++b) {
        const StateSpec lhs = make_finite(n, beta);
        const StateSpec rhs = make_finite(n / std::gcd(n, b), beta);
        for (const auto& x : xs) worst = std::max(worst, std::abs(eval_state(lhs, apply_kappa(b, x)).value - eval_state(rhs, x).value));
      }
  r.passed = worst <= 1e-12;
  r.detail = "max deviation " + detail::fmt(worst) + " (b = 0 included)";
  return r;
}

inline Result c11_qz_coherence(const Options& opt) {
  Result r{11, "quotient / Q/Z coherence", true, "", 0, 10.0};
  std::mt19937_64 rng(opt.seed ^ 0x11);
  double worst = 0.0;
  std::size_t checks = 0;
  for (double beta : {0.6, 1.0})
    for (u64 N = 1; N <= 24; ++N)
      for (u64 m : divisors(N))
        for (u64 n : divisors(N))
          for (int i = 0; i < 20; ++i) {
            std::uniform_int_distribution<u64> p(0, n - 1), ab(1, 6);
            const u64 a = ab(rng);
            const QZMonomial x{a, RootOfUnity(static_cast<i64>(p(rng)), n), rng() % 4 == 0 ? ab(rng) : a};
            const Coherence c = qz_coherence(N, m, beta, x, n);
            worst = std::max(worst, std::abs(c.lhs - c.rhs));
            ++checks;
          }
  r.passed = worst <= 1e-12;
  r.detail = std::to_string(checks) + " checks, max deviation " + detail::fmt(worst);
  return r;
}

inline Result c12_reconstruction(const Options&) {
  Result r{12, "reconstruction formula", true, "", 0, 10.0};
  const StateSpec s = make_finite(4, 0.9);
  bool ok = true;
  for (i64 k : {1, 2, 3}) {
    const ReconstructionCheck c = reconstruct_check(s, PrimeSet{2, 3}, k, 10000);
    const double diff = std::abs(c.lhs - c.rhs);
    ok = ok && diff <= c.tail_bound;
    r.detail += "k=" + std::to_string(k) + ": |diff| " + detail::fmt(diff) + " <= tail " + detail::fmt(c.tail_bound) + "; ";
  }
  r.passed = ok;
  return r;
}

inline Result c13_psi_oracle(const Options&) {
  Result r{13, "Psi(x,y) against enumeration", true, "", 0, 60.0};
  constexpr u64 X = 100000;
  // Largest prime factor of every n <= X.
  std::vector<u64> lpf(X + 1, 1);
  for (u64 p = 2; p <= X; ++p)
    if (lpf[p] == 1)
      for (u64 m = p; m <= X; m += p) lpf[m] = p;
  std::size_t mismatches = 0, checks = 0;
  std::string first;
  SmoothCounter counter;
  for (u64 y : primes_up_to(97)) {
    u64 brute = 0;
    for (u64 x = 1; x <= X; ++x) {
      if (lpf[x] <= y) ++brute;
      const u64 got = counter.count(x, y);
      ++checks;
      if (got != brute && mismatches++ == 0)
        first = "x=" + std::to_string(x) + " y=" + std::to_string(y) + " got " + std::to_string(got) + " expected " + std::to_string(brute);
    }
  }
  r.passed = mismatches == 0;
  r.detail = std::to_string(checks) + " pairs, " + std::to_string(mismatches) + " mismatches" + (first.empty() ? "" : "; first " + first);
  return r;
}

inline Result c14_dickman(const Options&) {
  Result r{14, "Dickman function", true, "", 0, 30.0};
  const double rho2 = dickman(2.0, 0.005);
  const double mass = dickman_mass(20.0, 0.005);
  const double e1 = std::abs(rho2 - (1.0 - std::log(2.0)));
  const double e2 = std::abs(mass - std::exp(kEulerGamma));
  r.passed = e1 <= 1e-6 && e2 <= 1e-3;
  r.detail = "rho(2) error " + detail::fmt(e1) + ", mass " + detail::fmt(mass) + " error " + detail::fmt(e2);
  return r;
}

inline Result c15_mertens(const Options&) {
  Result r{15, "Mertens third theorem trend", true, "", 0, 30.0};
  const MertensResult small = mertens_product(1000);
  const MertensResult big = mertens_product(1000000);
  r.passed = big.rel_dev < 0.1 && big.rel_dev < small.rel_dev;
  r.detail = "rel_dev(1e3) " + detail::fmt(small.rel_dev) + ", rel_dev(1e6) " + detail::fmt(big.rel_dev);
  return r;
}

inline Result c16_vanishing_sums(const Options&) {
  Result r{16, "vanishing-sum trends", true, "", 0, 120.0};
  constexpr u64 C = 10000000;
  const DensityResult primes = density_sum(seq::PrimeIndicator{}, 10, C);
  bool prime_dec = true;
  for (std::size_t i = 1; i < primes.trend.size(); ++i) prime_dec = prime_dec && primes.trend[i].value < primes.trend[i - 1].value;

  const std::map<i64, cplx> cosine = {{-1, 0.5}, {0, 1.0}, {1, 0.5}};
  const PrimeSet B{2};
  bool cos_dec = true;
  double prev = std::numeric_limits<double>::infinity(), last_cos = 0.0, min_contrast = std::numeric_limits<double>::infinity();
  for (std::size_t n = 3; n <= 10; ++n) {
    const double v = std::abs(wiener_sum(cosine, n, B, 1, -9, C));
    cos_dec = cos_dec && v < prev;
    prev = last_cos = v;
    const double c = std::abs(wiener_sum([](i64 m) { return cplx(m % 2 == 0 ? 1.0 : -1.0); }, n, B, 1, -9, C));
    min_contrast = std::min(min_contrast, c);
  }
  r.passed = prime_dec && cos_dec && last_cos < 0.05 && min_contrast > 0.2;
  r.detail = "prime sums " + detail::fmt(primes.trend.front().value) + " -> " + detail::fmt(primes.trend.back().value) +
             (prime_dec ? " decreasing" : " NOT decreasing") + "; 1+cos final " + detail::fmt(last_cos) + (cos_dec ? " decreasing" : " NOT decreasing") +
             "; contrast min " + detail::fmt(min_contrast);
  return r;
}

inline Result c17_weak_star(const Options& opt) {
  Result r{17, "weak-* convergence bound", true, "", 0, 5.0};
  std::mt19937_64 rng(opt.seed ^ 0x17);
  std::uniform_int_distribution<u64> nd(1, 1000);
  std::uniform_real_distribution<double> bd(0.05, 1.0);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const u64 n = nd(rng);
    const double beta = bd(rng);
    const Monomial x = detail::random_monomial(rng, 8, 2000);
    const GapBound g = weak_star_gap(beta, n, x);
    if (g.gap > g.bound * (1 + 1e-12)) ++violations;
  }
  bool gap_non_increasing = true, bound_decreasing = true, half_decreasing = true;
  GapBound prev = weak_star_gap(1.0, 1, Monomial::U(1));
  GapBound prev_half = weak_star_gap(0.5, 1, Monomial::U(1));
  for (int j = 1; j <= 12; ++j) {
    const u64 n = u64{1} << j;
    const GapBound g = weak_star_gap(1.0, n, Monomial::U(1));
    gap_non_increasing = gap_non_increasing && g.gap <= prev.gap;
    bound_decreasing = bound_decreasing && g.bound < prev.bound;
    prev = g;
    const GapBound h = weak_star_gap(0.5, n, Monomial::U(1));
    half_decreasing = half_decreasing && h.gap < prev_half.gap;
    prev_half = h;
  }
  r.passed = violations == 0 && gap_non_increasing && bound_decreasing && half_decreasing;
  r.detail = std::to_string(violations) + " bound violations in 1000 samples; beta=1 gaps non-increasing: " +
             (gap_non_increasing ? "yes" : "no") + ", bounds strictly decreasing: " + (bound_decreasing ? "yes" : "no") +
             "; beta=0.5 gaps strictly decreasing: " + (half_decreasing ? "yes" : "no");
  return r;
}

using Criterion = std::function<Result(const Options&)>;

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      c01_psi2_closed_form, c02_extremal_oracle, c03_decomposition_roundtrip, c04_kms_identity, c05_subconformal_detection,
      c06_pushforward_lattice, c07_projection_identities, c08_t_beta, c09_limit_trend, c10_kappa, c11_qz_coherence,
      c12_reconstruction, c13_psi_oracle, c14_dickman, c15_mertens, c16_vanishing_sums, c17_weak_star};
  return all;
}

/// Runs criterion number id (1-based), timing it; exceeding the runtime limit counts as a failure.
inline Result run(int id, const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = criteria().at(static_cast<std::size_t>(id - 1))(opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.limit_seconds > 0 && r.seconds > r.limit_seconds) {
    r.passed = false;
    r.detail += "; runtime " + detail::fmt(r.seconds) + "s over limit " + detail::fmt(r.limit_seconds) + "s";
  }
  return r;
}

inline std::vector<Result> run_all(const Options& opt = {}) {
  std::vector<Result> out;
  for (int id = 1; id <= static_cast<int>(criteria().size()); ++id) out.push_back(run(id, opt));
  return out;
}

}  // namespace affkms::acceptance
