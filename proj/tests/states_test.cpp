#include <gtest/gtest.h>

#include <random>

#include "affkms/states.hpp"

using namespace affkms;

namespace {

Monomial random_monomial(std::mt19937_64& rng, u64 max_a = 12, i64 max_k = 30) {
  std::uniform_int_distribution<u64> a(1, max_a);
  std::uniform_int_distribution<i64> k(-max_k, max_k);
  const u64 x = a(rng);
  return {x, k(rng), a(rng)};
}

AlgebraElement random_element(std::mt19937_64& rng, int terms) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  AlgebraElement x;
  for (int i = 0; i < terms; ++i) x.add(random_monomial(rng, 6, 8), cplx(c(rng), c(rng)));
  return x;
}

// (1/zeta(beta)) sum_{c <= C} c^-beta exp(2 pi i c t) summed directly in complex arithmetic.
cplx direct_series(double t, double beta, u64 C) {
  cplx s{};
  for (u64 c = C; c >= 1; --c) s += std::pow(static_cast<double>(c), -beta) * std::polar(1.0, 2 * kPi * t * static_cast<double>(c));
  return s / riemann_zeta(beta);
}

double position(const RootOfUnity& z) { return static_cast<double>(z.num()) / static_cast<double>(z.den()); }

double max_component(cplx d) { return std::max(std::abs(d.real()), std::abs(d.imag())); }

}  // namespace

TEST(EvalState, FiniteTwoExamples) {
  for (double beta : {0.4, 1.0, 2.5})
    for (u64 a = 1; a <= 5; ++a)
      for (i64 k = -6; k <= 6; ++k) {
        const double aw = std::pow(static_cast<double>(a), -beta);
        const double expected = k % 2 == 0 ? aw : aw * (std::pow(2.0, 1 - beta) - 1);
        EXPECT_NEAR(eval_state(make_finite(2, beta), Monomial(a, k, a)).value.real(), expected, 1e-14);
      }
  EXPECT_EQ(eval_state(make_finite(2, 1.0), Monomial(3, 1, 3)).value, cplx(0.0, 0.0));
}

TEST(EvalState, LebesgueExamples) {
  EXPECT_EQ(eval_state(make_lebesgue(1.3), Monomial(2, 5, 2)).value, cplx(0.0, 0.0));
  EXPECT_NEAR(eval_state(make_lebesgue(1.3), Monomial(2, 0, 2)).value.real(), std::pow(2.0, -1.3), 1e-15);
}

TEST(EvalState, BetaZeroStates) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Monomial x = random_monomial(rng);
    const double d_ab = x.a == x.b ? 1.0 : 0.0;
    EXPECT_EQ(eval_state(make_finite(1, 0.0), x).value.real(), d_ab);
    EXPECT_EQ(eval_state(make_lebesgue(0.0), x).value.real(), x.k == 0 ? d_ab : 0.0);
  }
}

TEST(EvalState, FiniteMatchesMeasurePath) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<u64> pick_n(1, 30);
  std::uniform_real_distribution<double> pick_beta(0.05, 3.0);
  for (int i = 0; i < 500; ++i) {
    const u64 n = pick_n(rng);
    const double beta = pick_beta(rng);
    const Monomial x = random_monomial(rng, 15, 100);
    const cplx a = eval_state(make_finite(n, beta), x).value;
    const cplx b = eval_state(make_from_measure(extremal_measure(n, beta), beta), x).value;
    ASSERT_LE(max_component(a - b), 1e-10) << n << " " << beta;
  }
}

TEST(EvalState, MismatchedKinds) {
  EXPECT_THROW(eval_state(make_qz_subgroup(6, 2, 0.5), Monomial(1, 1, 1)), std::invalid_argument);
  EXPECT_THROW(eval_state(make_finite(6, 0.5), QZMonomial{1, RootOfUnity(1, 2), 1}), std::invalid_argument);
  EXPECT_THROW(eval_state(make_qz_subgroup(6, 2, 0.5), QZMonomial{1, RootOfUnity(1, 4), 1}), std::invalid_argument);
  EXPECT_THROW(make_quotient(6, 2, 1.5), std::invalid_argument);
  EXPECT_THROW(make_low_temp(epsilon(2), 1.0, 10), std::invalid_argument);
  EXPECT_THROW(make_from_measure(AtomicMeasure({{RootOfUnity(1, 2), -1.0}}, true), 1.0), std::invalid_argument);
}

TEST(EvalState, LowTempAgainstDirectSeries) {
  const u64 C = 20000;
  for (double beta : {1.5, 2.0, 3.0})
    for (const RootOfUnity& z : {RootOfUnity(1, 4), RootOfUnity(2, 5), RootOfUnity(5, 12)}) {
      const StateSpec st = make_low_temp(AtomicMeasure::dirac(z), beta, C);
      for (i64 k = -7; k <= 7; ++k)
        for (u64 a : {1, 3}) {
          const StateValue v = eval_state(st, Monomial(a, k, a));
          const cplx expected = std::pow(static_cast<double>(a), -beta) * direct_series(position(z) * k, beta, C);
          ASSERT_LE(max_component(v.value - expected), 1e-11);
          ASSERT_TRUE(v.tail_bound.has_value());
          ASSERT_LE(*v.tail_bound, std::pow(static_cast<double>(a), -beta) * zeta_tail(beta, C) / riemann_zeta(beta) + 1e-15);
        }
    }
}

TEST(EvalState, QuotientCharAgainstDirectSeries) {
  const u64 C = 20000;
  const StateSpec st = make_quotient_char(12, RootOfUnity(1, 6), 2.0, C);
  for (i64 k = 0; k < 12; ++k) {
    const cplx expected = direct_series(k / 6.0, 2.0, C);
    EXPECT_LE(max_component(eval_state(st, Monomial(1, k, 1)).value - expected), 1e-11);
  }
  // The identity character gives the truncated zeta ratio.
  const StateValue one = eval_state(make_quotient_char(5, RootOfUnity::identity(), 2.0, C), Monomial(2, 3, 2));
  EXPECT_NEAR(one.value.real() + *one.tail_bound, 0.25, 1e-12);
}

TEST(EvalState, LinearExtension) {
  std::mt19937_64 rng(3);
  const StateSpec st = make_finite(6, 0.8);
  for (int i = 0; i < 50; ++i) {
    const AlgebraElement x = random_element(rng, 5);
    cplx manual{};
    for (const auto& [m, c] : x.terms()) manual += c * eval_state(st, m).value;
    EXPECT_LE(max_component(eval_state(st, x).value - manual), 1e-14);
  }
}

TEST(Gauge, OffDiagonalVanishes) {
  AtomicMeasure mix = combine({{0.5, extremal_measure(4, 0.6)}, {0.5, epsilon(3)}});
  mix.set_signed(false);
  const std::vector<StateSpec> affine{make_finite(6, 0.8), make_lebesgue(0.8), make_from_measure(mix, 0.6),
                                      make_low_temp(epsilon(5), 2.0, 1000), make_quotient(6, 3, 0.5),
                                      make_quotient_char(6, RootOfUnity(1, 3), 2.0, 1000)};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    Monomial x = random_monomial(rng);
    if (x.a == x.b) x.b = x.a + 1;
    for (const auto& st : affine) ASSERT_EQ(eval_state(st, x).value, cplx(0.0, 0.0));
    const QZMonomial q{x.a, RootOfUnity(static_cast<i64>(rng() % 12), 12), x.b};
    ASSERT_EQ(eval_state(make_qz_subgroup(12, 4, 0.7), q).value, cplx(0.0, 0.0));
    ASSERT_EQ(eval_state(make_qz_char(12, RootOfUnity(1, 12), 2.0, 1000), q).value, cplx(0.0, 0.0));
  }
}

TEST(Kms, ResidualVanishes) {
  AtomicMeasure mix = combine({{0.3, extremal_measure(2, 0.9)}, {0.7, extremal_measure(9, 0.9)}});
  mix.set_signed(false);
  const std::vector<StateSpec> specs{make_finite(6, 0.8), make_finite(10, 2.2), make_lebesgue(1.0),
                                     make_from_measure(mix, 0.9), make_low_temp(epsilon(4), 2.0, 5000)};
  std::mt19937_64 rng(5);
  for (const auto& st : specs)
    for (int i = 0; i < 1000; ++i) ASSERT_LE(kms_residual(st, random_monomial(rng), random_monomial(rng)), 1e-10);
  EXPECT_EQ(kms_residual(make_finite(3, 0.5), Monomial::identity(), Monomial::identity()), 0.0);
  EXPECT_EQ(kms_residual(make_lebesgue(1.0), Monomial(2, 1, 3), Monomial(3, 2, 5)), 0.0);
  EXPECT_THROW(kms_residual(make_quotient(4, 2, 0.5), Monomial::identity(), Monomial::identity()), std::invalid_argument);
}

TEST(Positivity, SquaresAreNonNegative) {
  AtomicMeasure mix = combine({{0.25, extremal_measure(3, 0.7)}, {0.75, extremal_measure(8, 0.7)}});
  mix.set_signed(false);
  const std::vector<StateSpec> specs{make_finite(6, 0.7), make_lebesgue(0.7), make_from_measure(mix, 0.7),
                                     make_low_temp(AtomicMeasure::dirac(RootOfUnity(1, 5)), 1.7, 5000)};
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> terms(1, 5);
  for (const auto& st : specs)
    for (int i = 0; i < 100; ++i) {
      const AlgebraElement x = random_element(rng, terms(rng));
      const cplx v = eval_state(st, elem_adjoint(x) * x).value;
      ASSERT_GE(v.real(), -1e-9);
      ASSERT_LE(std::abs(v.imag()), 1e-9);
    }
}

TEST(Kappa, SemigroupAndSymmetry) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Monomial x = random_monomial(rng);
    EXPECT_EQ(apply_kappa(1, x), x);
    EXPECT_EQ(apply_kappa(2, apply_kappa(3, x)), apply_kappa(6, x));
    EXPECT_NEAR(std::abs(eval_state(make_finite(6, 0.9), apply_kappa(4, x)).value - eval_state(make_finite(3, 0.9), x).value), 0.0, 1e-14);
  }
  for (u64 n = 1; n <= 30; ++n)
    for (u64 b = 0; b <= 30; ++b) {
      const u64 target = b == 0 ? 1 : n / std::gcd(n, b);
      for (i64 k = -5; k <= 5; ++k) {
        const Monomial x(2, k, 2);
        ASSERT_NEAR(eval_state(make_finite(n, 0.6), apply_kappa(b, x)).value.real(), eval_state(make_finite(target, 0.6), x).value.real(), 1e-14);
      }
    }
  EXPECT_THROW(apply_kappa(u64{1} << 40, Monomial(1, i64{1} << 40, 1)), std::range_error);
}

TEST(Witness, HalfPoint) {
  const std::map<i64, cplx> one_plus_cos{{-1, 0.5}, {0, 1.0}, {1, 0.5}};
  const WitnessValue w = subconformal_witness_value(AtomicMeasure::dirac(RootOfUnity(1, 2)), 1.0, PrimeSet{2}, one_plus_cos);
  EXPECT_NEAR(w.value, -1.0, 1e-12);
  EXPECT_NEAR(w.algebra_value.real(), -1.0, 1e-12);
  EXPECT_NEAR(w.algebra_value.imag(), 0.0, 1e-12);
}

TEST(Witness, ExtremalNonNegative) {
  const std::map<i64, cplx> f{{-2, 0.25}, {-1, 0.5}, {0, 1.0}, {1, 0.5}, {2, 0.25}};
  for (double beta : {0.3, 1.0}) {
    const AtomicMeasure nu = extremal_measure(6, beta);
    for (u64 mask = 0; mask < 8; ++mask) {
      std::vector<u64> ps;
      for (int i = 0; i < 3; ++i)
        if (mask >> i & 1) ps.push_back(std::array<u64, 3>{2, 3, 5}[i]);
      const PrimeSet F(ps);
      const WitnessValue w = subconformal_witness_value(nu, beta, F, f);
      EXPECT_GE(w.value, -1e-10);
      EXPECT_NEAR(w.value, w.algebra_value.real(), 1e-12);
    }
  }
}

TEST(Witness, ConstantFunction) {
  const AtomicMeasure nu = extremal_measure(10, 0.8);
  const PrimeSet F{2, 7};
  double expected = 0.0;
  for (auto [d, mu] : squarefree_divisors(14)) expected += mu * std::pow(static_cast<double>(d), -0.8);
  EXPECT_NEAR(subconformal_witness_value(nu, 0.8, F, {{0, 1.0}}).value, expected * nu.mass(), 1e-12);
  EXPECT_THROW(subconformal_witness_value(nu, 0.8, F, {{0, 0.2}, {1, 1.0}}), std::invalid_argument);
}

TEST(WeakStar, GapWithinBound) {
  const GapBound g = weak_star_gap(1.0, 997, Monomial(1, 1, 1));
  EXPECT_LT(g.gap, 0.002);
  EXPECT_LE(g.gap, g.bound + 1e-15);
  EXPECT_EQ(weak_star_gap(0.7, 12, Monomial(3, 0, 3)).gap, 0.0);
  double prev = 1e9;
  for (int j = 1; j <= 20; ++j) {
    const GapBound gj = weak_star_gap(0.6, u64{1} << j, Monomial(2, 3, 2));
    EXPECT_LE(gj.gap, gj.bound + 1e-15);
    EXPECT_LT(gj.bound, prev);
    prev = gj.bound;
  }
}

TEST(Reconstruct, WithinTail) {
  const ReconstructionCheck r0 = reconstruct_check(make_finite(4, 0.9), PrimeSet{2, 3}, 0, 10000);
  EXPECT_NEAR(r0.lhs.real(), 1.0, 1e-15);
  for (i64 k = -5; k <= 5; ++k) {
    const ReconstructionCheck r = reconstruct_check(make_finite(4, 0.9), PrimeSet{2, 3}, k, 10000);
    EXPECT_LE(std::abs(r.lhs - r.rhs), r.tail_bound + 1e-12) << k;
  }
  AtomicMeasure mix = combine({{0.4, epsilon(3)}, {0.6, extremal_measure(5, 0.5)}});
  mix.set_signed(false);
  for (i64 k = 0; k <= 6; ++k) {
    const ReconstructionCheck r = reconstruct_check(make_from_measure(mix, 1.2), PrimeSet{2, 5}, k, 100000);
    EXPECT_LE(std::abs(r.lhs - r.rhs), r.tail_bound + 1e-12) << k;
  }
  EXPECT_THROW(reconstruct_check(make_lebesgue(1.0), PrimeSet{2}, 1, 10), std::invalid_argument);
}

TEST(LimitAtOne, MonotoneDistances) {
  std::vector<double> betas;
  for (int j = 1; j <= 6; ++j) betas.push_back(1 + std::pow(10.0, -j));
  const LimitTable t = limit_beta1(RootOfUnity(1, 4), betas);
  EXPECT_TRUE(t.non_increasing);
  EXPECT_TRUE(t.strictly_decreasing);
  const LimitTable z = limit_beta1(RootOfUnity::identity(), betas);
  for (const auto& row : z.rows) EXPECT_LE(row.distance, 1e-15);
  EXPECT_THROW(limit_beta1(RootOfUnity(1, 4), {1.0}), std::invalid_argument);
}

TEST(Superposition, WithinTail) {
  for (auto [n, beta, C] : {std::tuple<u64, double, u64>{1, 2.0, 100000}, {4, 2.0, 100000}, {6, 1.5, 1000000}}) {
    const SuperpositionResult r = superposition_check(n, beta, C);
    EXPECT_LE(r.max_deviation, r.tail_bound + 1e-12) << n;
    EXPECT_EQ(r.monomials, 3 * (4 * n + 1) + 2);
  }
}

TEST(QZ, OrderFormulaAndFullSubgroup) {
  // m = N: every x lies in H.
  for (u64 a = 1; a <= 4; ++a)
    for (i64 p = 0; p < 12; ++p)
      EXPECT_NEAR(eval_state(make_qz_subgroup(12, 12, 0.4), QZMonomial{a, RootOfUnity(p, 12), a}).value.real(), std::pow(double(a), -0.4), 1e-15);
  // m = 1: the finite state at the order of x.
  for (i64 p = 0; p < 30; ++p) {
    const RootOfUnity x(p, 30);
    const double lhs = eval_state(make_qz_subgroup(30, 1, 0.8), QZMonomial{2, x, 2}).value.real();
    const double rhs = eval_state(make_finite(x.den(), 0.8), Monomial(2, static_cast<i64>(x.num()), 2)).value.real();
    EXPECT_NEAR(lhs, rhs, 1e-14);
  }
}

TEST(QZ, CoherenceRandomTriples) {
  std::mt19937_64 rng(8);
  int done = 0;
  while (done < 300) {
    const u64 N = 1 + rng() % 120;
    const auto dn = divisors(N);
    const u64 m = dn[rng() % dn.size()];
    const u64 n = dn[rng() % dn.size()];
    const QZMonomial x{1 + rng() % 5, RootOfUnity(static_cast<i64>(rng() % n), n), 0};
    QZMonomial y = x;
    y.b = rng() % 4 == 0 ? x.a + 1 : x.a;
    const double beta = 0.1 + (rng() % 90) / 100.0;
    const Coherence c = qz_coherence(N, m, beta, y, n);
    ASSERT_LE(max_component(c.lhs - c.rhs), 1e-12) << N << " " << m << " " << n;
    // Independent route: ord(x + H) = q / gcd(q, m).
    const u64 q = y.x.den();
    const double expected = y.a == y.b ? std::pow(double(y.a), -beta) * finite_profile(q / std::gcd(q, m), beta) : 0.0;
    ASSERT_NEAR(c.lhs.real(), expected, 1e-14);
    ++done;
  }
  EXPECT_THROW(qz_coherence(12, 5, 0.5, QZMonomial{1, RootOfUnity(1, 2), 1}, 6), std::invalid_argument);
  EXPECT_THROW(qz_coherence(12, 4, 0.5, QZMonomial{1, RootOfUnity(1, 2), 1}, 5), std::invalid_argument);
}

TEST(QZ, CharacterCoherence) {
  const u64 N = 24, C = 50000;
  for (i64 c : {1, 5, 6, 8, 12}) {
    const RootOfUnity chi(c, N);
    for (u64 n : divisors(N))
      for (i64 p = 0; p < static_cast<i64>(n); ++p) {
        const Coherence co = qz_char_coherence(N, chi, 2.0, C, QZMonomial{3, RootOfUnity(p, n), 3}, n);
        ASSERT_LE(max_component(co.lhs - co.rhs), 1e-12);
        // chi(p/n) = chi(1/N)^(pN/n) as a point on the circle.
        const double t = position(chi) * static_cast<double>(p * static_cast<i64>(N / n));
        ASSERT_LE(max_component(co.lhs - std::pow(3.0, -2.0) * direct_series(t, 2.0, C)), 1e-11);
      }
  }
}

TEST(EFMassTest, ProductAndAlphaSum) {
  AtomicMeasure mix = combine({{0.5, epsilon(7)}, {0.5, extremal_measure(6, 1.0)}});
  mix.set_signed(false);
  const std::vector<StateSpec> specs{make_finite(6, 0.8), make_lebesgue(1.1), make_from_measure(mix, 1.0),
                                     make_low_temp(epsilon(3), 2.0, 100000)};
  for (const auto& st : specs)
    for (const PrimeSet& F : {PrimeSet{2}, PrimeSet{2, 3}, PrimeSet{3, 5, 7}}) {
      const EFMass m = e_f_mass(st, F, 5000);
      const StateValue raw = eval_state(st, projection_eF(F));
      const double tail = raw.tail_bound.value_or(0.0);
      EXPECT_NEAR(m.value, 1.0 / partial_zeta(F, beta_of(st)), 1e-12 + tail);
      EXPECT_NEAR(m.value, m.expected, 1e-12 + tail);
      EXPECT_LE(m.alpha_sum, 1.0 + 1e-12);
      EXPECT_GE(m.alpha_sum, 1.0 - m.alpha_tail - 1e-12 - 10 * tail);
    }
}

TEST(Json, StateSpecs) {
  EXPECT_EQ(to_json(make_finite(6, 0.5)).dump(), R"({"beta":0.5,"kind":"finite","n":6})");
  EXPECT_EQ(to_json(make_qz_char(12, RootOfUnity(1, 4), 2.0, 10))["chi"], "1/4");
}
