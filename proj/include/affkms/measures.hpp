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
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "affkms/arith.hpp"
#include "affkms/root_of_unity.hpp"

namespace affkms {

/// Finitely supported real measure on the roots of unity.
class AtomicMeasure {
 public:
  using Atoms = std::map<RootOfUnity, double>;

  AtomicMeasure() = default;
  explicit AtomicMeasure(Atoms atoms, bool is_signed = false, std::optional<double> beta_tag = std::nullopt)
      : atoms_(std::move(atoms)), signed_(is_signed), beta_tag_(beta_tag) {}

  static AtomicMeasure dirac(const RootOfUnity& z, double w = 1.0) { return AtomicMeasure({{z, w}}); }

  const Atoms& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// True for intermediates that may carry negative weights.
  bool is_signed() const { return signed_; }
  void set_signed(bool s) { signed_ = s; }
  const std::optional<double>& beta_tag() const { return beta_tag_; }
  void set_beta_tag(std::optional<double> b) { beta_tag_ = b; }

  void add(const RootOfUnity& z, double w) { atoms_[z] += w; }

  double weight(const RootOfUnity& z) const {
    auto it = atoms_.find(z);
    return it == atoms_.end() ? 0.0 : it->second;
  }

  double mass() const {
    double m = 0.0;
    for (const auto& [z, w] : atoms_) m += w;
    return m;
  }

  double min_weight() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [z, w] : atoms_) m = std::min(m, w);
    return atoms_.empty() ? 0.0 : m;
  }

  bool nonnegative() const { return atoms_.empty() || min_weight() >= 0.0; }

  /// lcm of the atom orders; every atom lies in Z_level.
  u64 level() const {
    u64 l = 1;
    for (const auto& [z, w] : atoms_) l = lcm_checked(l, z.den());
    return l;
  }

  /// Mass of the primitive m-th roots Z_m^*.
  double primitive_mass(u64 m) const {
    double s = 0.0;
    for (const auto& [z, w] : atoms_)
      if (z.den() == m) s += w;
    return s;
  }

  /// Drops atoms with |weight| below threshold.
  AtomicMeasure& cleanup(double threshold = 1e-14) {
    std::erase_if(atoms_, [&](const auto& kv) { return std::abs(kv.second) < threshold; });
    return *this;
  }

 private:
  Atoms atoms_;
  bool signed_ = false;
  std::optional<double> beta_tag_;
};

inline AtomicMeasure scaled(const AtomicMeasure& nu, double s) {
  AtomicMeasure out({}, nu.is_signed() || s < 0, nu.beta_tag());
  for (const auto& [z, w] : nu.atoms()) out.add(z, w * s);
  return out;
}

/// Weighted sum of measures, atom-wise.
inline AtomicMeasure combine(const std::vector<std::pair<double, AtomicMeasure>>& parts) {
  AtomicMeasure out;
  bool sgn = false;
  for (const auto& [c, nu] : parts) {
    sgn = sgn || nu.is_signed() || c < 0;
    for (const auto& [z, w] : nu.atoms()) out.add(z, c * w);
  }
  out.set_signed(sgn);
  return out;
}

/// Pushforward under the d-fold wrap z -> z^d.
inline AtomicMeasure pushforward(const AtomicMeasure& nu, u64 d) {
  if (d == 0) throw std::invalid_argument("pushforward: d must be positive");
  AtomicMeasure out({}, nu.is_signed(), nu.beta_tag());
  for (const auto& [z, w] : nu.atoms()) out.add(z.pow(static_cast<i64>(d)), w);
  return out;
}

/// Uniform probability on the primitive n-th roots.
inline AtomicMeasure epsilon(u64 n) {
  if (n == 0) throw std::invalid_argument("epsilon: n must be positive");
  const double w = 1.0 / static_cast<double>(totient(n));
  AtomicMeasure out;
  for (u64 p = 0; p < n; ++p)
    if (std::gcd(p, n) == 1) out.add(RootOfUnity(static_cast<i64>(p), n), w);
  if (n == 1) out = AtomicMeasure::dirac(RootOfUnity::identity());
  return out;
}

/// Uniform probability on all of Z_n.
inline AtomicMeasure uniform_roots(u64 n) {
  if (n == 0) throw std::invalid_argument("uniform_roots: n must be positive");
  AtomicMeasure out;
  for (u64 p = 0; p < n; ++p) out.add(RootOfUnity(static_cast<i64>(p), n), 1.0 / static_cast<double>(n));
  return out;
}

/// A_{beta,n} nu = sum_{d|n} mu(d) d^-beta (omega_d)_* nu.
inline AtomicMeasure apply_A(const AtomicMeasure& nu, u64 n, double beta) {
  if (beta < 0) throw std::invalid_argument("apply_A: beta must be non-negative");
  AtomicMeasure out({}, true, nu.beta_tag());
  for (auto [d, mu] : squarefree_divisors(n)) {
    const double c = mu * std::pow(static_cast<double>(d), -beta);
    for (const auto& [z, w] : nu.atoms()) out.add(z.pow(static_cast<i64>(d)), c * w);
  }
  return out;
}

/// A_{beta,F} = prod_{p in F} (1 - p^-beta omega_p), applied one prime at a time.
inline AtomicMeasure apply_A_F(const AtomicMeasure& nu, const PrimeSet& F, double beta) {
  AtomicMeasure cur = nu;
  for (u64 p : F.primes()) {
    const double c = std::pow(static_cast<double>(p), -beta);
    AtomicMeasure next = cur;
    for (const auto& [z, w] : cur.atoms()) next.add(z.pow(static_cast<i64>(p)), -c * w);
    cur = std::move(next);
  }
  cur.set_signed(true);
  return cur;
}

/// Solves A_{beta,n} mu = nu for mu supported on Z_K by a dense solve on the K atoms.
/// K defaults to the level of nu and must be a multiple of it.
inline AtomicMeasure apply_A_inv(const AtomicMeasure& nu, u64 n, double beta, std::optional<u64> level = std::nullopt) {
  if (!(beta > 0)) throw std::invalid_argument("apply_A_inv: beta must be positive");
  const u64 K = level.value_or(nu.level());
  if (K == 0 || K % nu.level() != 0) throw std::invalid_argument("apply_A_inv: support does not lie in Z_K");
  if (K > 4096) throw std::invalid_argument("apply_A_inv: level above 4096 not supported by the dense solver");
  const auto dim = static_cast<Eigen::Index>(K);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (auto [d, mu] : squarefree_divisors(n)) {
    const double c = mu * std::pow(static_cast<double>(d), -beta);
    const u64 dm = d % K;
    for (u64 j = 0; j < K; ++j)
      M(static_cast<Eigen::Index>(static_cast<u64>(static_cast<unsigned __int128>(j) * dm % K)), static_cast<Eigen::Index>(j)) += c;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (const auto& [z, w] : nu.atoms()) rhs(static_cast<Eigen::Index>(z.num() * (K / z.den()))) += w;
  const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
  const double residual = (M * x - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-9)) throw std::runtime_error("apply_A_inv: linear solve residual " + std::to_string(residual));
  AtomicMeasure out({}, nu.is_signed(), beta);
  for (u64 j = 0; j < K; ++j)
    if (x(static_cast<Eigen::Index>(j)) != 0.0) out.add(RootOfUnity(static_cast<i64>(j), K), x(static_cast<Eigen::Index>(j)));
  return out;
}


/// The k-th Fourier coefficient sum_z w(z) z^k. Phases are reduced exactly before the
/// trigonometric call.
inline cplx fourier(const AtomicMeasure& nu, i64 k) {
  cplx s{};
  for (const auto& [z, w] : nu.atoms()) {
    const RootOfUnity zk = z.pow(k);
    s += w * RootOfUnity::unit_phase(zk.num(), zk.den());
  }
  return s;
}

/// Keeps the atoms whose order divides k.
inline AtomicMeasure restrict(const AtomicMeasure& nu, u64 k) {
  if (k == 0) throw std::invalid_argument("restrict: k must be positive");
  AtomicMeasure out({}, nu.is_signed(), nu.beta_tag());
  for (const auto& [z, w] : nu.atoms())
    if (k % z.den() == 0) out.add(z, w);
  return out;
}

/// Closed form nu_{beta,n}: weight n^-beta phi_beta(ord z)/phi(ord z) on each z in Z_n.
inline AtomicMeasure extremal_measure(u64 n, double beta) {
  if (n == 0) throw std::invalid_argument("extremal_measure: n must be positive");
  if (beta < 0) throw std::invalid_argument("extremal_measure: beta must be non-negative");
  AtomicMeasure out({}, false, beta);
  const double scale = std::pow(static_cast<double>(n), -beta);
  for (u64 q : divisors(n)) {
    const double w = scale * totient_beta(q, beta) / static_cast<double>(totient(q));
    if (w == 0.0) continue;
    for (u64 p = 0; p < q; ++p)
      if (std::gcd(p, q) == 1) out.add(RootOfUnity(static_cast<i64>(p), q), w);
  }
  return out;
}

/// Largest atom-wise absolute difference over the union of supports.
inline double max_atom_diff(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  double m = 0.0;
  for (const auto& [z, w] : mu.atoms()) m = std::max(m, std::abs(w - nu.weight(z)));
  for (const auto& [z, w] : nu.atoms())
    if (!mu.atoms().contains(z)) m = std::max(m, std::abs(w));
  return m;
}

/// Total variation norm of mu - nu, i.e. sum_z |mu(z) - nu(z)|.
inline double total_variation(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  double s = 0.0;
  for (const auto& [z, w] : mu.atoms()) s += std::abs(w - nu.weight(z));
  for (const auto& [z, w] : nu.atoms())
    if (!mu.atoms().contains(z)) s += std::abs(w);
  return s;
}

// ---------------------------------------------------------------------------
// Subconformality

struct SubconformalVerdict {
  bool passed = true;
  /// Smallest atom weight of A_{beta,F} nu found, and where.
  double min_value = 0.0;
  std::vector<u64> witness_primes;
  RootOfUnity witness_atom;
  std::vector<u64> candidate_primes;
  std::size_t subsets_checked = 0;
};

/// Bounded verifier: checks min atom weight of A_{beta,F} nu >= -tol for every subset F of
/// the primes dividing the support level together with the primes up to extra_prime_bound.
/// A failure is a proof of non-subconformality; a pass certifies only the subsets checked.
inline SubconformalVerdict check_subconformal(const AtomicMeasure& nu, double beta, u64 extra_prime_bound, double tol = 1e-9) {
  if (beta < 0) throw std::invalid_argument("check_subconformal: beta must be non-negative");
  if (!nu.nonnegative()) throw std::invalid_argument("check_subconformal: measure has negative weights");
  const u64 K = nu.level();
  if (K > (u64{1} << 22)) throw std::invalid_argument("check_subconformal: support level too large");

  std::vector<u64> cand = factorize(K).primes();
  for (u64 p : primes_up_to(extra_prime_bound))
    if (K % p != 0) cand.push_back(p);
  std::sort(cand.begin(), cand.end());
  if (cand.size() > 24) throw std::invalid_argument("check_subconformal: more than 24 candidate primes");

  SubconformalVerdict v;
  v.candidate_primes = cand;
  v.min_value = std::numeric_limits<double>::infinity();

  std::vector<double> base(K, 0.0);
  for (const auto& [z, w] : nu.atoms()) base[z.num() * (K / z.den())] += w;

  std::vector<u64> chosen;
  std::function<void(std::size_t, const std::vector<double>&)> visit = [&](std::size_t from, const std::vector<double>& cur) {
    ++v.subsets_checked;
    for (u64 j = 0; j < K; ++j)
      if (cur[j] < v.min_value) {
        v.min_value = cur[j];
        v.witness_primes = chosen;
        v.witness_atom = RootOfUnity(static_cast<i64>(j), K);
      }
    std::vector<double> next(K);
    for (std::size_t i = from; i < cand.size(); ++i) {
      const u64 p = cand[i];
      const double c = std::pow(static_cast<double>(p), -beta);
      next = cur;
      const u64 pm = p % K;
      for (u64 j = 0; j < K; ++j) next[static_cast<u64>(static_cast<unsigned __int128>(j) * pm % K)] -= c * cur[j];
      chosen.push_back(p);
      visit(i + 1, next);
      chosen.pop_back();
    }
  };
  visit(0, base);
  v.passed = v.min_value >= -tol;
  return v;
}

// ---------------------------------------------------------------------------
// Decomposition into extremal measures

struct Decomposition {
  std::map<u64, double> coefficients;
  double min_coefficient = 0.0;
  bool subconformal = true;
  u64 level = 1;
};

/// lambda_n = n^beta sum_{d | K/n} mu(d) nu(Z_{nd}^*) / phi_beta(nd), n over divisors of the
/// support level K. Requires beta in (0, 1].
inline Decomposition decompose(const AtomicMeasure& nu, double beta, double tol = 1e-9) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("decompose: beta must lie in (0, 1]");
  if (!nu.nonnegative()) throw std::invalid_argument("decompose: measure has negative weights");
  Decomposition out;
  out.level = nu.level();
  std::map<u64, double> prim;
  for (const auto& [z, w] : nu.atoms()) prim[z.den()] += w;
  out.min_coefficient = std::numeric_limits<double>::infinity();
  for (u64 n : divisors(out.level)) {
    double acc = 0.0;
    for (auto [d, mu] : squarefree_divisors(out.level / n)) {
      auto it = prim.find(n * d);
      if (it != prim.end()) acc += mu * it->second / totient_beta(n * d, beta);
    }
    const double lambda = std::pow(static_cast<double>(n), beta) * acc;
    out.min_coefficient = std::min(out.min_coefficient, lambda);
    if (std::abs(lambda) > 1e-13) out.coefficients[n] = lambda;
  }
  out.subconformal = out.min_coefficient >= -tol;
  return out;
}

/// sum_n lambda_n nu_{beta,n}.
inline AtomicMeasure recompose(const std::map<u64, double>& coefficients, double beta) {
  AtomicMeasure out({}, false, beta);
  for (const auto& [n, c] : coefficients) {
    const AtomicMeasure ext = extremal_measure(n, beta);
    for (const auto& [z, w] : ext.atoms()) out.add(z, c * w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The operator T_beta = zeta(beta)^-1 sum_c c^-beta (omega_c)_*

struct TBetaResult {
  AtomicMeasure measure;
  /// zeta(beta)^-1 sum_{c > C} c^-beta, bounding the total-variation truncation error per unit mass.
  double tail_mass = 0.0;
};

inline TBetaResult t_beta(const AtomicMeasure& nu, double beta, u64 C) {
  if (!(beta > 1.0)) throw std::domain_error("t_beta: beta must exceed 1");
  if (C == 0) throw std::invalid_argument("t_beta: truncation must be positive");
  std::map<u64, ResiduePowerSums> by_order;
  for (const auto& [z, w] : nu.atoms())
    if (!by_order.contains(z.den())) by_order.emplace(z.den(), residue_power_sums(beta, z.den(), C));
  TBetaResult out;
  out.measure = AtomicMeasure({}, nu.is_signed(), beta);
  const double zeta = riemann_zeta(beta);
  for (const auto& [z, w] : nu.atoms()) {
    const auto& rs = by_order.at(z.den());
    for (u64 j = 0; j < rs.modulus; ++j) out.measure.add(z.pow(static_cast<i64>(j)), w * rs.sums[j] / zeta);
  }
  out.tail_mass = zeta_tail(beta, C) / zeta;
  return out;
}

/// T_beta delta_z = (n^-beta / zeta(beta)) sum_{k=1}^n zeta(beta, k/n) delta_{z^k}, n = ord z.
inline AtomicMeasure t_beta_exact_root(const RootOfUnity& z, double beta) {
  if (!(beta > 1.0)) throw std::domain_error("t_beta_exact_root: beta must exceed 1");
  const u64 n = z.den();
  const double scale = std::pow(static_cast<double>(n), -beta) / riemann_zeta(beta);
  AtomicMeasure out({}, false, beta);
  for (u64 k = 1; k <= n; ++k)
    out.add(z.pow(static_cast<i64>(k)), scale * hurwitz_zeta(beta, static_cast<double>(k) / static_cast<double>(n)));
  return out;
}

// ---------------------------------------------------------------------------
// JSON: {"level": K, "signed": bool, "atoms": [{"num": p, "den": q, "weight": w}]}

inline nlohmann::json to_json(const AtomicMeasure& nu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [z, w] : nu.atoms()) atoms.push_back({{"num", z.num()}, {"den", z.den()}, {"weight", w}});
  nlohmann::json out{{"level", nu.level()}, {"signed", nu.is_signed()}, {"atoms", atoms}};
  if (nu.beta_tag()) out["beta"] = *nu.beta_tag();
  return out;
}

/// Parses the measure schema. Atoms are reduced on read; repeated atoms accumulate.
inline AtomicMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
    throw std::invalid_argument("measure JSON must be an object with an \"atoms\" array");
  AtomicMeasure out({}, j.value("signed", false));
  if (j.contains("beta")) out.set_beta_tag(j.at("beta").get<double>());
  for (const auto& a : j.at("atoms")) {
    const u64 den = a.at("den").get<u64>();
    if (den == 0) throw std::invalid_argument("measure JSON: atom denominator must be positive");
    const double w = a.at("weight").get<double>();
    if (!std::isfinite(w)) throw std::invalid_argument("measure JSON: non-finite weight");
    out.add(RootOfUnity(a.at("num").get<i64>(), den), w);
  }
  if (!out.is_signed() && !out.nonnegative()) throw std::invalid_argument("measure JSON: negative weight in unsigned measure");
  if (j.contains("level")) {
    const u64 declared = j.at("level").get<u64>();
    if (declared == 0 || declared % out.level() != 0)
      throw std::invalid_argument("measure JSON: declared level is not a multiple of the atom orders");
  }
  return out;
}

}  // namespace affkms
