// Command-line front end for the affkms library.
//
// Exit codes: 0 success, 1 usage or input error, 2 property violation (a witness is printed).

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "affkms/acceptance.hpp"
#include "affkms/affkms.hpp"

using namespace affkms;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  double beta = 1.0;
  u64 n = 1;
  u64 level = 0;
  u64 subgroup = 1;
  u64 truncation = 100000;
  double tol = 1e-10;
  u64 prime_bound = 30;
  u64 seed = 20260101;
  unsigned jobs = 1;
  std::string format = "json";
  std::string output;
  std::string state;
  std::string monomial;
  std::string measure;
};

// ---------------------------------------------------------------------------
// Parsing helpers

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

i64 parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid integer for " + what + ": '" + s + "'");
  }
}

u64 parse_pos(const std::string& s, const std::string& what) {
  const i64 v = parse_int(s, what);
  if (v <= 0) throw UsageError(what + " must be positive");
  return static_cast<u64>(v);
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(trim(s), &pos);
    if (pos != trim(s).size() || !std::isfinite(v)) throw std::invalid_argument("bad");
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + what + ": '" + s + "'");
  }
}

RootOfUnity parse_root(const std::string& s) {
  const auto parts = split(s, '/');
  if (parts.size() != 2) throw UsageError("expected a root of unity as p/q, got '" + s + "'");
  return RootOfUnity(parse_int(parts[0], "root numerator"), parse_pos(parts[1], "root denominator"));
}

bool is_qz_monomial(const std::string& s) { return s.find('/') != std::string::npos; }

Monomial parse_monomial(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw UsageError("expected a monomial as a,k,b, got '" + s + "'");
  return Monomial(parse_pos(parts[0], "a"), parse_int(parts[1], "k"), parse_pos(parts[2], "b"));
}

QZMonomial parse_qz_monomial(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw UsageError("expected a Q/Z monomial as a,p/q,b, got '" + s + "'");
  return {parse_pos(parts[0], "a"), parse_root(parts[1]), parse_pos(parts[2], "b")};
}

PrimeSet parse_primes(const std::string& s) {
  std::vector<u64> ps;
  if (trim(s).empty()) return PrimeSet{};
  for (const auto& p : split(s, ',')) ps.push_back(parse_pos(p, "prime"));
  try {
    return PrimeSet(ps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json read_json_file(const std::string& path) {
  if (path.empty()) throw UsageError("no measure file given (use --measure)");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open measure file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw UsageError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

AtomicMeasure load_measure(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return measure_from_json(j);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// "kind:key=value,key=value". Keys not given fall back to the global flags.
StateSpec parse_state(const std::string& text, const Config& cfg) {
  if (text.empty()) throw UsageError("no state given (use --state kind:key=value,...)");
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos)
    for (const auto& item : split(text.substr(colon + 1), ',')) {
      if (trim(item).empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("state parameter '" + item + "' is not key=value");
      kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
  std::set<std::string> used;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    used.insert(k);
    auto it = kv.find(k);
    return it == kv.end() ? std::nullopt : std::optional(it->second);
  };
  auto real_or = [&](const std::string& k, double def) { auto v = get(k); return v ? parse_real(*v, k) : def; };
  auto pos_or = [&](const std::string& k, u64 def) { auto v = get(k); return v ? parse_pos(*v, k) : def; };
  auto measure_file = [&]() { auto v = get("file"); return v ? *v : cfg.measure; };

  const double beta = real_or("beta", cfg.beta);
  const u64 C = pos_or("truncation", cfg.truncation);
  StateSpec out;
  try {
    if (kind == "finite") {
      out = make_finite(pos_or("n", cfg.n), beta);
    } else if (kind == "lebesgue") {
      out = make_lebesgue(beta);
    } else if (kind == "measure") {
      out = make_from_measure(load_measure(measure_file()), beta);
    } else if (kind == "lowtemp") {
      auto root = get("root");
      out = make_low_temp(root ? AtomicMeasure::dirac(parse_root(*root)) : load_measure(measure_file()), beta, C);
    } else if (kind == "quotient") {
      out = make_quotient(pos_or("n", cfg.n), pos_or("m", cfg.subgroup), beta);
    } else if (kind == "quotient-char") {
      auto z = get("z");
      if (!z) throw UsageError("quotient-char needs z=p/q");
      out = make_quotient_char(pos_or("n", cfg.n), parse_root(*z), beta, C);
    } else if (kind == "qz-subgroup") {
      out = make_qz_subgroup(pos_or("N", cfg.level), pos_or("m", cfg.subgroup), beta);
    } else if (kind == "qz-char") {
      auto chi = get("chi");
      if (!chi) throw UsageError("qz-char needs chi=p/q");
      out = make_qz_char(pos_or("N", cfg.level), parse_root(*chi), beta, C);
    } else {
      throw UsageError("unknown state kind '" + kind +
                       "' (finite, lebesgue, measure, lowtemp, quotient, quotient-char, qz-subgroup, qz-char)");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& [k, v] : kv)
    if (!used.count(k)) throw UsageError("unknown parameter '" + k + "' for state kind " + kind);
  return out;
}

// ---------------------------------------------------------------------------
// Output

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::string monomial_str(const Monomial& m) {
  return std::to_string(m.a) + "," + std::to_string(m.k) + "," + std::to_string(m.b);
}

void require_finite(const json& j, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw std::runtime_error("non-finite value at " + path);
  if (j.is_object())
    for (const auto& [k, v] : j.items()) require_finite(v, path + "." + k);
  if (j.is_array())
    for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], path + "[" + std::to_string(i) + "]");
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

// Tables ("rows" or "atoms") become CSV with a header; anything else becomes key,value lines.
void write_csv(std::ostream& os, const json& j) {
  const json* table = nullptr;
  for (const char* key : {"rows", "atoms", "coefficients", "criteria"})
    if (j.contains(key) && j.at(key).is_array()) {
      table = &j.at(key);
      break;
    }
  if (table) {
    std::vector<std::string> cols;
    for (const auto& row : *table)
      for (const auto& [k, v] : row.items())
        if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& row : *table) {
      for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << (row.contains(cols[i]) ? csv_cell(row.at(cols[i])) : "");
      os << '\n';
    }
    return;
  }
  os << "key,value\n";
  for (const auto& [k, v] : j.flatten().items()) os << k << ',' << csv_cell(v) << '\n';
}

void emit(const Config& cfg, const json& j) {
  require_finite(j, "$");
  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw UsageError("cannot write output file '" + cfg.output + "'");
  }
  std::ostream& os = cfg.output.empty() ? std::cout : file;
  if (cfg.format == "csv") write_csv(os, j);
  else os << j.dump(2) << '\n';
}

// Runs f(0..count-1) on up to `jobs` threads; results are stored by index.
template <class F>
auto parallel_map(std::size_t count, unsigned jobs, F f) -> std::vector<decltype(f(std::size_t{}))> {
  std::vector<decltype(f(std::size_t{}))> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_eval_state(const Config& cfg) {
  const StateSpec st = parse_state(cfg.state, cfg);
  if (cfg.monomial.empty()) throw UsageError("no monomial given (use --monomial a,k,b)");
  const StateValue v = is_qz_monomial(cfg.monomial) ? eval_state(st, parse_qz_monomial(cfg.monomial))
                                                    : eval_state(st, parse_monomial(cfg.monomial));
  json out{{"state", to_json(st)}, {"monomial", cfg.monomial}, {"value", cplx_json(v.value)}};
  if (v.tail_bound) out["tail_bound"] = *v.tail_bound;
  emit(cfg, out);
  return kExitOk;
}

int cmd_kms_check(const Config& cfg, std::size_t samples) {
  const StateSpec st = parse_state(cfg.state, cfg);
  if (!is_affine_family(st)) throw UsageError("kms-check needs a finite, lebesgue, measure or lowtemp state");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<u64> ab(1, 12);
  std::uniform_int_distribution<i64> k(-30, 30);
  std::vector<std::pair<Monomial, Monomial>> pairs;
  for (std::size_t i = 0; i < samples; ++i) {
    const u64 a1 = ab(rng), b1 = ab(rng);
    const i64 k1 = k(rng);
    const u64 a2 = ab(rng), b2 = ab(rng);
    const i64 k2 = k(rng);
    pairs.emplace_back(Monomial(a1, k1, b1), Monomial(a2, k2, b2));
  }
  const auto res = parallel_map(pairs.size(), cfg.jobs, [&](std::size_t i) { return kms_residual(st, pairs[i].first, pairs[i].second); });
  std::size_t worst = 0;
  for (std::size_t i = 1; i < res.size(); ++i)
    if (res[i] > res[worst]) worst = i;
  const double max_res = res.empty() ? 0.0 : res[worst];
  json out{{"state", to_json(st)}, {"samples", samples}, {"max_residual", max_res}, {"tolerance", cfg.tol}};
  const bool ok = max_res <= cfg.tol;
  out["passed"] = ok;
  if (!ok) out["witness"] = {{"x", monomial_str(pairs[worst].first)}, {"y", monomial_str(pairs[worst].second)}, {"residual", max_res}};
  emit(cfg, out);
  return ok ? kExitOk : kExitViolation;
}

int cmd_decompose(const Config& cfg) {
  const AtomicMeasure nu = load_measure(cfg.measure);
  const Decomposition d = decompose(nu, cfg.beta, cfg.tol);
  json rows = json::array();
  u64 worst = 0;
  for (const auto& [n, c] : d.coefficients) {
    rows.push_back({{"n", n}, {"weight", c}});
    if (worst == 0 || c < d.coefficients.at(worst)) worst = n;
  }
  const double err = max_atom_diff(recompose(d.coefficients, cfg.beta), nu);
  json out{{"beta", cfg.beta}, {"level", d.level}, {"coefficients", rows}, {"min_coefficient", d.min_coefficient},
           {"subconformal", d.subconformal}, {"recomposition_error", err}};
  if (!d.subconformal) out["witness"] = {{"n", worst}, {"weight", d.coefficients.at(worst)}};
  emit(cfg, out);
  return d.subconformal ? kExitOk : kExitViolation;
}

int cmd_check_subconformal(const Config& cfg) {
  const AtomicMeasure nu = load_measure(cfg.measure);
  const SubconformalVerdict v = check_subconformal(nu, cfg.beta, cfg.prime_bound, cfg.tol);
  json out{{"beta", cfg.beta}, {"passed", v.passed}, {"min_value", v.min_value}, {"candidate_primes", v.candidate_primes},
           {"subsets_checked", v.subsets_checked}};
  if (!v.passed) out["witness"] = {{"primes", v.witness_primes}, {"atom", v.witness_atom.str()}, {"value", v.min_value}};
  emit(cfg, out);
  return v.passed ? kExitOk : kExitViolation;
}

int cmd_extremal(const Config& cfg) {
  emit(cfg, to_json(extremal_measure(cfg.n, cfg.beta)));
  return kExitOk;
}

int cmd_pushforward(const Config& cfg, u64 k) {
  emit(cfg, to_json(pushforward(load_measure(cfg.measure), k)));
  return kExitOk;
}

int cmd_t_beta(const Config& cfg, const std::string& root) {
  if (!root.empty()) {
    emit(cfg, {{"beta", cfg.beta}, {"root", root}, {"measure", to_json(t_beta_exact_root(parse_root(root), cfg.beta))}, {"tail_mass", 0.0}});
    return kExitOk;
  }
  const TBetaResult t = t_beta(load_measure(cfg.measure), cfg.beta, cfg.truncation);
  emit(cfg, {{"beta", cfg.beta}, {"truncation", cfg.truncation}, {"measure", to_json(t.measure)}, {"tail_mass", t.tail_mass}});
  return kExitOk;
}

int cmd_limit_beta1(const Config& cfg, const std::string& root, std::vector<double> betas) {
  const RootOfUnity z = parse_root(root);
  if (betas.empty())
    for (int j = 1; j <= 6; ++j) betas.push_back(1 + std::pow(10.0, -j));
  const auto dist = parallel_map(betas.size(), cfg.jobs, [&](std::size_t i) { return limit_beta1(z, {betas[i]}).rows.at(0).distance; });
  json rows = json::array();
  bool monotone = true;
  std::size_t break_at = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    rows.push_back({{"beta", betas[i]}, {"distance", dist[i]}});
    if (i > 0 && dist[i] > dist[i - 1] && monotone) {
      monotone = false;
      break_at = i;
    }
  }
  json out{{"root", z.str()}, {"rows", rows}, {"non_increasing", monotone}};
  if (!monotone) out["witness"] = {{"beta", betas[break_at]}, {"distance", dist[break_at]}, {"previous", dist[break_at - 1]}};
  emit(cfg, out);
  return monotone ? kExitOk : kExitViolation;
}

int cmd_superposition(const Config& cfg) {
  const SuperpositionResult r = superposition_check(cfg.n, cfg.beta, cfg.truncation);
  const bool ok = r.max_deviation <= r.tail_bound + cfg.tol;
  json out{{"n", cfg.n}, {"beta", cfg.beta}, {"truncation", cfg.truncation}, {"max_deviation", r.max_deviation},
           {"tail_bound", r.tail_bound}, {"monomials", r.monomials}, {"passed", ok}};
  if (!ok) out["witness"] = {{"monomial", monomial_str(r.worst)}, {"deviation", r.max_deviation}};
  emit(cfg, out);
  return ok ? kExitOk : kExitViolation;
}

int cmd_kappa(const Config& cfg, u64 b) {
  const Monomial x = parse_monomial(cfg.monomial);
  const Monomial y = apply_kappa(b, x);
  json out{{"b", b}, {"monomial", monomial_str(x)}, {"image", monomial_str(y)}};
  if (!cfg.state.empty()) {
    const StateSpec st = parse_state(cfg.state, cfg);
    out["state"] = to_json(st);
    out["value_on_image"] = cplx_json(eval_state(st, y).value);
  }
  emit(cfg, out);
  return kExitOk;
}

int cmd_quotient_eval(const Config& cfg, const std::string& root) {
  const Monomial x = parse_monomial(cfg.monomial);
  const StateSpec st = root.empty() ? make_quotient(cfg.n, cfg.subgroup, cfg.beta)
                                    : make_quotient_char(cfg.n, parse_root(root), cfg.beta, cfg.truncation);
  const StateValue v = eval_state(st, x);
  json out{{"state", to_json(st)}, {"monomial", monomial_str(x)}, {"value", cplx_json(v.value)}};
  if (v.tail_bound) out["tail_bound"] = *v.tail_bound;
  emit(cfg, out);
  return kExitOk;
}

int cmd_qz_coherence(const Config& cfg, const std::string& chi) {
  if (cfg.level == 0) throw UsageError("qz-coherence needs --level N");
  const QZMonomial x = parse_qz_monomial(cfg.monomial);
  const Coherence c = chi.empty() ? qz_coherence(cfg.level, cfg.subgroup, cfg.beta, x, cfg.n)
                                  : qz_char_coherence(cfg.level, parse_root(chi), cfg.beta, cfg.truncation, x, cfg.n);
  const double diff = std::max(std::abs(c.lhs.real() - c.rhs.real()), std::abs(c.lhs.imag() - c.rhs.imag()));
  const bool ok = diff <= std::max(cfg.tol, 1e-12);
  json out{{"level", cfg.level}, {"n", cfg.n}, {"monomial", cfg.monomial}, {"lhs", cplx_json(c.lhs)}, {"rhs", cplx_json(c.rhs)},
           {"difference", diff}, {"passed", ok}};
  if (chi.empty()) out["subgroup"] = cfg.subgroup;
  else out["chi"] = chi;
  emit(cfg, out);
  return ok ? kExitOk : kExitViolation;
}

int cmd_reconstruct(const Config& cfg, const std::string& primes, i64 k) {
  const StateSpec st = parse_state(cfg.state, cfg);
  const ReconstructionCheck r = reconstruct_check(st, parse_primes(primes), k, cfg.truncation);
  const double diff = std::abs(r.lhs - r.rhs);
  const bool ok = diff <= r.tail_bound + cfg.tol;
  emit(cfg, {{"state", to_json(st)}, {"k", k}, {"lhs", cplx_json(r.lhs)}, {"rhs", cplx_json(r.rhs)}, {"difference", diff},
             {"tail_bound", r.tail_bound}, {"terms", r.terms}, {"passed", ok}});
  return ok ? kExitOk : kExitViolation;
}

int cmd_e_f_mass(const Config& cfg, const std::string& primes, u64 C) {
  const StateSpec st = parse_state(cfg.state, cfg);
  const PrimeSet F = parse_primes(primes);
  const EFMass m = e_f_mass(st, F, C);
  const double tail = eval_state(st, projection_eF(F)).tail_bound.value_or(0.0);
  const bool ok = std::abs(m.value - m.expected) <= cfg.tol + tail;
  json out{{"state", to_json(st)}, {"value", m.value}, {"expected", m.expected}, {"passed", ok}};
  if (C > 0) {
    out["alpha_sum"] = m.alpha_sum;
    out["alpha_tail"] = m.alpha_tail;
  }
  emit(cfg, out);
  return ok ? kExitOk : kExitViolation;
}

int cmd_psi(const Config& cfg, u64 x, u64 y) {
  emit(cfg, {{"x", x}, {"y", y}, {"psi", psi_count(x, y)}});
  return kExitOk;
}

int cmd_dickman(const Config& cfg, const std::vector<double>& us, double h) {
  const auto vals = parallel_map(us.size(), cfg.jobs, [&](std::size_t i) { return dickman(us[i], h); });
  json rows = json::array();
  for (std::size_t i = 0; i < us.size(); ++i) rows.push_back({{"u", us[i]}, {"rho", vals[i]}});
  emit(cfg, {{"h", h}, {"rows", rows}});
  return kExitOk;
}

int cmd_dickman_mass(const Config& cfg, double u_max, double h) {
  const double m = dickman_mass(u_max, h);
  emit(cfg, {{"u_max", u_max}, {"h", h}, {"mass", m}, {"exp_gamma", std::exp(kEulerGamma)}});
  return kExitOk;
}

int cmd_mertens(const Config& cfg, const std::vector<u64>& xs) {
  const auto res = parallel_map(xs.size(), cfg.jobs, [&](std::size_t i) { return mertens_product(xs[i]); });
  json rows = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i)
    rows.push_back({{"x", xs[i]}, {"product", res[i].product}, {"scaled", res[i].scaled}, {"rel_dev", res[i].rel_dev}});
  emit(cfg, {{"rows", rows}});
  return kExitOk;
}

SequenceSpec parse_sequence(const std::string& name) {
  if (name == "one") return seq::ConstOne{};
  if (name == "primes") return seq::PrimeIndicator{};
  if (name == "squares") return seq::SquareIndicator{};
  if (name == "zero") return seq::Custom{};
  throw UsageError("unknown sequence '" + name + "' (one, primes, squares, zero)");
}

int cmd_smooth_sum(const Config& cfg, std::size_t n_primes, const std::string& name, bool trend) {
  const SequenceSpec a = parse_sequence(name);
  if (!trend) {
    const HarmonicSum h = smooth_harmonic_sum(n_primes, a, cfg.truncation);
    emit(cfg, {{"n_primes", n_primes}, {"sequence", name}, {"truncation", cfg.truncation}, {"value", h.value},
               {"truncation_share", h.truncation_share}});
    return kExitOk;
  }
  if (n_primes < 3) throw UsageError("--trend needs --n-primes of at least 3");
  const auto res = parallel_map(n_primes - 2, cfg.jobs, [&](std::size_t i) { return smooth_harmonic_sum(i + 3, a, cfg.truncation); });
  json rows = json::array();
  bool non_increasing = true;
  for (std::size_t i = 0; i < res.size(); ++i) {
    rows.push_back({{"n_primes", i + 3}, {"value", res[i].value}, {"truncation_share", res[i].truncation_share}});
    if (i > 0 && res[i].value > res[i - 1].value) non_increasing = false;
  }
  emit(cfg, {{"sequence", name}, {"truncation", cfg.truncation}, {"rows", rows}, {"non_increasing", non_increasing}});
  return kExitOk;
}

// "k:re[:im],..." Fourier coefficients; zero elsewhere.
std::map<i64, cplx> parse_hat(const std::string& s) {
  std::map<i64, cplx> out;
  for (const auto& item : split(s, ',')) {
    if (trim(item).empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("Fourier entry '" + item + "' is not k:re[:im]");
    out[parse_int(parts[0], "Fourier index")] = cplx(parse_real(parts[1], "Fourier value"), parts.size() == 3 ? parse_real(parts[2], "Fourier value") : 0.0);
  }
  return out;
}

int cmd_wiener(const Config& cfg, std::size_t n_primes, const std::string& hat, const std::string& exclude, i64 ell, i64 k, bool trend) {
  std::function<cplx(i64)> f;
  std::map<i64, cplx> coeffs;
  AtomicMeasure nu;
  if (!hat.empty()) {
    coeffs = parse_hat(hat);
    for (const auto& [m, c] : coeffs)
      if (std::abs(c) > 1.0 + 1e-12) throw UsageError("Fourier coefficients must have modulus at most 1");
    f = [&](i64 m) {
      auto it = coeffs.find(m);
      return it == coeffs.end() ? cplx{} : it->second;
    };
  } else {
    nu = load_measure(cfg.measure);
    if (nu.mass() > 1.0 + 1e-12 || !nu.nonnegative()) throw UsageError("wiener-sum needs a probability (sub)measure");
    f = [&](i64 m) { return fourier(nu, m); };
  }
  const PrimeSet B = parse_primes(exclude);
  const std::size_t first = trend ? 3 : n_primes;
  if (n_primes < first) throw UsageError("--trend needs --n-primes of at least 3");
  const auto res = parallel_map(n_primes - first + 1, cfg.jobs, [&](std::size_t i) { return wiener_sum(f, first + i, B, ell, k, cfg.truncation); });
  json rows = json::array();
  for (std::size_t i = 0; i < res.size(); ++i)
    rows.push_back({{"n_primes", first + i}, {"re", res[i].real()}, {"im", res[i].imag()}, {"abs", std::abs(res[i])}});
  if (!trend) {
    emit(cfg, {{"n_primes", n_primes}, {"ell", ell}, {"k", k}, {"truncation", cfg.truncation}, {"value", cplx_json(res[0])}, {"abs", std::abs(res[0])}});
    return kExitOk;
  }
  emit(cfg, {{"ell", ell}, {"k", k}, {"truncation", cfg.truncation}, {"rows", rows}});
  return kExitOk;
}

int cmd_delta(const Config& cfg, const std::vector<double>& us, u64 x, double cap, bool exact) {
  const auto res = parallel_map(us.size(), cfg.jobs, [&](std::size_t i) { return delta_estimate(us[i], x, cap); });
  json rows = json::array();
  for (std::size_t i = 0; i < us.size(); ++i) {
    json row{{"u", us[i]}, {"estimate", res[i].value}, {"s_max", res[i].s_max}, {"truncated", res[i].truncated},
             {"omitted_dickman_mass", res[i].omitted_dickman_mass}};
    if (exact && us[i] * std::log(static_cast<double>(x)) <= std::log(1e8)) row["exact_at_x"] = delta_at_x_abel(us[i], x);
    rows.push_back(row);
  }
  emit(cfg, {{"x", x}, {"kind", "estimate at a single x"}, {"rows", rows}});
  return kExitOk;
}

int cmd_self_test(const Config& cfg, bool corrupt) {
  acceptance::Options opt;
  opt.seed = cfg.seed;
  opt.corrupt_extremal = corrupt;
  const auto results = acceptance::run_all(opt);
  json rows = json::array();
  std::size_t passed = 0;
  for (const auto& r : results) {
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    passed += r.passed;
  }
  emit(cfg, {{"criteria", rows}, {"passed", passed}, {"total", results.size()}});
  return passed == results.size() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Numerical toolkit for KMS states of the N x Z Toeplitz system and related quotients"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "affkms 1.0.0");

  app.add_option("--beta", cfg.beta, "inverse temperature")->envname("AFFKMS_BETA");
  app.add_option("--n", cfg.n, "level n of a finite state or quotient")->envname("AFFKMS_N")->check(CLI::PositiveNumber);
  app.add_option("--level", cfg.level, "level N of the Q/Z system")->envname("AFFKMS_LEVEL");
  app.add_option("--subgroup", cfg.subgroup, "divisor m labelling a subgroup")->envname("AFFKMS_SUBGROUP")->check(CLI::PositiveNumber);
  app.add_option("--truncation", cfg.truncation, "series truncation C")->envname("AFFKMS_TRUNCATION")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "tolerance")->envname("AFFKMS_TOL")->check(CLI::PositiveNumber);
  app.add_option("--prime-bound", cfg.prime_bound, "extra primes window for subconformality")->envname("AFFKMS_PRIME_BOUND");
  app.add_option("--seed", cfg.seed, "seed for random probes")->envname("AFFKMS_SEED");
  app.add_option("--jobs", cfg.jobs, "worker threads for sweeps")->envname("AFFKMS_JOBS")->check(CLI::Range(1u, 256u));
  app.add_option("--format", cfg.format, "json or csv")->envname("AFFKMS_FORMAT")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", cfg.output, "output file (default stdout)")->envname("AFFKMS_OUTPUT");
  app.add_option("--state", cfg.state, "state, e.g. finite:n=2,beta=1")->envname("AFFKMS_STATE");
  app.add_option("--monomial", cfg.monomial, "a,k,b or a,p/q,b")->envname("AFFKMS_MONOMIAL");
  app.add_option("--measure", cfg.measure, "measure JSON file")->envname("AFFKMS_MEASURE");

  std::function<int()> action;
  auto sub = [&](const char* name, const char* help, std::function<int()> f) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&action, f] { action = f; });
    return s;
  };

  sub("eval-state", "evaluate a state on a monomial", [&] { return cmd_eval_state(cfg); });

  std::size_t samples = 1000;
  sub("kms-check", "test the KMS identity on random monomial pairs", [&] { return cmd_kms_check(cfg, samples); })
      ->add_option("--samples", samples)->check(CLI::PositiveNumber);

  sub("decompose", "coefficients of a measure over the extremal measures", [&] { return cmd_decompose(cfg); });
  sub("check-subconformal", "search for a violating prime set", [&] { return cmd_check_subconformal(cfg); });
  sub("extremal-measure", "closed-form extremal measure for (n, beta)", [&] { return cmd_extremal(cfg); });

  u64 push_k = 1;
  sub("pushforward", "image of a measure under z -> z^k", [&] { return cmd_pushforward(cfg, push_k); })
      ->add_option("--k", push_k)->required()->check(CLI::PositiveNumber);

  std::string root;
  sub("t-beta", "T_beta of a measure (truncated) or of a root of unity (exact)", [&] { return cmd_t_beta(cfg, root); })
      ->add_option("--root", root, "p/q for the exact form");

  std::string limit_root;
  std::vector<double> betas;
  auto* lb = sub("limit-beta1", "distance of T_beta delta_z from uniform as beta -> 1+", [&] { return cmd_limit_beta1(cfg, limit_root, betas); });
  lb->add_option("--root", limit_root, "p/q")->required();
  lb->add_option("--betas", betas, "descending list of beta > 1")->delimiter(',');

  sub("superposition-check", "finite state against the average of low-temperature states", [&] { return cmd_superposition(cfg); });

  u64 kappa_b = 1;
  sub("kappa", "apply the endomorphism U -> U^b", [&] { return cmd_kappa(cfg, kappa_b); })
      ->add_option("--b", kappa_b)->required();

  std::string quotient_root;
  sub("quotient-eval", "state of the Z/n quotient (m = --subgroup, or --root for beta > 1)", [&] { return cmd_quotient_eval(cfg, quotient_root); })
      ->add_option("--root", quotient_root, "p/q");

  std::string chi;
  sub("qz-coherence", "Q/Z state at level N against the Z/n quotient", [&] { return cmd_qz_coherence(cfg, chi); })
      ->add_option("--chi", chi, "p/q, value of the character at 1/N (beta > 1)");

  std::string primes;
  i64 recon_k = 1;
  auto* rc = sub("reconstruct", "rebuild psi(U^k) from its e_F compression", [&] { return cmd_reconstruct(cfg, primes, recon_k); });
  rc->add_option("--primes", primes, "comma separated prime set F")->required();
  rc->add_option("--k", recon_k);

  u64 alpha_c = 0;
  auto* ef = sub("e-f-mass", "value of a state on e_F", [&] { return cmd_e_f_mass(cfg, primes, alpha_c); });
  ef->add_option("--primes", primes, "comma separated prime set F")->required();
  ef->add_option("--alpha-bound", alpha_c, "also sum psi(alpha_a(e_F)) over F-smooth a up to this bound");

  u64 psi_x = 1, psi_y = 2;
  auto* pc = sub("psi-count", "number of y-smooth integers in [1, x]", [&] { return cmd_psi(cfg, psi_x, psi_y); });
  pc->add_option("--x", psi_x)->required();
  pc->add_option("--y", psi_y)->required()->check(CLI::Range(u64{2}, std::numeric_limits<u64>::max()));

  std::vector<double> us;
  double h = 0.005;
  auto* dk = sub("dickman", "Dickman function", [&] { return cmd_dickman(cfg, us, h); });
  dk->add_option("--u", us)->required()->delimiter(',');
  dk->add_option("--step", h, "grid step");

  double u_max = 20.0;
  auto* dm = sub("dickman-mass", "integral of the Dickman function", [&] { return cmd_dickman_mass(cfg, u_max, h); });
  dm->add_option("--u-max", u_max);
  dm->add_option("--step", h, "grid step");

  std::vector<u64> xs;
  sub("mertens", "prod_{p <= x} (1 - 1/p) and log(x) times it", [&] { return cmd_mertens(cfg, xs); })
      ->add_option("--x", xs)->required()->delimiter(',');

  std::size_t n_primes = 6;
  std::string seq_name = "one";
  bool trend = false;
  auto* ss = sub("smooth-sum", "Euler-weighted harmonic sum over smooth numbers", [&] { return cmd_smooth_sum(cfg, n_primes, seq_name, trend); });
  ss->add_option("--n-primes", n_primes)->check(CLI::PositiveNumber);
  ss->add_option("--sequence", seq_name, "one, primes, squares or zero");
  ss->add_flag("--trend", trend, "report n_primes = 3 .. --n-primes");

  std::string hat, exclude;
  i64 ell = 1, wk = 0;
  auto* ws = sub("wiener-sum", "weighted sum of Fourier coefficients along smooth numbers",
                 [&] { return cmd_wiener(cfg, n_primes, hat, exclude, ell, wk, trend); });
  ws->add_option("--n-primes", n_primes)->check(CLI::PositiveNumber);
  ws->add_option("--hat", hat, "Fourier coefficients k:re[:im],... (else --measure)");
  ws->add_option("--exclude", exclude, "primes B removed from the first n");
  ws->add_option("--ell", ell);
  ws->add_option("--k", wk);
  ws->add_flag("--trend", trend, "report n_primes = 3 .. --n-primes");

  u64 delta_x = 1000;
  double cap = 1e12;
  bool exact = false;
  std::vector<double> delta_us;
  auto* de = sub("delta-estimate", "int_u^inf Psi(x^s, x) / x^s ds at a single x", [&] { return cmd_delta(cfg, delta_us, delta_x, cap, exact); });
  de->add_option("--u", delta_us)->required()->delimiter(',');
  de->add_option("--x", delta_x);
  de->add_option("--cap", cap, "largest x^s counted");
  de->add_flag("--exact", exact, "add the exact value at x when x^u <= 1e8");

  bool corrupt = false;
  sub("self-test", "run the acceptance criteria", [&] { return cmd_self_test(cfg, corrupt); })
      ->add_flag("--corrupt-extremal", corrupt, "perturb nu_{beta,2} to check that failures are detected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    // Usage mistakes, unreadable input and rejected parameters all land here.
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
