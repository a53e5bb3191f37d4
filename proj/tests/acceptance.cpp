// Acceptance criteria. One line per criterion:
//
//   acceptance                 run all
//   acceptance --criterion N   run criterion N only
//
// Exit status is 0 iff every selected criterion passes.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "minext/minext.hpp"

using namespace minext;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// 1
Outcome v2_worked_example() {
  constexpr double kLimit = 1.0e-2;
  const double b = v2_failure_bound(1001, 2, 300, 10);
  return {b < kLimit, fmt("v2_failure_bound(1001, 2, 300, 10) = %.6e < %.1e", b, kLimit)};
}

// 2
Outcome mc_iv_consistency() {
  constexpr double kLimit = 0.02;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::mc_iv;
  cfg.n = 1001;
  cfg.s = 2;
  cfg.sampler = SamplerSpec::bernoulli(1001, 300.0 / 1001.0);
  cfg.trials = 2000;
  cfg.seed = 20260101;
  const auto r = run_mc_iv(cfg);
  return {r.failure_rate <= kLimit,
          fmt("failure rate %zu/%zu = %.4f <= %.2f (bound %.3e, simplified %.3e)", r.failures, r.trials,
              r.failure_rate, kLimit, r.bound_canonical.value_or(NAN), r.bound_simplified.value_or(NAN))};
}

// 3
Outcome moment_identities() {
  constexpr double kTol = 1e-12;
  Rng rng(3);
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t n = 5; n <= 49; n += 2) {
    if (std::gcd(n, std::size_t{6}) != 1) continue;
    for (std::size_t t = 1; t < n; ++t)
      for (int r = 0; r < 20; ++r) {
        const double phi = rng.angle();
        worst = std::max({worst, std::abs(moment_mean_b(1, t, phi, n)), std::abs(moment_mean_b(2, t, phi, n) - 0.5),
                          std::abs(moment_mean_b(3, t, phi, n))});
        ++cases;
      }
  }
  return {worst <= kTol, fmt("max deviation %.3e <= %.0e over %zu (n, t, phi)", worst, kTol, cases)};
}

// 4
Outcome d_moment_bound() {
  Rng rng(4);
  std::size_t violations = 0, cases = 0;
  double worst_ratio = 0.0;
  for (std::size_t n = 1; n <= 64; ++n)
    for (std::size_t s = 1; s <= std::min<std::size_t>(5, n); ++s) {
      const SupportSet S(n, random_subset(n, s, rng));
      for (int k = 2; k <= 5; ++k)
        for (int rep = 0; rep < 20; ++rep) {
          std::vector<double> psi(s);
          for (auto& p : psi) p = rng.angle();
          const double phi = rng.angle();
          for (auto t : S.members()) {
            const auto m = moment_bound_d(S, t, psi, phi, k, n);
            ++cases;
            if (!m.within_bound) ++violations;
            if (m.bound > 0) worst_ratio = std::max(worst_ratio, m.value / m.bound);
          }
        }
    }
  return {violations == 0,
          fmt("%zu violations of M(D^k) <= (s-1)^(k-1) over %zu cases; max value/bound %.4f", violations, cases,
              worst_ratio)};
}

// 5
Outcome series_constants() {
  constexpr double kTol = 2e-3;
  const double c1 = series_coefficient(1.0).coefficient;
  const double c2 = series_coefficient(0.763).coefficient;
  const bool ok = std::abs(c1 - 2.8731) <= kTol && std::abs(c2 - 2.6225) <= kTol;
  return {ok, fmt("coefficient(1) = %.5f vs 2.8731, coefficient(0.763) = %.5f vs 2.6225, tol %.0e", c1, c2, kTol)};
}

// 6
Outcome v3_worked_example() {
  constexpr double kLimit = 0.5e-4;
  const auto best = minimize_v3_over_alpha(10000000000ULL, 10, 1.5e4, 10, 10);
  return {best.bound <= kLimit,
          fmt("min over alpha of the exact bound = %.4e at alpha = %.5f <= %.1e", best.bound, best.alpha, kLimit)};
}

// 7
Outcome norm_identity() {
  constexpr double kTol = 1e-10;
  Rng rng(7);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.below(128);
    std::vector<complex> v(n);
    for (auto& e : v) e = rng.complex_normal();
    const Signal x(v);
    worst = std::max(worst, std::abs(a_norm(dft(x)) - l1_norm(x)));
  }
  return {worst <= kTol, fmt("max |a_norm(dft x) - l1_norm(x)| = %.3e <= %.0e over 1000 signals", worst, kTol)};
}

// 8
Outcome solver_oracle() {
  constexpr double kTol = 1e-5;
  Rng rng(8);
  double worst = 0.0;
  std::size_t unconverged = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.below(7);
    const std::size_t free = 1 + rng.below(std::min<std::size_t>(4, n - 1));
    const auto omega = sample(SamplerSpec::fixed(n, n - free), rng);
    const auto x = random_sparse_signal(n, 1 + rng.below(n), CoefficientModel::complex_gaussian, rng);
    const auto bp = basis_pursuit(RecoveryProblem::from_signal(x, omega));
    if (bp.status != SolverStatus::converged) ++unconverged;
    const auto o = oracle_min_l1(x, omega);
    worst = std::max(worst, std::abs(bp.objective - o.objective));
  }
  return {worst <= kTol,
          fmt("max |basis_pursuit - oracle| = %.3e <= %.0e over 50 instances (%zu not converged)", worst, kTol,
              unconverged)};
}

// 9
Outcome implication_audit() {
  std::size_t instances = 0, iv_true = 0, cert_true = 0, iv_fail = 0, cert_fail = 0;
  std::uint64_t seed = 9000;
  for (std::size_t n : {31u, 101u})
    for (std::size_t s : {1u, 2u, 3u})
      for (double tau : {0.5, 0.9}) {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::mc_recovery_fixed_x;
        cfg.n = n;
        cfg.s = s;
        cfg.sampler = SamplerSpec::bernoulli(n, tau);
        cfg.trials = 90;
        cfg.seed = seed++;
        const auto r = run_mc_recovery(cfg);
        instances += r.supports_tested;
        iv_true += r.iv_pass_trials;
        cert_true += r.certificate_passes;
        iv_fail += r.iv_true_recovery_failures;
        cert_fail += r.certificate_true_recovery_failures;
      }
  const bool ok = instances >= 1000 && iv_fail == 0 && cert_fail == 0 && iv_true > 0 && cert_true > 0;
  return {ok, fmt("%zu instances; check_iv true %zu (recovery failures %zu), certificate true %zu (recovery "
                  "failures %zu)",
                  instances, iv_true, iv_fail, cert_true, cert_fail)};
}

// 10
Outcome cardinality_necessity() {
  std::size_t passing = 0, violations = 0;
  for (std::size_t n = 1; n <= 14; ++n)
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::size_t> m;
      for (std::size_t w = 0; w < n; ++w)
        if (mask >> w & 1u) m.push_back(w);
      const auto k = build_kernel(FreqSet(n, m));
      for (std::size_t s : {1u, 2u})
        if (check_iv(k, s).holds) {
          ++passing;
          if (static_cast<double>(m.size()) < min_cardinality_bound(n, s)) ++violations;
        }
    }
  return {violations == 0,
          fmt("%zu violations of |Omega| >= 4s^2 n/(n+4s^2-1) among %zu passing (Omega, s), n <= 14", violations,
              passing)};
}

// 11
Outcome condition14() {
  constexpr double kResidualTol = 1e-12;
  constexpr double kLimitTol = 1e-3;
  double worst_residual = 0.0;
  std::size_t solved = 0;
  for (double C : {1.5, 2.0, 3.0, 4.0, 8.0, 20.0, 100.0})
    for (int nu : {3, 4, 6, 10, 30, 100, 1000})
      for (int mu : {4, 8, 10, 30, 100, 1000}) {
        const double a2 = std::pow(cos_pi_over(nu), 2);
        const double b = 1.0 - 2.0 * std::sin(std::numbers::pi / (2.0 * mu));
        if (C * a2 * b * b <= 1.0) continue;
        worst_residual = std::max(worst_residual, std::abs(condition14_residual(C, nu, mu, condition14_alpha_prime(C, nu, mu))));
        ++solved;
      }
  double worst_limit = 0.0;
  for (double C : {1.5, 2.0, 4.0, 10.0, 100.0})
    worst_limit = std::max(worst_limit, std::abs(condition14_alpha_prime(C, 1000, 1000) - 0.5 * (1.0 - 1.0 / C)));
  const bool ok = worst_residual <= kResidualTol && worst_limit <= kLimitTol;
  return {ok, fmt("max residual %.3e <= %.0e over %zu (C, nu, mu); at nu = mu = 1000 max |alpha' - (1-1/C)/2| = "
                  "%.3e vs tol %.0e",
                  worst_residual, kResidualTol, solved, worst_limit, kLimitTol)};
}

// 12
Outcome tail_bound() {
  constexpr std::size_t n = 10000, draws = 100000;
  constexpr double tau = 0.3;
  const double eps[2] = {0.05, 0.09};
  std::size_t exceed[2] = {0, 0};
  Rng rng(12);
  const auto spec = SamplerSpec::bernoulli(n, tau);
  for (std::size_t d = 0; d < draws; ++d) {
    const std::size_t card = sample(spec, rng).size();
    for (int e = 0; e < 2; ++e)
      if (static_cast<double>(card) > tau * n * (1.0 + eps[e])) ++exceed[e];
  }
  bool ok = true;
  std::string detail;
  for (int e = 0; e < 2; ++e) {
    const double freq = static_cast<double>(exceed[e]) / draws;
    const double bound = bernoulli_tail_bound(tau, n, eps[e]);
    ok = ok && freq <= bound;
    detail += fmt("%seps = %.2f: %.3e <= %.3e", e ? "; " : "", eps[e], freq, bound);
  }
  return {ok, detail};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"V2 worked example", v2_worked_example},
      {"Monte Carlo frequency of (iv)", mc_iv_consistency},
      {"moment identities of B", moment_identities},
      {"moment bound of D", d_moment_bound},
      {"series coefficient constants", series_constants},
      {"V3 worked example", v3_worked_example},
      {"Wiener norm identity", norm_identity},
      {"solver against oracle", solver_oracle},
      {"implication audit", implication_audit},
      {"cardinality floor is necessary", cardinality_necessity},
      {"closed form of alpha'", condition14},
      {"Bernoulli cardinality tail", tail_bound},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  const auto& list = criteria();
  if (only < 0 || only > static_cast<int>(list.size())) {
    std::fprintf(stderr, "criterion must lie in 1..%zu\n", list.size());
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = list[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, list[i].title, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
