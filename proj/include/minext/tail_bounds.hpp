#pragma once

// Analytic probability bounds for random frequency sets.
//
// Notation: a = cos(pi/nu) comes from covering the circle with nu phase
// directions, alpha' = alpha - 2 sin(pi/(2 mu)) from rounding unimodular
// phases to mu-th roots of unity. "log" is the natural logarithm.
//
// Bounds are returned raw and may exceed 1; see is_vacuous().

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"

namespace minext {

inline double cos_pi_over(int nu) { return std::cos(std::numbers::pi / nu); }

inline bool is_vacuous(double bound) { return !(bound < 1.0); }

/// 4 (e - 2), the series coefficient of the unrefined bound.
inline const double kSeriesCoefficientDefault = 4.0 * (std::numbers::e - 2.0);

struct BoundParams {
  double C = 2.0;
  int nu = 10;
  int mu = 10;
  double alpha = 0.5;
  double eps = 0.05;
  double xi = 1.0;

  double a() const { return cos_pi_over(nu); }
  double alpha_prime() const { return alpha - 2.0 * std::sin(std::numbers::pi / (2.0 * mu)); }
  /// Exponent of the V2-family failure probability, C a^2 - 1.
  double delta_v2() const { return C * a() * a() - 1.0; }
  /// Supremum of admissible exponents in the asymptotic V3-family statements.
  double delta_asymptotic() const { return (C - 1.0) * (C - 1.0) / (4.0 * C); }

  void validate() const {
    detail::require(C > 1.0, "C must exceed 1");
    detail::require(nu >= 3, "nu must be at least 3");
    detail::require(mu >= 4, "mu must be at least 4");
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    detail::require(xi > 0.0 && xi <= 1.0, "xi must lie in (0,1]");
  }
};

namespace detail {

inline void require_coprime_to_six(std::size_t n) {
  require(std::gcd(n, std::size_t{6}) == 1, "n must be a multiple of neither 2 nor 3");
}

inline void require_nu(int nu) { require(nu >= 3, "nu must be at least 3"); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Moments on Z_n

struct MomentReport {
  int k = 0;
  std::size_t t = 0;
  double phi = 0.0;
  double value = 0.0;
  double bound = 0.0;
  bool within_bound = true;
};

/// Mean over m in Z_n of cos^k(2 pi m t / n - phi), t != 0 mod n.
inline double moment_mean_b(int k, long long t, double phi, std::size_t n) {
  detail::check_order(n);
  detail::require(k >= 0, "moment order must be nonnegative");
  const std::size_t tr = detail::reduce(t, n);
  detail::require(tr != 0, "t must be nonzero mod n");
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double arg = 2.0 * std::numbers::pi * static_cast<double>((m * tr) % n) / static_cast<double>(n) - phi;
    acc += std::pow(std::cos(arg), k);
  }
  return acc / static_cast<double>(n);
}

/// Mean of D^k with D(m) = sum_{t' in S, t' != t} cos(2 pi m (t - t')/n + psi(t') - phi),
/// against the counting bound (s - 1)^(k - 1). psi is indexed like S.members().
inline MomentReport moment_bound_d(const SupportSet& S, std::size_t t, const std::vector<double>& psi, double phi,
                                   int k, std::size_t n) {
  detail::require(S.n() == n, "support order differs from n");
  detail::require(S.contains(t), "t must belong to S");
  detail::require(psi.size() == S.size(), "one phase per support point is required");
  detail::require(k >= 2, "moment order must be at least 2");
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    double d = 0.0;
    for (std::size_t j = 0; j < S.size(); ++j) {
      const std::size_t tp = S.members()[j];
      if (tp == t) continue;
      const std::size_t diff = (t + n - tp) % n;
      d += std::cos(2.0 * std::numbers::pi * static_cast<double>((m * diff) % n) / static_cast<double>(n) + psi[j] -
                    phi);
    }
    acc += std::pow(d, k);
  }
  MomentReport r;
  r.k = k;
  r.t = t;
  r.phi = phi;
  r.value = acc / static_cast<double>(n);
  r.bound = std::pow(static_cast<double>(S.size()) - 1.0, k - 1);
  r.within_bound = r.value <= r.bound + 1e-12;
  return r;
}

/// E exp(v X) for X ~ Bernoulli(tau), and the bound exp(tau (e^v - 1)).
inline double bernoulli_mgf(double tau, double v) { return 1.0 + tau * std::expm1(v); }
inline double bernoulli_mgf_bound(double tau, double v) { return std::exp(tau * std::expm1(v)); }

// ---------------------------------------------------------------------------
// V2 family: condition (iv) under Bernoulli selection

/// nu n exp(-tauN a^2 / (4 (s^2 + a^2))), the canonical bound on P(not (iv)).
inline double v2_failure_bound(std::size_t n, std::size_t s, double tauN, int nu) {
  detail::require(n >= 1, "n must be positive");
  detail::require_coprime_to_six(n);
  detail::require_nu(nu);
  detail::require(s >= 1, "s must be positive");
  detail::require(tauN >= 0.0, "tauN must be nonnegative");
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double ss = static_cast<double>(s) * static_cast<double>(s);
  return nu * static_cast<double>(n) * std::exp(-tauN * a2 / (4.0 * (ss + a2)));
}

struct V2Simplified {
  double tauN = 0.0;
  double failure = 0.0;
};

/// tauN = 4 C (s^2 + 1) log n and failure nu n^(1 - C a^2).
inline V2Simplified v2_simplified_bound(std::size_t n, std::size_t s, double C, int nu) {
  detail::require(n >= 1, "n must be positive");
  detail::require_coprime_to_six(n);
  detail::require_nu(nu);
  detail::require(C > 1.0, "C must exceed 1");
  detail::require(s >= 1, "s must be positive");
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double ss = static_cast<double>(s) * static_cast<double>(s);
  const double ln = std::log(static_cast<double>(n));
  return {4.0 * C * (ss + 1.0) * ln, nu * std::exp((1.0 - C * a2) * ln)};
}

struct V2Prime {
  std::size_t f = 0;
  double failure = 0.0;
  double term_iv = 0.0;        // nu n^-(C a^2 - 1)
  double term_transfer = 0.0;  // n^-(C eps^2 (1 + eps) (s^2 + 1))
};

/// Fixed-cardinality version: f = ceil(4 C (1 + eps)(s^2 + 1) log n).
inline V2Prime v2prime_bound(std::size_t n, std::size_t s, double C, double eps, int nu) {
  detail::require(n >= 1, "n must be positive");
  detail::require_nu(nu);
  detail::require(C > 1.0, "C must exceed 1");
  detail::require(eps > 0.0 && eps < 1.0 / 12.0, "eps must lie in (0, 1/12)");
  detail::require(s >= 1, "s must be positive");
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double ss = static_cast<double>(s) * static_cast<double>(s);
  const double ln = std::log(static_cast<double>(n));
  V2Prime out;
  out.f = static_cast<std::size_t>(std::ceil(4.0 * C * (1.0 + eps) * (ss + 1.0) * ln));
  out.term_iv = nu * std::exp(-(C * a2 - 1.0) * ln);
  out.term_transfer = std::exp(-C * eps * eps * (1.0 + eps) * (ss + 1.0) * ln);
  out.failure = out.term_iv + out.term_transfer;
  return out;
}

/// Supremum of the exponents delta for which the asymptotic fixed-cardinality
/// statement gives failure O(n^-delta): C - 1.
inline double v2pp_delta_sup(double C) {
  detail::require(C > 1.0, "C must exceed 1");
  return C - 1.0;
}

struct OptimalU {
  double u = 0.0;
  double exponent = 0.0;           // -a^2 / (4 (s^2 + a^2))
  double identity_residual = 0.0;  // quadratic bound at u minus exponent
  bool strict_gap = false;         // dropped terms are strictly dominated
};

/// u = (a/s)(1 + a^2/s^2)^-1, minimizer of -a u/(2s) + u^2 (1 + a^2/s^2)/4.
inline OptimalU optimal_u_v2(std::size_t s, int nu) {
  detail::require(s >= 1, "s must be positive");
  detail::require_nu(nu);
  const double a = cos_pi_over(nu);
  const double sd = static_cast<double>(s);
  const double q = 1.0 + a * a / (sd * sd);
  OptimalU out;
  out.u = (a / sd) / q;
  out.exponent = -a * a / (4.0 * (sd * sd + a * a));
  const double quadratic = -a * out.u / (2.0 * sd) + out.u * out.u * q / 4.0;
  out.identity_residual = quadratic - out.exponent;
  // a^2 u^2/(8 s^2) + sum_{k>=4} u^k/k! < a^2 u^2/(4 s^2)
  const double u = out.u;
  const double tail = std::expm1(u) - u - u * u / 2.0 - u * u * u / 6.0;
  out.strict_gap = a * a * u * u / (8.0 * sd * sd) + tail < a * a * u * u / (4.0 * sd * sd);
  return out;
}

// ---------------------------------------------------------------------------
// V3 family: condition (ii) for a fixed support under Bernoulli selection

enum class V3Form { exact, simplified };

struct V3Options {
  V3Form form = V3Form::exact;
  /// Replaces 4 (e - 2) in the exact denominators (see series_coefficient).
  double series_coefficient = kSeriesCoefficientDefault;
};

/// Right-hand side of the bound on 1 - P((ii)).
///
/// exact: nu mu^s [ s exp(-tauN a^2 a'^2 / (2 a^2 a'^2 + c (s-1)))
///                + (n-s) exp(-tauN a^2 (1-alpha)^2 / (2 a^2 (1-alpha)^2 + c s)) ], c = 4(e-2)
/// simplified: both denominators replaced by 3s + 2 and (n - s) by n, i.e.
///     nu mu^s (s n^(-C a^2 a'^2) + n^(1 - C a^2 (1-alpha)^2)) with tauN = (3s+2) C log n.
inline double v3_failure_bound(std::size_t n, std::size_t s, double tauN, int nu, int mu, double alpha,
                               const V3Options& opt = {}) {
  detail::require(n >= 1, "n must be positive");
  detail::require_nu(nu);
  detail::require(mu >= 4, "mu must be at least 4");
  detail::require(s >= 1 && s <= n, "s must lie in [1, n]");
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  const double ap = alpha - 2.0 * std::sin(std::numbers::pi / (2.0 * mu));
  detail::require(ap > 0.0, "alpha' = alpha - 2 sin(pi/(2 mu)) must be positive");
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double sd = static_cast<double>(s);
  const double nd = static_cast<double>(n);
  const double on = a2 * ap * ap;
  const double off = a2 * (1.0 - alpha) * (1.0 - alpha);
  const double prefactor = nu * std::pow(static_cast<double>(mu), sd);
  if (opt.form == V3Form::exact) {
    const double c = opt.series_coefficient;
    const double t1 = sd * std::exp(-tauN * on / (2.0 * on + c * (sd - 1.0)));
    const double t2 = (nd - sd) * std::exp(-tauN * off / (2.0 * off + c * sd));
    return prefactor * (t1 + t2);
  }
  const double denom = 3.0 * sd + 2.0;
  return prefactor * (sd * std::exp(-tauN * on / denom) + nd * std::exp(-tauN * off / denom));
}

struct AlphaChoice {
  double alpha = 0.0;
  double bound = 0.0;
};

/// Minimizes v3_failure_bound over alpha in (2 sin(pi/(2 mu)), 1): a uniform
/// grid of `grid` interior points, then golden-section search on the
/// bracket around the best grid point.
inline AlphaChoice minimize_v3_over_alpha(std::size_t n, std::size_t s, double tauN, int nu, int mu,
                                          const V3Options& opt = {}, std::size_t grid = 10000) {
  detail::require(grid >= 3, "grid needs at least 3 points");
  const double lo = 2.0 * std::sin(std::numbers::pi / (2.0 * mu));
  detail::require(lo < 1.0, "empty alpha range");
  const double h = (1.0 - lo) / static_cast<double>(grid + 1);
  auto f = [&](double al) { return v3_failure_bound(n, s, tauN, nu, mu, al, opt); };
  std::size_t best_i = 1;
  double best = f(lo + h);
  for (std::size_t i = 2; i <= grid; ++i) {
    const double v = f(lo + h * static_cast<double>(i));
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + h * static_cast<double>(best_i - 1);
  double b = lo + h * static_cast<double>(best_i + 1);
  a = std::max(a, lo + 1e-15);
  b = std::min(b, 1.0 - 1e-15);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm < best) return {mid, fm};
  return {lo + h * static_cast<double>(best_i), best};
}

/// C such that tauN = (3s + 2) C log n.
inline double v3_c_from_tauN(std::size_t n, std::size_t s, double tauN) {
  detail::require(n >= 2, "n must be at least 2");
  return tauN / ((3.0 * static_cast<double>(s) + 2.0) * std::log(static_cast<double>(n)));
}

namespace detail {
inline double grid_b(int mu) { return 1.0 - 2.0 * std::sin(std::numbers::pi / (2.0 * mu)); }
}  // namespace detail

/// alpha' solving C a^2 b (b - 2 alpha') = 1 with b = 1 - 2 sin(pi/(2 mu)):
/// alpha' = (b - 1/(C a^2 b)) / 2. Requires C a^2 b^2 >= 1; at equality the
/// solution is the degenerate alpha' = 0.
inline double condition14_alpha_prime(double C, int nu, int mu) {
  detail::require_nu(nu);
  detail::require(mu >= 4, "mu must be at least 4");
  detail::require(C > 0.0, "C must be positive");
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double b = detail::grid_b(mu);
  const double prod = C * a2 * b * b;
  detail::require(prod >= 1.0 - 1e-12, "no nonnegative solution: C a^2 b^2 < 1");
  return std::max(0.0, 0.5 * (b - 1.0 / (C * a2 * b)));
}

/// C a^2 b (b - 2 alpha') - 1.
inline double condition14_residual(double C, int nu, int mu, double alpha_prime) {
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double b = detail::grid_b(mu);
  return C * a2 * b * (b - 2.0 * alpha_prime) - 1.0;
}

struct V3Statement {
  double alpha_prime = 0.0;
  double alpha = 0.0;
  double bound = 0.0;  // nu mu^s (s + 1) n^(-C a^2 alpha'^2)
};

inline V3Statement v3_statement_bound(std::size_t n, std::size_t s, double C, int nu, int mu) {
  detail::require(n >= 1, "n must be positive");
  detail::require(s >= 1, "s must be positive");
  V3Statement out;
  out.alpha_prime = condition14_alpha_prime(C, nu, mu);
  out.alpha = out.alpha_prime + 2.0 * std::sin(std::numbers::pi / (2.0 * mu));
  const double a2 = cos_pi_over(nu) * cos_pi_over(nu);
  const double sd = static_cast<double>(s);
  out.bound = nu * std::pow(static_cast<double>(mu), sd) * (sd + 1.0) *
              std::exp(-C * a2 * out.alpha_prime * out.alpha_prime * std::log(static_cast<double>(n)));
  return out;
}

/// (C - 1)^2 / (4 C); C = 1 gives the boundary value 0.
inline double asymptotic_delta(double C) {
  detail::require(C >= 1.0, "C must be at least 1");
  return (C - 1.0) * (C - 1.0) / (4.0 * C);
}

// ---------------------------------------------------------------------------
// Refinement of the series coefficient

struct SeriesCoefficient {
  double coefficient = 0.0;  // 4 (e^xi - 1 - xi) / xi^2
  /// The minimizing u satisfies u (s - 1) <= xi for every s >= 2 and every
  /// a alpha' in (0, 1): sup u (s - 1) = 1 / (2 g) with g = coefficient / 4.
  bool self_consistent = false;
};

inline SeriesCoefficient series_coefficient(double xi) {
  detail::require(xi > 0.0 && xi <= 1.0, "xi must lie in (0, 1]");
  double g;  // sum_{k>=2} xi^(k-2) / k!
  if (xi < 1e-4)
    g = 0.5 + xi / 6.0 + xi * xi / 24.0 + xi * xi * xi / 120.0;
  else
    g = (std::expm1(xi) - xi) / (xi * xi);
  SeriesCoefficient out;
  out.coefficient = 4.0 * g;
  out.self_consistent = 1.0 / (2.0 * g) <= xi;
  return out;
}

/// Smallest xi in (0, 1] for which series_coefficient is self-consistent
/// (root of 2 xi g(xi) = 1, by bisection).
inline double minimal_consistent_xi() {
  double lo = 1e-6, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (series_coefficient(mid).self_consistent)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace minext
