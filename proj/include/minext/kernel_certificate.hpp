#pragma once

// The idempotent kernel of a frequency set and the interpolation
// certificates built from it.
//
// K(t) = sum_{w in Omega} e(w t / n) is the time-domain function whose
// unitary spectrum is sqrt(n) * 1_Omega. A certificate for a support S and
// unimodular phases lambda on S is
//
//   p(t) = sum_{t' in S} lambda(t') K(t - t') / K(0),
//
// which is band-limited to Omega by construction. All decisions here use
// strict inequalities; a margin of exactly zero is a failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"

namespace minext {

struct Kernel {
  std::size_t n = 0;
  FreqSet omega;
  std::vector<complex> values;  // values[t] = K(t)
  double k0 = 0.0;              // = |Omega|

  /// K at an arbitrary integer, read modulo n.
  const complex& at(long long t) const { return values[detail::reduce(t, n)]; }
};

namespace detail {

/// exp(2 pi i k / n) for k in [0, n).
inline std::vector<complex> unit_roots(std::size_t n) {
  std::vector<complex> roots(n);
  for (std::size_t k = 0; k < n; ++k)
    roots[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  return roots;
}

}  // namespace detail

/// Kernel by direct summation over Omega, O(n |Omega|).
inline Kernel build_kernel_direct(const FreqSet& omega) {
  detail::require(!omega.empty(), "frequency set must be non-empty");
  const std::size_t n = omega.n();
  const auto roots = detail::unit_roots(n);
  std::vector<complex> values(n);
  for (auto w : omega.members()) {
    std::uint64_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      values[t] += roots[idx];
      idx += w;
      if (idx >= n) idx -= n;
    }
  }
  values[0] = static_cast<double>(omega.size());
  return Kernel{n, omega, std::move(values), static_cast<double>(omega.size())};
}

/// Kernel as the inverse transform of sqrt(n) * 1_Omega.
inline Kernel build_kernel_transform(const FreqSet& omega) {
  detail::require(!omega.empty(), "frequency set must be non-empty");
  const std::size_t n = omega.n();
  std::vector<complex> indicator(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (auto w : omega.members()) indicator[w] = root_n;
  auto values = idft(Spectrum(std::move(indicator))).vector();
  values[0] = static_cast<double>(omega.size());
  return Kernel{n, omega, std::move(values), static_cast<double>(omega.size())};
}

inline Kernel build_kernel(const FreqSet& omega) {
  constexpr double kDirectWork = 1 << 22;
  const double work = static_cast<double>(omega.n()) * static_cast<double>(omega.size());
  return work <= kDirectWork ? build_kernel_direct(omega) : build_kernel_transform(omega);
}

// ---------------------------------------------------------------------------
// Condition (iv): |K(t)| < K(0) / (2s) for every t != 0.

struct IvCheck {
  bool holds = false;
  double margin = 0.0;        // K(0)/(2s) - max_{t != 0} |K(t)|
  double max_off_zero = 0.0;  // max_{t != 0} |K(t)|
  double threshold = 0.0;     // K(0)/(2s)
};

inline IvCheck check_iv(const Kernel& k, std::size_t s) {
  detail::require(s >= 1, "sparsity must be at least 1");
  double worst = 0.0;
  for (std::size_t t = 1; t < k.n; ++t) worst = std::max(worst, std::abs(k.values[t]));
  IvCheck out;
  out.threshold = k.k0 / (2.0 * static_cast<double>(s));
  out.max_off_zero = worst;
  out.margin = out.threshold - worst;
  out.holds = out.margin > 0.0;
  return out;
}

/// Smallest |Omega| compatible with (iv) at sparsity s: 4 s^2 n / (n + 4 s^2 - 1).
inline double min_cardinality_bound(std::size_t n, std::size_t s) {
  detail::require(n >= 1 && s >= 1, "n and s must be positive");
  const double q = 4.0 * static_cast<double>(s) * static_cast<double>(s);
  const double nn = static_cast<double>(n);
  return q * nn / (nn + q - 1.0);
}

// ---------------------------------------------------------------------------
// Certificates

struct CertificateMargins {
  double on_support = 0.0;   // max_{t in S} |p(t) - lambda(t)|
  double off_support = 0.0;  // max_{t not in S} |p(t)|
};

struct Certificate {
  Signal p;
  SupportSet support;
  std::vector<complex> lambda;  // indexed like support.members()
  CertificateMargins margins;
  std::optional<double> alpha;  // an alpha in (0,1) satisfying both strict bounds, if one exists

  /// True when some alpha in (0,1) gives |p - lambda| < alpha on S and
  /// |p| < 1 - alpha off S.
  bool admits_alpha() const { return alpha.has_value(); }
};

namespace detail {

inline constexpr double kUnimodularTol = 1e-12;

inline std::optional<double> feasible_alpha(const CertificateMargins& m) {
  if (!(m.on_support + m.off_support < 1.0)) return std::nullopt;
  const double a = 0.5 * (m.on_support + (1.0 - m.off_support));
  if (!(a > 0.0 && a < 1.0)) return std::nullopt;
  return a;
}

inline CertificateMargins margins_of(const std::vector<complex>& p, const SupportSet& S,
                                     const std::vector<complex>& target) {
  CertificateMargins m;
  std::size_t j = 0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (j < S.size() && S.members()[j] == t) {
      m.on_support = std::max(m.on_support, std::abs(p[t] - target[j]));
      ++j;
    } else {
      m.off_support = std::max(m.off_support, std::abs(p[t]));
    }
  }
  return m;
}

/// p(t) = sum_j coeff[j] K(t - S[j]) / K(0).
inline std::vector<complex> synthesize(const Kernel& k, const SupportSet& S, const std::vector<complex>& coeff) {
  std::vector<complex> p(k.n);
  for (std::size_t j = 0; j < S.size(); ++j) {
    const complex c = coeff[j] / k.k0;
    const std::size_t shift = S.members()[j];
    for (std::size_t t = 0; t < k.n; ++t) {
      const std::size_t d = t >= shift ? t - shift : t + k.n - shift;
      p[t] += c * k.values[d];
    }
  }
  return p;
}

}  // namespace detail

inline Certificate build_certificate(const SupportSet& S, const std::vector<complex>& lambda, const Kernel& k) {
  detail::require(S.n() == k.n, "support and kernel orders differ");
  detail::require(lambda.size() == S.size(), "lambda must have one entry per support point");
  for (const auto& l : lambda)
    detail::require(std::abs(std::abs(l) - 1.0) <= detail::kUnimodularTol, "lambda must be unimodular");
  auto p = detail::synthesize(k, S, lambda);
  const auto margins = detail::margins_of(p, S, lambda);
  return Certificate{Signal(std::move(p)), S, lambda, margins, detail::feasible_alpha(margins)};
}

// ---------------------------------------------------------------------------
// Row-sum majorations of the certificate error, independent of lambda.

struct RowSums {
  double on_support = 0.0;   // max_{t in S} sum_{t' in S, t' != t} |K(t-t')|/K(0)
  double off_support = 0.0;  // max_{t not in S} sum_{t' in S} |K(t-t')|/K(0)

  /// rowS < alpha and rowSc < 1 - alpha: condition (3) for every lambda.
  bool sufficient_for(double alpha) const { return on_support < alpha && off_support < 1.0 - alpha; }
};

inline RowSums row_sum_bounds(const Kernel& k, const SupportSet& S) {
  detail::require(S.n() == k.n, "support and kernel orders differ");
  RowSums out;
  for (std::size_t t = 0; t < k.n; ++t) {
    double acc = 0.0;
    for (auto tp : S.members()) {
      if (tp == t) continue;
      acc += std::abs(k.at(static_cast<long long>(t) - static_cast<long long>(tp)));
    }
    acc /= k.k0;
    if (S.contains(t))
      out.on_support = std::max(out.on_support, acc);
    else
      out.off_support = std::max(out.off_support, acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Condition (iii) through the mu-th-root discretization of lambda.

inline constexpr double kGridEnumerationLimit = 1e7;

struct GridCheck {
  bool holds = false;
  double alpha_prime = 0.0;
  double worst_on_support = 0.0;   // over the assignments examined
  double worst_off_support = 0.0;  // over the assignments examined
  std::uint64_t assignments = 0;   // examined (first phase pinned to 1)
};

/// alpha' = alpha - 2 sin(pi / (2 mu)).
inline double grid_alpha_prime(double alpha, int mu) {
  return alpha - 2.0 * std::sin(std::numbers::pi / (2.0 * mu));
}

/// Exhaustive check over all mu^|S| root-of-unity phase assignments psi on
/// S: each p_psi must satisfy |p_psi - e^{i psi}| < alpha' on S and
/// |p_psi| < 1 - alpha off S. A pass implies (iii) with this alpha.
///
/// Multiplying every phase by a common root rotates p_psi and e^{i psi}
/// together and leaves both moduli unchanged, so the first phase is pinned
/// and mu^(|S|-1) assignments are enumerated.
inline GridCheck check_iii_grid(const SupportSet& S, const Kernel& k, double alpha, int mu) {
  detail::require(S.n() == k.n, "support and kernel orders differ");
  detail::require(mu >= 4, "mu must be at least 4");
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  GridCheck out;
  out.alpha_prime = grid_alpha_prime(alpha, mu);
  detail::require(out.alpha_prime > 0.0, "alpha' = alpha - 2 sin(pi/(2 mu)) must be positive");
  const std::size_t s = S.size();
  if (std::pow(static_cast<double>(mu), static_cast<double>(s)) > kGridEnumerationLimit)
    throw GuardError("mu^|S| exceeds the enumeration limit of 1e7");

  const std::size_t n = k.n;
  if (s == 0) {
    out.holds = 1.0 - alpha > 0.0;
    out.assignments = 1;
    return out;
  }

  // basis[j][t] = K(t - S[j]) / K(0)
  std::vector<std::vector<complex>> basis(s, std::vector<complex>(n));
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t t = 0; t < n; ++t)
      basis[j][t] = k.at(static_cast<long long>(t) - static_cast<long long>(S.members()[j])) / k.k0;
  std::vector<complex> roots(static_cast<std::size_t>(mu));
  for (int r = 0; r < mu; ++r) roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / mu);

  std::vector<int> digit(s, 0);
  std::vector<complex> p(n);
  const double off_limit = 1.0 - alpha;
  while (true) {
    std::fill(p.begin(), p.end(), complex{});
    for (std::size_t j = 0; j < s; ++j) {
      const complex c = roots[digit[j]];
      for (std::size_t t = 0; t < n; ++t) p[t] += c * basis[j][t];
    }
    ++out.assignments;
    bool ok = true;
    std::size_t j = 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (j < s && S.members()[j] == t) {
        const double e = std::abs(p[t] - roots[digit[j]]);
        out.worst_on_support = std::max(out.worst_on_support, e);
        if (!(e < out.alpha_prime)) ok = false;
        ++j;
      } else {
        const double e = std::abs(p[t]);
        out.worst_off_support = std::max(out.worst_off_support, e);
        if (!(e < off_limit)) ok = false;
      }
    }
    if (!ok) return out;
    // odometer over digits 1..s-1
    std::size_t pos = 1;
    while (pos < s && ++digit[pos] == mu) digit[pos++] = 0;
    if (pos >= s) break;
  }
  out.holds = true;
  return out;
}

}  // namespace minext
