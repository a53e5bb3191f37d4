#pragma once

// Random frequency sets.
//
// Two laws on subsets of Z_n are used: the uniform law on f-subsets
// (fixed cardinality) and independent Bernoulli(tau) inclusion of every
// residue. Both are invariant under permutations of Z_n.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"
#include "minext/random.hpp"

namespace minext {

struct FixedCardinality {
  std::size_t f = 0;
};

struct BernoulliSelection {
  double tau = 0.0;
};

struct SamplerSpec {
  std::size_t n = 0;
  std::variant<FixedCardinality, BernoulliSelection> model;

  static SamplerSpec fixed(std::size_t n, std::size_t f) { return validated({n, FixedCardinality{f}}); }
  static SamplerSpec bernoulli(std::size_t n, double tau) { return validated({n, BernoulliSelection{tau}}); }

  bool is_fixed() const { return std::holds_alternative<FixedCardinality>(model); }
  bool is_bernoulli() const { return std::holds_alternative<BernoulliSelection>(model); }

  /// Expected cardinality, f or tau n.
  double expected_cardinality() const {
    if (is_fixed()) return static_cast<double>(std::get<FixedCardinality>(model).f);
    return std::get<BernoulliSelection>(model).tau * static_cast<double>(n);
  }

  void validate() const {
    detail::check_order(n);
    if (is_fixed()) {
      const auto f = std::get<FixedCardinality>(model).f;
      // f = n is accepted and yields the whole group.
      detail::require(f >= 1 && f <= n, "fixed cardinality requires 0 < f <= n");
    } else {
      const double tau = std::get<BernoulliSelection>(model).tau;
      detail::require(tau > 0.0 && tau < 1.0, "Bernoulli selection requires 0 < tau < 1");
    }
  }

 private:
  static SamplerSpec validated(SamplerSpec s) {
    s.validate();
    return s;
  }
};

inline FreqSet sample(const SamplerSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.is_fixed()) return FreqSet(spec.n, random_subset(spec.n, std::get<FixedCardinality>(spec.model).f, rng));
  const double tau = std::get<BernoulliSelection>(spec.model).tau;
  std::vector<std::size_t> members;
  members.reserve(static_cast<std::size_t>(tau * static_cast<double>(spec.n) * 1.2) + 8);
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(tau, 64));
  for (std::size_t w = 0; w < spec.n; ++w)
    if (rng.next_u64() < threshold) members.push_back(w);
  return FreqSet(spec.n, std::move(members));
}

/// Upper bound on P(|Omega| > tau n (1 + eps)) under Bernoulli selection:
/// exp(-eps^2 tau n / 3), stated for 0 < eps < 1/10.
inline double bernoulli_tail_bound(double tau, std::size_t n, double eps) {
  detail::require(eps > 0.0 && eps < 0.1, "tail bound requires 0 < eps < 1/10");
  detail::require(tau > 0.0 && tau < 1.0, "tau must lie in (0,1)");
  return std::exp(-eps * eps * tau * static_cast<double>(n) / 3.0);
}

struct TransferBound {
  std::size_t f = 0;   // ceil(tau n (1 + eps))
  double bound = 0.0;  // raw, may be negative
};

/// Lower bound on the fixed-cardinality probability of a monotone event
/// given its Bernoulli probability: p - exp(-eps^2 tau n / 3) at
/// f = ceil(tau n (1 + eps)), stated for 0 < eps < 1/12. Not clamped.
inline TransferBound coupled_transfer_bound(double p_event_bernoulli, double tau, std::size_t n, double eps) {
  detail::require(eps > 0.0 && eps < 1.0 / 12.0, "transfer bound requires 0 < eps < 1/12");
  detail::require(tau > 0.0 && tau < 1.0, "tau must lie in (0,1)");
  detail::require(p_event_bernoulli >= 0.0 && p_event_bernoulli <= 1.0, "probability must lie in [0,1]");
  const double tn = tau * static_cast<double>(n);
  TransferBound out;
  out.f = static_cast<std::size_t>(std::ceil(tn * (1.0 + eps)));
  out.bound = p_event_bernoulli - std::exp(-eps * eps * tn / 3.0);
  return out;
}

}  // namespace minext
