#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "minext/tail_bounds.hpp"

using namespace minext;

namespace {

const double kPi = std::numbers::pi;

double direct_mean_cos_power(int k, std::size_t t, double phi, std::size_t n) {
  long double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    acc += std::pow(std::cos(2.0L * std::numbers::pi_v<long double> * static_cast<long double>(m * t) / n - phi), k);
  return static_cast<double>(acc / n);
}

}  // namespace

TEST(Params, Derived) {
  BoundParams p;
  p.nu = 10;
  p.mu = 8;
  EXPECT_NEAR(p.a(), std::cos(kPi / 10), 1e-15);
  EXPECT_NEAR(p.alpha_prime(), 0.5 - 2 * std::sin(kPi / 16), 1e-15);
  p.alpha = 0.9;
  EXPECT_NEAR(p.alpha_prime(), 0.9 - 2 * std::sin(kPi / 16), 1e-15);
  p.C = 1.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(MomentB, PaperValues) {
  EXPECT_NEAR(moment_mean_b(1, 1, 0.3, 7), 0.0, 1e-12);
  EXPECT_NEAR(moment_mean_b(2, 2, 1.1, 7), 0.5, 1e-12);
  EXPECT_THROW(moment_mean_b(1, 7, 0.0, 7), ValidationError);
  EXPECT_THROW(moment_mean_b(1, 0, 0.0, 7), ValidationError);
}

TEST(MomentB, MultipleOfFiveCase) {
  // n = 25, t = 5: m t / n takes only the 5 values k/5, and 3t != 0 mod 25
  const double v = moment_mean_b(3, 5, 0.0, 25);
  EXPECT_NEAR(v, direct_mean_cos_power(3, 5, 0.0, 25), 1e-14);
  EXPECT_LE(std::abs(v), 1.0);
  EXPECT_NEAR(v, 0.0, 1e-12);
  // the cube averages to zero unless 3t = 0 mod n; with n = 9, t = 3 it does not
  EXPECT_NEAR(moment_mean_b(3, 3, 0.0, 9), 0.25, 1e-12);
}

TEST(MomentB, IdentitiesForCoprimeToSix) {
  Rng rng(1);
  for (std::size_t n = 5; n <= 64; ++n) {
    if (std::gcd(n, std::size_t{6}) != 1) continue;
    for (std::size_t t = 1; t < n; ++t)
      for (int r = 0; r < 4; ++r) {
        const double phi = rng.angle();
        ASSERT_NEAR(moment_mean_b(1, t, phi, n), 0.0, 1e-12);
        ASSERT_NEAR(moment_mean_b(2, t, phi, n), 0.5, 1e-12);
        ASSERT_NEAR(moment_mean_b(3, t, phi, n), 0.0, 1e-12);
      }
  }
}

TEST(MomentD, EmptySumIsZero) {
  const auto r = moment_bound_d(SupportSet(11, {4}), 4, {0.2}, 0.1, 3, 11);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_TRUE(r.within_bound);
}

TEST(MomentD, TwoPoints) {
  const auto r = moment_bound_d(SupportSet(31, {2, 9}), 2, {0.3, 1.7}, 0.4, 2, 31);
  EXPECT_EQ(r.bound, 1.0);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  EXPECT_TRUE(r.within_bound);
}

TEST(MomentD, ThreePointsDirect) {
  Rng rng(2);
  const SupportSet S(31, {0, 5, 17});
  const std::vector<double> psi{rng.angle(), rng.angle(), rng.angle()};
  const double phi = rng.angle();
  const auto r = moment_bound_d(S, 5, psi, phi, 3, 31);
  long double acc = 0.0;
  for (std::size_t m = 0; m < 31; ++m) {
    long double d = 0.0;
    for (std::size_t j : {0u, 2u}) {
      const long long diff = 5 - static_cast<long long>(S.members()[j]);
      d += std::cos(2.0L * std::numbers::pi_v<long double> * m * diff / 31.0L + psi[j] - phi);
    }
    acc += d * d * d;
  }
  EXPECT_NEAR(r.value, static_cast<double>(acc / 31), 1e-12);
  EXPECT_LE(r.value, 4.0);
  EXPECT_EQ(r.bound, 4.0);
}

TEST(MomentD, RejectsBadArguments) {
  EXPECT_THROW(moment_bound_d(SupportSet(7, {1, 2}), 3, {0, 0}, 0, 2, 7), ValidationError);
  EXPECT_THROW(moment_bound_d(SupportSet(7, {1, 2}), 1, {0}, 0, 2, 7), ValidationError);
  EXPECT_THROW(moment_bound_d(SupportSet(7, {1, 2}), 1, {0, 0}, 0, 1, 7), ValidationError);
}

TEST(Mgf, BernoulliLemma) {
  for (double tau : {0.01, 0.1, 0.5})
    for (double v = -2.0; v <= 2.0; v += 0.01) {
      const double lhs = tau * std::exp(v) + (1 - tau);
      EXPECT_NEAR(bernoulli_mgf(tau, v), lhs, 1e-15);
      if (std::abs(v) > 1e-9) EXPECT_LT(bernoulli_mgf(tau, v), bernoulli_mgf_bound(tau, v));
    }
}

TEST(V2, WorkedExample) {
  const double b = v2_failure_bound(1001, 2, 300, 10);
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  EXPECT_NEAR(b, 10 * 1001 * std::exp(-300 * a2 / (4 * (4 + a2))), 1e-15);
  EXPECT_NEAR(b, 9.848e-3, 5e-6);
  EXPECT_LT(b, 0.01);
}

TEST(V2, LimitsAndScaling) {
  EXPECT_DOUBLE_EQ(v2_failure_bound(1001, 2, 0, 10), 10010.0);
  EXPECT_TRUE(is_vacuous(v2_failure_bound(1001, 2, 1e-9, 10)));
  const double k = 10.0 * 1001;
  const double r1 = v2_failure_bound(1001, 3, 200, 10) / k;
  const double r2 = v2_failure_bound(1001, 3, 400, 10) / k;
  EXPECT_NEAR(r2, r1 * r1, 1e-15);
}

TEST(V2, ArithmeticGate) {
  EXPECT_THROW(v2_failure_bound(1000, 2, 300, 10), ValidationError);
  EXPECT_THROW(v2_failure_bound(999, 2, 300, 10), ValidationError);
  EXPECT_THROW(v2_failure_bound(1001, 2, 300, 2), ValidationError);
  EXPECT_THROW(v2_simplified_bound(1002, 2, 2, 10), ValidationError);
  EXPECT_NO_THROW(v2prime_bound(1002, 2, 2, 0.05, 10));
}

TEST(V2Simplified, Example) {
  const std::size_t n = 1000001;  // coprime to 6, close to 10^6
  const auto r = v2_simplified_bound(n, 2, 2.0, 10);
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  EXPECT_NEAR(r.tauN, 40 * std::log(static_cast<double>(n)), 1e-9);
  EXPECT_NEAR(40 * std::log(1e6), 552.62, 1e-2);
  EXPECT_NEAR(r.failure, 10 * std::pow(static_cast<double>(n), 1 - 2 * a2), 1e-15);
  EXPECT_NEAR(2 * a2 - 1, 0.80902, 1e-5);
}

TEST(V2Simplified, DegenerateAndMonotone) {
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  EXPECT_NEAR(v2_simplified_bound(1001, 2, 1.0 / a2, 10).failure, 10.0, 1e-12);
  double prev = std::numeric_limits<double>::infinity();
  for (double C = 1.1; C < 6; C += 0.25) {
    const double f = v2_simplified_bound(1001, 2, C, 10).failure;
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(V2Prime, Terms) {
  const double eps = 1.0 / 12.0 - 1e-9;
  const auto r = v2prime_bound(1000000, 2, 2.0, eps, 10);
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  const double ln = std::log(1e6);
  EXPECT_NEAR(r.term_iv, 10 * std::pow(1e6, -(2 * a2 - 1)), 1e-15);
  EXPECT_NEAR(r.term_transfer, std::pow(1e6, -2 * eps * eps * (1 + eps) * 5), 1e-12);
  EXPECT_EQ(r.f, static_cast<std::size_t>(std::ceil(8 * (1 + eps) * 5 * ln)));
  EXPECT_GT(r.failure, r.term_iv);
  const auto same_n = v2prime_bound(1000001, 2, 2.0, 0.05, 10);
  EXPECT_NEAR(same_n.term_iv, v2_simplified_bound(1000001, 2, 2.0, 10).failure, 1e-15);
  EXPECT_GT(same_n.failure, v2_simplified_bound(1000001, 2, 2.0, 10).failure);
  EXPECT_THROW(v2prime_bound(1000, 2, 2.0, 1.0 / 12.0, 10), ValidationError);
}

TEST(V2Prime, TransferTermDecreasesWithS) {
  double prev = 2.0;
  for (std::size_t s = 1; s <= 6; ++s) {
    const double t = v2prime_bound(100001, s, 2.0, 0.05, 10).term_transfer;
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(V2pp, DeltaSup) {
  EXPECT_DOUBLE_EQ(v2pp_delta_sup(3.0), 2.0);
  EXPECT_THROW(v2pp_delta_sup(1.0), ValidationError);
}

TEST(OptimalU, ClosedForm) {
  const auto big = optimal_u_v2(1, 1000000);
  EXPECT_NEAR(big.u, 0.5, 1e-10);
  const auto r = optimal_u_v2(2, 10);
  const double a = std::cos(kPi / 10);
  EXPECT_NEAR(r.u, (a / 2) / (1 + a * a / 4), 1e-15);
  EXPECT_NEAR(r.exponent, -a * a / (4 * (4 + a * a)), 1e-15);
  for (std::size_t s = 1; s <= 20; ++s)
    for (int nu : {3, 4, 10, 100}) {
      const auto o = optimal_u_v2(s, nu);
      EXPECT_LE(std::abs(o.identity_residual), 1e-12);
      EXPECT_TRUE(o.strict_gap);
    }
}

TEST(V3, WorkedExample) {
  const auto best = minimize_v3_over_alpha(10000000000ULL, 10, 1.5e4, 10, 10);
  EXPECT_LE(best.bound, 0.5e-4);
  EXPECT_GT(best.alpha, 2 * std::sin(kPi / 20));
  EXPECT_LT(best.alpha, 1.0);
  // the minimizer is no worse than any grid point
  for (double al = 0.35; al < 0.99; al += 0.01)
    EXPECT_LE(best.bound, v3_failure_bound(10000000000ULL, 10, 1.5e4, 10, 10, al) * (1 + 1e-12));
}

TEST(V3, ExactFormula) {
  const double n = 1e6;
  const std::size_t s = 3;
  const double tau = 2000, alpha = 0.6;
  const int nu = 10, mu = 12;
  const double a2 = std::pow(std::cos(kPi / nu), 2);
  const double ap = alpha - 2 * std::sin(kPi / (2 * mu));
  const double c = 4 * (std::numbers::e - 2);
  const double ref = nu * std::pow(mu, 3.0) *
                     (3 * std::exp(-tau * a2 * ap * ap / (2 * a2 * ap * ap + c * 2)) +
                      (n - 3) * std::exp(-tau * a2 * (1 - alpha) * (1 - alpha) / (2 * a2 * (1 - alpha) * (1 - alpha) + c * 3)));
  EXPECT_NEAR(v3_failure_bound(1000000, s, tau, nu, mu, alpha) / ref, 1.0, 1e-13);
}

TEST(V3, SimplifiedFormula) {
  const double n = 1e8, C = 3.0;
  const std::size_t s = 4;
  const double tauN = (3 * 4 + 2) * C * std::log(n);
  const double alpha = 0.55;
  const int nu = 12, mu = 9;
  const double a2 = std::pow(std::cos(kPi / nu), 2);
  const double ap = alpha - 2 * std::sin(kPi / (2 * mu));
  const double ref = nu * std::pow(mu, 4.0) *
                     (4 * std::pow(n, -C * a2 * ap * ap) + std::pow(n, 1 - C * a2 * (1 - alpha) * (1 - alpha)));
  V3Options opt;
  opt.form = V3Form::simplified;
  EXPECT_NEAR(v3_failure_bound(100000000, s, tauN, nu, mu, alpha, opt) / ref, 1.0, 1e-11);
}

TEST(V3, SingletonFirstTerm) {
  const double tau = 300, alpha = 0.7;
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  const double c = 4 * (std::numbers::e - 2);
  const double second = 999 * std::exp(-tau * a2 * 0.09 / (2 * a2 * 0.09 + c));
  const double first = std::exp(-tau / 2);
  EXPECT_NEAR(v3_failure_bound(1000, 1, tau, 10, 10, alpha) / (10 * 10 * (first + second)), 1.0, 1e-12);
}

TEST(V3, DecreasingInTauN) {
  double prev = std::numeric_limits<double>::infinity();
  for (double tau = 100; tau < 5000; tau *= 1.5) {
    const double b = v3_failure_bound(100000, 3, tau, 10, 10, 0.6);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(V3, RejectsNonpositiveAlphaPrime) {
  EXPECT_THROW(v3_failure_bound(1000, 2, 100, 10, 10, 0.3, {}), ValidationError);
  EXPECT_THROW(v3_failure_bound(1000, 2, 100, 10, 3, 0.6, {}), ValidationError);
}

TEST(V3, NoCoprimeGate) { EXPECT_NO_THROW(v3_failure_bound(1000, 2, 100, 10, 10, 0.6)); }

TEST(Condition14, ClosedFormAndResidual) {
  for (double C : {1.5, 2.0, 4.0, 10.0, 100.0})
    for (int nu : {3, 5, 10, 100, 1000})
      for (int mu : {8, 10, 50, 1000}) {
        const double a2 = std::pow(std::cos(kPi / nu), 2);
        const double b = 1 - 2 * std::sin(kPi / (2 * mu));
        if (C * a2 * b * b <= 1) {
          EXPECT_THROW(condition14_alpha_prime(C, nu, mu), ValidationError);
          continue;
        }
        const double ap = condition14_alpha_prime(C, nu, mu);
        EXPECT_GT(ap, 0.0);
        EXPECT_LE(std::abs(condition14_residual(C, nu, mu, ap)), 1e-12);
        // the induced alpha equalizes the two simplified exponents
        const double alpha = ap + 2 * std::sin(kPi / (2 * mu));
        EXPECT_NEAR(C * a2 * ap * ap, C * a2 * (1 - alpha) * (1 - alpha) - 1, 1e-10);
      }
}

TEST(Condition14, DegenerateBoundary) {
  const int nu = 10, mu = 10;
  const double a2 = std::pow(std::cos(kPi / nu), 2);
  const double b = 1 - 2 * std::sin(kPi / (2 * mu));
  EXPECT_NEAR(condition14_alpha_prime(1.0 / (a2 * b * b), nu, mu), 0.0, 1e-12);
}

TEST(Condition14, Limit) {
  const double ap = condition14_alpha_prime(4.0, 1000000, 1000000);
  EXPECT_NEAR(ap, 0.375, 1e-5);
}

TEST(V3Statement, WorkedExample) {
  const std::uint64_t n = 10000000000ULL;
  const double C = v3_c_from_tauN(n, 10, 1.5e4);
  EXPECT_NEAR(C, 1.5e4 / (32 * std::log(1e10)), 1e-12);
  EXPECT_NEAR(C, 20.36, 5e-3);
  const auto r = v3_statement_bound(n, 10, C, 10, 10);
  EXPECT_LT(r.bound, 0.5e-4);
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  EXPECT_NEAR(r.bound, 10 * 1e10 * 11 * std::pow(1e10, -C * a2 * r.alpha_prime * r.alpha_prime), 1e-15);
}

TEST(V3Statement, NearOneIsVacuous) {
  const double a2 = std::pow(std::cos(kPi / 10), 2);
  const double b = 1 - 2 * std::sin(kPi / 20);
  const auto r = v3_statement_bound(100000, 2, 1.0 / (a2 * b * b) + 1e-6, 10, 10);
  EXPECT_TRUE(is_vacuous(r.bound));
}

TEST(AsymptoticDelta, Values) {
  EXPECT_EQ(asymptotic_delta(1.0), 0.0);
  EXPECT_DOUBLE_EQ(asymptotic_delta(4.0), 9.0 / 16.0);
  EXPECT_DOUBLE_EQ(asymptotic_delta(2.0), 1.0 / 8.0);
  EXPECT_THROW(asymptotic_delta(0.5), ValidationError);
}

TEST(SeriesCoefficient, Values) {
  EXPECT_NEAR(series_coefficient(1.0).coefficient, 4 * (std::numbers::e - 2), 1e-12);
  EXPECT_NEAR(series_coefficient(1.0).coefficient, 2.8731, 2e-3);
  EXPECT_NEAR(series_coefficient(0.763).coefficient, 2.6225, 2e-3);
  EXPECT_NEAR(series_coefficient(1e-8).coefficient, 2.0, 1e-7);
  EXPECT_NEAR(series_coefficient(1e-3).coefficient, 2.0 + 4e-3 / 6, 1e-6);
  EXPECT_THROW(series_coefficient(0.0), ValidationError);
  EXPECT_THROW(series_coefficient(1.01), ValidationError);
}

TEST(SeriesCoefficient, SelfConsistency) {
  EXPECT_TRUE(series_coefficient(1.0).self_consistent);
  EXPECT_TRUE(series_coefficient(0.763).self_consistent);
  EXPECT_FALSE(series_coefficient(0.5).self_consistent);
  const double xi = minimal_consistent_xi();
  EXPECT_NEAR(xi, 0.76269, 1e-4);
  EXPECT_LT(xi, 0.763);
}
