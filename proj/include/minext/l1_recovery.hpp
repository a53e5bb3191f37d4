#pragma once

// Recovery of a signal from the restriction of its spectrum to Omega by
// l1-minimal extension:
//
//   minimize ||y||_1  subject to  dft(y)(w) = samples(w) for w in Omega.
//
// The solver is Douglas-Rachford splitting between the l1 norm (complex
// soft-thresholding) and the affine constraint set (exact projection: the
// Omega coefficients are overwritten in the frequency domain).
//
// Also here: the exact dual-certificate test, a heuristic falsifier for the
// nullspace condition and a brute-force oracle for tiny instances.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"
#include "minext/kernel_certificate.hpp"
#include "minext/random.hpp"

namespace minext {

struct RecoveryProblem {
  std::size_t n = 0;
  FreqSet omega;
  std::vector<complex> samples;  // samples[j] is the coefficient at omega.members()[j]

  void validate() const {
    detail::check_order(n);
    detail::require(omega.n() == n, "omega order differs from problem order");
    detail::require(samples.size() == omega.size(), "one sample per frequency in omega is required");
    for (const auto& v : samples)
      detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()), "samples must be finite");
  }

  /// The data dft(x) restricted to omega.
  static RecoveryProblem from_signal(const Signal& x, const FreqSet& omega) {
    detail::require(x.n() == omega.n(), "signal and omega orders differ");
    const auto X = dft(x);
    std::vector<complex> samples;
    samples.reserve(omega.size());
    for (auto w : omega.members()) samples.push_back(X[w]);
    return RecoveryProblem{x.n(), omega, std::move(samples)};
  }
};

struct SolverConfig {
  std::size_t max_iterations = 50000;
  double constraint_tol = 1e-9;
  double change_tol = 1e-9;
  double relaxation = 1.0;  // in (0, 2)
  double step = 1.0;        // threshold, relative to the largest modulus of the zero-filled extension

  void validate() const {
    detail::require(max_iterations >= 1, "max_iterations must be positive");
    detail::require(constraint_tol > 0.0 && change_tol > 0.0, "tolerances must be positive");
    detail::require(relaxation > 0.0 && relaxation < 2.0, "relaxation must lie in (0,2)");
    detail::require(step > 0.0, "step must be positive");
  }
};

enum class SolverStatus { converged, iteration_cap, diverged };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged:
      return "converged";
    case SolverStatus::iteration_cap:
      return "iteration_cap";
    case SolverStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

struct RecoveryResult {
  Signal minimizer;
  double objective = 0.0;
  double constraint_residual = 0.0;
  std::size_t iterations = 0;
  SolverStatus status = SolverStatus::iteration_cap;
};

namespace detail {

/// Complex soft-threshold y -> y max(0, 1 - theta/|y|), 0 at y = 0.
inline complex soft_threshold(complex y, double theta) {
  const double m = std::abs(y);
  if (m <= theta) return {};
  return y * (1.0 - theta / m);
}

/// Frequency-domain helper for the affine set {y : dft(y)|_Omega = samples}.
class AffineProjector {
 public:
  explicit AffineProjector(const RecoveryProblem& prob)
      : prob_(prob), plan_(plan_for(prob.n)), scale_(1.0 / std::sqrt(static_cast<double>(prob.n))) {}

  /// In-place projection of v onto the affine set.
  void project(std::vector<complex>& v) const {
    to_frequency(v);
    const auto& m = prob_.omega.members();
    for (std::size_t j = 0; j < m.size(); ++j) v[m[j]] = prob_.samples[j];
    to_time(v);
  }

  /// idft of the zero-filled samples: the minimum-energy feasible point.
  std::vector<complex> zero_filled() const {
    std::vector<complex> v(prob_.n);
    const auto& m = prob_.omega.members();
    for (std::size_t j = 0; j < m.size(); ++j) v[m[j]] = prob_.samples[j];
    to_time(v);
    return v;
  }

  double residual(std::vector<complex> v) const {
    to_frequency(v);
    double r = 0.0;
    const auto& m = prob_.omega.members();
    for (std::size_t j = 0; j < m.size(); ++j) r = std::max(r, std::abs(v[m[j]] - prob_.samples[j]));
    return r;
  }

 private:
  void to_frequency(std::vector<complex>& v) const {
    plan_.forward(v);
    for (auto& e : v) e *= scale_;
  }
  void to_time(std::vector<complex>& v) const {
    plan_.inverse(v);
    for (auto& e : v) e *= scale_;
  }

  const RecoveryProblem& prob_;
  const DftPlan& plan_;
  double scale_;
};

inline double l1_of(const std::vector<complex>& v) {
  double acc = 0.0;
  for (const auto& e : v) acc += std::abs(e);
  return acc;
}

}  // namespace detail

inline RecoveryResult basis_pursuit(const RecoveryProblem& prob, const SolverConfig& cfg = {}) {
  prob.validate();
  cfg.validate();
  detail::require(!prob.omega.empty(), "omega must be non-empty");
  const detail::AffineProjector proj(prob);
  std::vector<complex> z = proj.zero_filled();

  // The constraint pins every coefficient: the feasible set is one point.
  if (prob.omega.size() == prob.n) {
    const double res = proj.residual(z);
    const double obj = detail::l1_of(z);
    return RecoveryResult{Signal(std::move(z)), obj, res, 1, SolverStatus::converged};
  }

  double scale = 0.0;
  for (const auto& e : z) scale = std::max(scale, std::abs(e));
  if (scale == 0.0) {
    return RecoveryResult{Signal(std::move(z)), 0.0, proj.residual(std::vector<complex>(prob.n)), 0,
                          SolverStatus::converged};
  }
  const double theta = cfg.step * scale;
  const double change_limit = cfg.change_tol * std::max(1.0, scale);
  const std::size_t n = prob.n;

  std::vector<complex> y(n), w(n);
  SolverStatus status = SolverStatus::iteration_cap;
  std::size_t it = 0;
  while (it < cfg.max_iterations) {
    ++it;
    y = z;
    proj.project(y);
    double change = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      w[t] = detail::soft_threshold(2.0 * y[t] - z[t], theta);
      const complex d = w[t] - y[t];
      z[t] += cfg.relaxation * d;
      change = std::max(change, std::abs(d));
    }
    if (!std::isfinite(change)) {
      status = SolverStatus::diverged;
      break;
    }
    if (change <= change_limit) {
      status = SolverStatus::converged;
      break;
    }
  }
  const double obj = detail::l1_of(y);
  if (!std::isfinite(obj)) {
    status = SolverStatus::diverged;
    return RecoveryResult{Signal::zeros(n), obj, std::numeric_limits<double>::infinity(), it, status};
  }
  const double res = proj.residual(y);
  if (status == SolverStatus::converged && !(res <= cfg.constraint_tol)) status = SolverStatus::iteration_cap;
  return RecoveryResult{Signal(std::move(y)), obj, res, it, status};
}

inline constexpr double kDefaultRecoveryTol = 1e-6;

struct RecoveryCheck {
  bool recovered = false;
  double error = 0.0;  // max_t |minimizer(t) - x(t)|
  RecoveryResult result;
};

/// Solve from dft(x)|_Omega and compare the minimizer with x.
inline RecoveryCheck verify_exact_recovery(const Signal& x, const FreqSet& omega, const SolverConfig& cfg = {},
                                           double tol = kDefaultRecoveryTol) {
  auto result = basis_pursuit(RecoveryProblem::from_signal(x, omega), cfg);
  double err = 0.0;
  for (std::size_t t = 0; t < x.n(); ++t) err = std::max(err, std::abs(result.minimizer[t] - x[t]));
  const bool ok = result.status == SolverStatus::converged && err <= tol;
  return RecoveryCheck{ok, err, std::move(result)};
}

// ---------------------------------------------------------------------------
// Dual certificate

inline constexpr double kRankTol = 1e-10;

struct DualCertificateCheck {
  bool holds = false;
  SupportSet support;
  /// Kernel certificate with lambda = sign(x), and whether some alpha
  /// satisfies both strict bounds for it.
  CertificateMargins kernel_margins;
  bool kernel_admits_alpha = false;
  /// Smallest eigenvalue of the normalized Gram matrix [K(t - t')/K(0)]_{t,t' in S}.
  double gram_min_eigenvalue = 0.0;
  bool full_column_rank = false;
  /// Exact interpolant p = sign(x) on S, band-limited to Omega.
  double interpolation_residual = 0.0;  // max_S |p - sign(x)|
  double interpolant_off_support = std::numeric_limits<double>::infinity();  // max_{G\S} |p|
};

/// Sound sufficient test for x being the unique l1-minimal extension.
///
/// The kernel certificate p = sum lambda(t') K(t - t')/K(0) with
/// lambda = sign(x) only approximates sign(x) on S. The decision solves for
/// coefficients c on S so that p = sum c(t') K(t - t')/K(0) equals sign(x)
/// exactly on S (this needs the Fourier submatrix restricted to Omega x S to
/// have full column rank) and then requires |p| < 1 strictly off S.
inline DualCertificateCheck dual_certificate_check(const Signal& x, const FreqSet& omega) {
  detail::require(x.n() == omega.n(), "signal and omega orders differ");
  detail::require(max_modulus(x) > 0.0, "dual certificate needs a nonzero signal");
  const Kernel k = build_kernel(omega);
  DualCertificateCheck out{false, support(x), {}, false, 0.0, false, 0.0,
                           std::numeric_limits<double>::infinity()};
  const auto& S = out.support;
  const std::size_t s = S.size();
  std::vector<complex> sign(s);
  for (std::size_t j = 0; j < s; ++j) {
    const complex v = x[S.members()[j]];
    sign[j] = v / std::abs(v);
  }
  const auto kc = build_certificate(S, sign, k);
  out.kernel_margins = kc.margins;
  out.kernel_admits_alpha = kc.admits_alpha();

  Eigen::MatrixXcd gram(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      gram(i, j) = k.at(static_cast<long long>(S.members()[i]) - static_cast<long long>(S.members()[j])) / k.k0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  out.gram_min_eigenvalue = s == 0 ? 1.0 : eig.eigenvalues().minCoeff();
  out.full_column_rank = s <= omega.size() && out.gram_min_eigenvalue > kRankTol;
  if (!out.full_column_rank) return out;

  Eigen::VectorXcd rhs(s);
  for (std::size_t j = 0; j < s; ++j) rhs(j) = sign[j];
  const Eigen::VectorXcd c = gram.llt().solve(rhs);
  std::vector<complex> coeff(c.data(), c.data() + s);
  const auto p = detail::synthesize(k, S, coeff);
  const auto m = detail::margins_of(p, S, sign);
  out.interpolation_residual = m.on_support;
  out.interpolant_off_support = m.off_support;
  out.holds = m.off_support < 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Nullspace condition: sup of ||z_S||_1 - ||z_{G\S}||_1 over unit-l2 z with
// dft(z)|_Omega = 0. A negative value is evidence for the condition; a
// positive value refutes it.

namespace detail {

/// z = idft of coefficients placed on the free frequencies.
inline std::vector<complex> embed_free(const std::vector<std::size_t>& free, const std::vector<complex>& c,
                                       std::size_t n) {
  std::vector<complex> v(n);
  for (std::size_t j = 0; j < free.size(); ++j) v[free[j]] = c[j];
  return idft(Spectrum(std::move(v))).vector();
}

inline double excess_of(const std::vector<complex>& z, const SupportSet& S) {
  double acc = 0.0;
  for (std::size_t t = 0; t < z.size(); ++t) acc += S.contains(t) ? std::abs(z[t]) : -std::abs(z[t]);
  return acc;
}

inline void normalize(std::vector<complex>& c) {
  double nrm = 0.0;
  for (const auto& e : c) nrm += std::norm(e);
  nrm = std::sqrt(nrm);
  for (auto& e : c) e /= nrm;
}

}  // namespace detail

inline double nullspace_excess(const SupportSet& S, const FreqSet& omega, std::size_t restarts, Rng& rng,
                               std::size_t iterations = 300) {
  detail::require(S.n() == omega.n(), "support and omega orders differ");
  const std::size_t n = omega.n();
  const auto free = omega.complement().members();
  if (free.empty()) return -std::numeric_limits<double>::infinity();
  const std::size_t d = free.size();

  double best = -std::numeric_limits<double>::infinity();
  std::vector<complex> grad_t(n);
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::vector<complex> c(d);
    for (auto& e : c) e = rng.complex_normal();
    detail::normalize(c);
    for (std::size_t it = 0; it <= iterations; ++it) {
      const auto z = detail::embed_free(free, c, n);
      best = std::max(best, detail::excess_of(z, S));
      if (it == iterations) break;
      // supergradient in time, pulled back to the free coefficients
      for (std::size_t t = 0; t < n; ++t) {
        const double m = std::abs(z[t]);
        const complex u = m > 0.0 ? z[t] / m : complex{};
        grad_t[t] = S.contains(t) ? u : -u;
      }
      const auto G = dft(Signal(grad_t));
      std::vector<complex> g(d);
      complex radial{};
      for (std::size_t j = 0; j < d; ++j) {
        g[j] = G[free[j]];
        radial += std::conj(c[j]) * g[j];
      }
      const double step = 0.5 / std::sqrt(static_cast<double>(it + 1));
      for (std::size_t j = 0; j < d; ++j) c[j] += step * (g[j] - std::real(radial) * c[j]);
      detail::normalize(c);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for the optimal value on tiny instances.

inline constexpr std::size_t kOracleMaxFreeDimension = 6;

struct OracleConfig {
  std::size_t restarts = 1000;
  std::uint64_t seed = 0x6f7261636c65ULL;
  double final_smoothing = 1e-10;  // relative to the signal scale
  std::size_t newton_iterations = 60;
};

struct OracleResult {
  double objective = 0.0;
  Signal minimizer;
};

/// Minimizes ||x + z||_1 over z with dft(z)|_Omega = 0 by multi-start
/// damped Newton descent on the smoothed objective sum sqrt(|y|^2 + eta^2),
/// with eta driven to zero; coordinates are the real and imaginary parts of
/// the free frequency coefficients. Independent of basis_pursuit.
inline OracleResult oracle_min_l1(const Signal& x, const FreqSet& omega, const OracleConfig& cfg = {}) {
  detail::require(x.n() == omega.n(), "signal and omega orders differ");
  const std::size_t n = x.n();
  const auto free = omega.complement().members();
  if (free.size() > kOracleMaxFreeDimension)
    throw GuardError("oracle requires n - |omega| <= " + std::to_string(kOracleMaxFreeDimension));
  if (free.empty() || max_modulus(x) == 0.0) return OracleResult{l1_norm(x), x};

  const std::size_t dim = 2 * free.size();
  // y = x + V r with V = A + iB; columns are the real and imaginary unit
  // directions of each free coefficient
  Eigen::MatrixXd A(n, dim), B(n, dim);
  const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < free.size(); ++j) {
    for (std::size_t t = 0; t < n; ++t) {
      const double arg = 2.0 * std::numbers::pi * static_cast<double>((free[j] * t) % n) / static_cast<double>(n);
      const double c = inv_root_n * std::cos(arg), sn = inv_root_n * std::sin(arg);
      A(t, 2 * j) = c;
      B(t, 2 * j) = sn;
      A(t, 2 * j + 1) = -sn;
      B(t, 2 * j + 1) = c;
    }
  }
  Eigen::VectorXd xr(n), xi(n);
  for (std::size_t t = 0; t < n; ++t) {
    xr(t) = x[t].real();
    xi(t) = x[t].imag();
  }
  const double scale = std::max(max_modulus(x), 1e-300);

  auto smoothed = [&](const Eigen::VectorXd& r, double eta) {
    const Eigen::ArrayXd yr = (xr + A * r).array(), yi = (xi + B * r).array();
    return (yr.square() + yi.square() + eta * eta).sqrt().sum();
  };
  auto exact = [&](const Eigen::VectorXd& r) { return smoothed(r, 0.0); };

  auto descend = [&](Eigen::VectorXd r) {
    for (double eta = 0.1 * scale; eta >= cfg.final_smoothing * scale * 0.999; eta *= 0.1) {
      for (std::size_t it = 0; it < cfg.newton_iterations; ++it) {
        const Eigen::VectorXd yr = xr + A * r, yi = xi + B * r;
        const Eigen::ArrayXd h = (yr.array().square() + yi.array().square() + eta * eta).sqrt();
        const Eigen::ArrayXd ih = h.inverse();
        const Eigen::VectorXd g = A.transpose() * (yr.array() * ih).matrix() + B.transpose() * (yi.array() * ih).matrix();
        if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, scale)) break;
        // rows a_t = yr_t A_t + yi_t B_t
        const Eigen::MatrixXd C = yr.asDiagonal() * A + yi.asDiagonal() * B;
        Eigen::MatrixXd H = A.transpose() * ih.matrix().asDiagonal() * A + B.transpose() * ih.matrix().asDiagonal() * B -
                            C.transpose() * ih.cube().matrix().asDiagonal() * C;
        H.diagonal().array() += 1e-14 * H.diagonal().maxCoeff() + 1e-300;
        Eigen::VectorXd step = -H.ldlt().solve(g);
        if (!step.allFinite() || g.dot(step) >= 0.0) step = -g;
        const double f0 = smoothed(r, eta);
        double alpha = 1.0;
        bool moved = false;
        double f1 = f0;
        while (alpha > 1e-12) {
          const Eigen::VectorXd cand = r + alpha * step;
          f1 = smoothed(cand, eta);
          if (f1 <= f0 + 1e-4 * alpha * g.dot(step)) {
            r = cand;
            moved = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!moved || f0 - f1 <= 1e-15 * f0) break;
      }
    }
    return r;
  };

  Rng rng(cfg.seed);
  Eigen::VectorXd best_r = Eigen::VectorXd::Zero(dim);
  double best = exact(best_r);
  const double spread = l2_norm(x) / std::sqrt(static_cast<double>(dim)) + scale;
  for (std::size_t rs = 0; rs < std::max<std::size_t>(cfg.restarts, 1); ++rs) {
    Eigen::VectorXd r0(dim);
    if (rs == 0) {
      r0.setZero();
    } else {
      for (std::size_t k = 0; k < dim; ++k) r0(k) = spread * rng.normal();
    }
    const Eigen::VectorXd r = descend(r0);
    const double f = exact(r);
    if (f < best) {
      best = f;
      best_r = r;
    }
  }
  const Eigen::VectorXd yr = xr + A * best_r, yi = xi + B * best_r;
  std::vector<complex> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = {yr(t), yi(t)};
  return OracleResult{best, Signal(std::move(out))};
}

}  // namespace minext
