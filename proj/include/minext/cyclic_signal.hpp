#pragma once

// Signals on the cyclic group Z_n and their unitary Fourier transform.
//
// Time and frequency are two copies of Z_n. The pairing is
// <w, t> = e(w t / n) with e(u) = exp(2 pi i u), and both transforms carry
// the 1/sqrt(n) factor:
//
//   dft(x)(w)  = n^{-1/2} sum_t x(t) e(-t w / n)
//   idft(X)(t) = n^{-1/2} sum_w X(w) e(+t w / n)

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "minext/error.hpp"
#include "minext/fft.hpp"
#include "minext/random.hpp"

namespace minext {

using complex = std::complex<double>;

struct TimeDomain {
  static constexpr const char* name = "signal";
};
struct FrequencyDomain {
  static constexpr const char* name = "spectrum";
};

inline constexpr std::size_t kMaxOrder = 2147483647;  // 2^31 - 1

namespace detail {

inline void check_order(std::size_t n) {
  require(n >= 1, "group order must be positive");
  require(n <= kMaxOrder, "group order exceeds 2^31 - 1");
}

inline std::size_t reduce(long long r, std::size_t n) {
  const long long m = static_cast<long long>(n);
  long long v = r % m;
  if (v < 0) v += m;
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// A complex function on Z_n. Immutable once constructed.
template <class Domain>
class CyclicVector {
 public:
  explicit CyclicVector(std::vector<complex> values) : values_(std::move(values)) {
    detail::check_order(values_.size());
    for (const auto& v : values_)
      detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()),
                      std::string(Domain::name) + " entries must be finite");
  }

  static CyclicVector zeros(std::size_t n) {
    detail::check_order(n);
    return CyclicVector(std::vector<complex>(n));
  }

  static CyclicVector impulse(std::size_t n, std::size_t at, complex amplitude = 1.0) {
    std::vector<complex> v(n);
    detail::require(at < n, "impulse position out of range");
    v[at] = amplitude;
    return CyclicVector(std::move(v));
  }

  std::size_t n() const noexcept { return values_.size(); }
  std::span<const complex> values() const noexcept { return values_; }
  const std::vector<complex>& vector() const noexcept { return values_; }

  const complex& operator[](std::size_t i) const { return values_[i]; }

  /// Value at an arbitrary integer, read modulo n.
  const complex& at(long long residue) const { return values_[detail::reduce(residue, n())]; }

  friend CyclicVector operator+(const CyclicVector& a, const CyclicVector& b) {
    detail::require(a.n() == b.n(), "order mismatch");
    std::vector<complex> v(a.n());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return CyclicVector(std::move(v));
  }

  friend CyclicVector operator-(const CyclicVector& a, const CyclicVector& b) {
    detail::require(a.n() == b.n(), "order mismatch");
    std::vector<complex> v(a.n());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return CyclicVector(std::move(v));
  }

  friend CyclicVector operator*(complex c, const CyclicVector& a) {
    std::vector<complex> v(a.values_);
    for (auto& e : v) e *= c;
    return CyclicVector(std::move(v));
  }

  friend bool operator==(const CyclicVector&, const CyclicVector&) = default;

 private:
  std::vector<complex> values_;
};

using Signal = CyclicVector<TimeDomain>;
using Spectrum = CyclicVector<FrequencyDomain>;

/// A subset of Z_n stored as a strictly increasing list of residues.
template <class Domain>
class ResidueSet {
 public:
  ResidueSet(std::size_t n, std::vector<std::size_t> members) : n_(n), members_(std::move(members)) {
    detail::check_order(n_);
    std::sort(members_.begin(), members_.end());
    detail::require(std::adjacent_find(members_.begin(), members_.end()) == members_.end(),
                    "set members must be distinct");
    detail::require(members_.empty() || members_.back() < n_, "set member out of range");
    mask_.assign(n_, 0);
    for (auto m : members_) mask_[m] = 1;
  }

  static ResidueSet full(std::size_t n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return ResidueSet(n, std::move(all));
  }

  static ResidueSet empty_set(std::size_t n) { return ResidueSet(n, {}); }

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<std::size_t>& members() const noexcept { return members_; }
  bool contains(std::size_t r) const { return r < n_ && mask_[r] != 0; }

  ResidueSet complement() const {
    std::vector<std::size_t> rest;
    rest.reserve(n_ - members_.size());
    for (std::size_t r = 0; r < n_; ++r)
      if (!mask_[r]) rest.push_back(r);
    return ResidueSet(n_, std::move(rest));
  }

  ResidueSet translated(long long shift) const {
    std::vector<std::size_t> moved;
    moved.reserve(members_.size());
    for (auto m : members_) moved.push_back(detail::reduce(static_cast<long long>(m) + shift, n_));
    return ResidueSet(n_, std::move(moved));
  }

  /// Union with another subset of the same group.
  ResidueSet united(const ResidueSet& other) const {
    detail::require(other.n_ == n_, "order mismatch");
    std::vector<std::size_t> out;
    std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                   std::back_inserter(out));
    return ResidueSet(n_, std::move(out));
  }

  friend bool operator==(const ResidueSet& a, const ResidueSet& b) {
    return a.n_ == b.n_ && a.members_ == b.members_;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> members_;
  std::vector<char> mask_;
};

using SupportSet = ResidueSet<TimeDomain>;
using FreqSet = ResidueSet<FrequencyDomain>;

// ---------------------------------------------------------------------------
// Transforms

namespace detail {

inline std::vector<complex> unitary(std::vector<complex> data, bool inverse) {
  const auto& plan = plan_for(data.size());
  if (inverse)
    plan.inverse(data);
  else
    plan.forward(data);
  const double scale = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& v : data) v *= scale;
  return data;
}

}  // namespace detail

inline Spectrum dft(const Signal& x) { return Spectrum(detail::unitary(x.vector(), false)); }

inline Signal idft(const Spectrum& X) { return Signal(detail::unitary(X.vector(), true)); }

// ---------------------------------------------------------------------------
// Norms and supports

template <class Domain>
double l2_norm(const CyclicVector<Domain>& v) {
  double acc = 0.0;
  for (const auto& e : v.values()) acc += std::norm(e);
  return std::sqrt(acc);
}

template <class Domain>
double max_modulus(const CyclicVector<Domain>& v) {
  double m = 0.0;
  for (const auto& e : v.values()) m = std::max(m, std::abs(e));
  return m;
}

/// sum_t |x(t)|.
inline double l1_norm(const Signal& x) {
  double acc = 0.0;
  for (const auto& e : x.values()) acc += std::abs(e);
  return acc;
}

/// Wiener-algebra norm of a spectrum: the l1 norm of its inverse transform.
inline double a_norm(const Spectrum& X) { return l1_norm(idft(X)); }

/// {t : |x(t)| > tol}, tol absolute.
inline SupportSet support(const Signal& x, double tol) {
  detail::require(tol >= 0.0, "support tolerance must be nonnegative");
  std::vector<std::size_t> s;
  for (std::size_t t = 0; t < x.n(); ++t)
    if (std::abs(x[t]) > tol) s.push_back(t);
  return SupportSet(x.n(), std::move(s));
}

inline constexpr double kDefaultRelativeSupportTol = 1e-8;

/// Support with the default threshold, 1e-8 times the largest modulus.
inline SupportSet support(const Signal& x) {
  return support(x, kDefaultRelativeSupportTol * max_modulus(x));
}

// ---------------------------------------------------------------------------
// Test vectors

/// k distinct residues of Z_n, uniformly among k-subsets (partial
/// Fisher-Yates), returned sorted.
inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng) {
  detail::require(k <= n, "subset larger than the group");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

enum class CoefficientModel { unit_phase, complex_gaussian };

/// s-sparse signal with uniformly random support and coefficients drawn
/// from `model`. Gaussian coefficients are redrawn in the (measure-zero)
/// event of an exact zero so the support has exactly s points.
inline Signal random_coefficients_on(const SupportSet& support, CoefficientModel model, Rng& rng) {
  std::vector<complex> v(support.n());
  for (auto t : support.members()) {
    complex c;
    do {
      c = model == CoefficientModel::unit_phase ? rng.unit_phase() : rng.complex_normal();
    } while (c == complex{});
    v[t] = c;
  }
  return Signal(std::move(v));
}

inline Signal random_sparse_signal(std::size_t n, std::size_t s, CoefficientModel model, Rng& rng) {
  detail::check_order(n);
  detail::require(s >= 1, "sparsity must be positive");
  detail::require(s <= n, "sparsity exceeds the group order");
  const SupportSet S(n, random_subset(n, s, rng));
  return random_coefficients_on(S, model, rng);
}

}  // namespace minext
