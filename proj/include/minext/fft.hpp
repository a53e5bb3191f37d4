#pragma once

// Unnormalized discrete Fourier transform of arbitrary length.
//
//   forward: X[k] = sum_t x[t] exp(-2 pi i k t / n)
//   inverse: x[t] = sum_k X[k] exp(+2 pi i k t / n)
//
// Powers of two use an iterative radix-2 transform, short lengths a direct
// sum over a twiddle table, and everything else Bluestein's chirp-z
// reduction to a power-of-two cyclic convolution.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

namespace minext {

class DftPlan {
 public:
  using complex = std::complex<double>;

  static constexpr std::size_t kDirectLimit = 32;

  explicit DftPlan(std::size_t n) : n_(n) {
    if (n_ == 0) return;
    if (is_pow2(n_)) {
      kind_ = Kind::radix2;
      init_radix2(n_, bitrev_, twiddle_);
    } else if (n_ <= kDirectLimit) {
      kind_ = Kind::direct;
      twiddle_.resize(n_);
      for (std::size_t k = 0; k < n_; ++k) twiddle_[k] = root(k, n_);
    } else {
      kind_ = Kind::bluestein;
      init_bluestein();
    }
  }

  std::size_t size() const noexcept { return n_; }

  /// In-place forward transform (negative exponent).
  void forward(std::span<complex> data) const { transform(data); }

  /// In-place inverse transform (positive exponent), unnormalized.
  void inverse(std::span<complex> data) const {
    for (auto& v : data) v = std::conj(v);
    transform(data);
    for (auto& v : data) v = std::conj(v);
  }

 private:
  enum class Kind { direct, radix2, bluestein };

  static bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

  // exp(-2 pi i k / n) with k reduced to keep the argument small.
  static complex root(std::uint64_t k, std::uint64_t n) {
    k %= n;
    return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }

  static void init_radix2(std::size_t m, std::vector<std::size_t>& bitrev, std::vector<complex>& tw) {
    bitrev.assign(m, 0);
    std::size_t log2m = 0;
    while ((std::size_t{1} << log2m) < m) ++log2m;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < log2m; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2m - 1 - b);
      bitrev[i] = r;
    }
    tw.resize(m / 2 + 1);
    for (std::size_t k = 0; k < tw.size(); ++k) tw[k] = root(k, m);
  }

  static void radix2(std::span<complex> a, const std::vector<std::size_t>& bitrev,
                     const std::vector<complex>& tw) {
    const std::size_t m = a.size();
    for (std::size_t i = 0; i < m; ++i)
      if (i < bitrev[i]) std::swap(a[i], a[bitrev[i]]);
    for (std::size_t len = 2; len <= m; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = m / len;
      for (std::size_t start = 0; start < m; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const complex u = a[start + j];
          const complex v = a[start + j + half] * tw[j * stride];
          a[start + j] = u + v;
          a[start + j + half] = u - v;
        }
      }
    }
  }

  void init_bluestein() {
    std::size_t m = 1;
    while (m < 2 * n_ - 1) m <<= 1;
    m_ = m;
    init_radix2(m_, bitrev_, twiddle_);
    // chirp[k] = exp(-pi i k^2 / n); k^2 is reduced mod 2n before the
    // trigonometric evaluation.
    chirp_.resize(n_);
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::uint64_t kk = (static_cast<std::uint64_t>(k) * k) % two_n;
      chirp_[k] = std::polar(1.0, -std::numbers::pi * static_cast<double>(kk) / static_cast<double>(n_));
    }
    filter_.assign(m_, complex{});
    filter_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
      filter_[k] = std::conj(chirp_[k]);
      filter_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2(filter_, bitrev_, twiddle_);
  }

  void transform(std::span<complex> data) const {
    switch (kind_) {
      case Kind::radix2:
        radix2(data, bitrev_, twiddle_);
        return;
      case Kind::direct: {
        std::vector<complex> out(n_);
        for (std::size_t k = 0; k < n_; ++k) {
          complex acc{};
          std::size_t idx = 0;
          for (std::size_t t = 0; t < n_; ++t) {
            acc += data[t] * twiddle_[idx];
            idx += k;
            if (idx >= n_) idx -= n_;
          }
          out[k] = acc;
        }
        std::copy(out.begin(), out.end(), data.begin());
        return;
      }
      case Kind::bluestein: {
        std::vector<complex> work(m_, complex{});
        for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * chirp_[k];
        radix2(work, bitrev_, twiddle_);
        for (std::size_t k = 0; k < m_; ++k) work[k] *= filter_[k];
        // inverse radix-2 through conjugation
        for (auto& v : work) v = std::conj(v);
        radix2(work, bitrev_, twiddle_);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) data[k] = std::conj(work[k]) * scale * chirp_[k];
        return;
      }
    }
  }

  std::size_t n_;
  std::size_t m_ = 0;
  Kind kind_ = Kind::direct;
  std::vector<std::size_t> bitrev_;
  std::vector<complex> twiddle_;
  std::vector<complex> chirp_;
  std::vector<complex> filter_;
};

/// Per-thread plan cache keyed by length.
inline const DftPlan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<DftPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DftPlan>(n);
  return *slot;
}

}  // namespace minext
