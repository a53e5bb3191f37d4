// Recover a 3-sparse signal on Z_101 from 40 random Fourier coefficients.

#include <cstdio>

#include "minext/minext.hpp"

int main() {
  using namespace minext;
  constexpr std::size_t n = 101;
  Rng rng(2024);
  const Signal x = random_sparse_signal(n, 3, CoefficientModel::complex_gaussian, rng);
  const FreqSet omega = sample(SamplerSpec::fixed(n, 40), rng);

  const auto iv = check_iv(build_kernel(omega), 3);
  const auto cert = dual_certificate_check(x, omega);
  const auto rec = verify_exact_recovery(x, omega);

  std::printf("support of x:        %s\n", to_json(support(x)).dump().c_str());
  std::printf("|Omega|:             %zu\n", omega.size());
  std::printf("condition (iv):      %s (margin %.4g)\n", iv.holds ? "holds" : "fails", iv.margin);
  std::printf("dual certificate:    %s (max off-support %.4g)\n", cert.holds ? "holds" : "fails",
              cert.interpolant_off_support);
  std::printf("solver:              %s after %zu iterations\n", to_string(rec.result.status), rec.result.iterations);
  std::printf("objective / ||x||_1: %.12g / %.12g\n", rec.result.objective, l1_norm(x));
  std::printf("max error:           %.3g -> %s\n", rec.error, rec.recovered ? "recovered" : "not recovered");
  return rec.recovered ? 0 : 1;
}
