#include "test_support.hpp"

#include <fftw3.h>

#include <cmath>
#include <vector>

namespace omniflow::testing {

Image power_law_image(int n, double beta, std::uint64_t seed) {
  const int half = n / 2 + 1;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(n) * half);
  double* field = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  for (int ky = 0; ky < n; ++ky) {
    const int fy = ky <= n / 2 ? ky : ky - n;
    for (int kx = 0; kx < half; ++kx) {
      const double f = std::hypot(static_cast<double>(kx), static_cast<double>(fy));
      const double amp = f == 0.0 ? 0.0 : std::pow(f, -beta / 2.0);
      fftw_complex& c = spec[static_cast<std::size_t>(ky) * half + kx];
      c[0] = amp * normal(gen);
      c[1] = amp * normal(gen);
    }
  }
  fftw_plan plan = fftw_plan_dft_c2r_2d(n, n, spec, field, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const std::size_t nn = static_cast<std::size_t>(n) * n;
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < nn; ++i) mean += field[i];
  mean /= static_cast<double>(nn);
  for (std::size_t i = 0; i < nn; ++i) sq += (field[i] - mean) * (field[i] - mean);
  const double sd = std::sqrt(sq / static_cast<double>(nn));
  Image img(n, n, 1);
  for (std::size_t i = 0; i < nn; ++i) {
    img.samples()[i] = static_cast<float>(128.0 + 30.0 * (field[i] - mean) / sd);
  }
  fftw_free(spec);
  fftw_free(field);
  return img;
}

}  // namespace omniflow::testing
