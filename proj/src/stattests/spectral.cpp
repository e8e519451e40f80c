#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {
namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Outcome dft_spectral(BitView bits) {
  detail::require_length(bits, 1000, "dft_spectral");
  const std::size_t n = bits.size();
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in.get()[i] = bits[i] ? 1.0 : -1.0;
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double nd = double(n);
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
  std::size_t below = 0;
  for (std::size_t k = 0; k < n / 2; ++k)
    below += std::hypot(out.get()[k][0], out.get()[k][1]) < threshold;

  const double expected = 0.95 * nd / 2.0;
  const double d = (double(below) - expected) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
  return {d, erfc(std::abs(d) / std::numbers::sqrt2)};
}

}  // namespace qrng::stattests
