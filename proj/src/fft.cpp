#include "convbeers/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "convbeers/error.hpp"

namespace convbeers {
namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

ComplexGrid fft2(const ComplexGrid& input, int width, int height, FftDirection dir) {
  require(width > 0 && height > 0 &&
              input.size() == static_cast<std::size_t>(width) * height,
          ErrorCode::dimension_mismatch, "fft2: grid size mismatch");
  // fftw_malloc guarantees SIMD alignment, so the codelets FFTW picks (and
  // hence the rounding) do not depend on where std::vector happened to land.
  const std::size_t n = input.size();
  struct Buffer {
    fftw_complex* p;
    explicit Buffer(std::size_t n) : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
    ~Buffer() { fftw_free(p); }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
  };
  Buffer in(n), out_buf(n);
  require(in.p && out_buf.p, ErrorCode::numerical, "fft2: allocation failed");
  std::memcpy(in.p, input.data(), sizeof(fftw_complex) * n);
  fftw_complex* pin = in.p;
  fftw_complex* pout = out_buf.p;
  fftw_plan plan;
  {
    // The FFTW planner is not re-entrant.
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(height, width, pin, pout,
                            dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorCode::numerical, "fft2: planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  ComplexGrid out(n);
  std::memcpy(static_cast<void*>(out.data()), out_buf.p, sizeof(fftw_complex) * n);
  return out;
}

}  // namespace convbeers
