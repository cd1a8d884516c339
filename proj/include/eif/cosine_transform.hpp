#pragma once

#include "eif/error.hpp"

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace eif {

namespace detail {

struct fftw_plan_deleter {
  void operator()(fftw_plan_s* plan) const noexcept { fftw_destroy_plan(plan); }
};

using unique_fftw_plan = std::unique_ptr<fftw_plan_s, fftw_plan_deleter>;

// FFTW planning is not thread-safe; execution of an existing plan on fresh
// arrays (fftw_execute_r2r) is. Plans are created once per length under a
// lock and live for the rest of the process.
inline fftw_plan redft10_plan(std::size_t length) {
  static std::mutex mutex;
  static std::map<std::size_t, unique_fftw_plan> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(length);
  if (it != cache.end()) return it->second.get();
  std::vector<double> in(length), out(length);
  fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(length), in.data(), out.data(), FFTW_REDFT10,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) fail(errc::invalid_argument, "cannot plan cosine transform of length " + std::to_string(length));
  return cache.emplace(length, unique_fftw_plan(plan)).first->second.get();
}

}  // namespace detail

/// Unnormalized type-II cosine transform of length m:
///   out[k] = sum_{j<m} x[j] cos(pi (2j+1) k / (2m)),  k = 0..m-1,
/// where inputs shorter than m are zero-padded. O(m log m) via FFTW's REDFT10
/// (which computes twice this sum).
class cosine_transform {
 public:
  explicit cosine_transform(std::size_t length) : length_(length), plan_(detail::redft10_plan(length)) {}

  std::size_t length() const noexcept { return length_; }

  // `scratch` must hold 2*length doubles; it is the per-call workspace that
  // keeps the transform reentrant.
  void apply(std::span<const double> in, std::span<double> out, std::span<double> scratch) const {
    double* padded = scratch.data();
    double* result = scratch.data() + length_;
    std::size_t j = 0;
    for (; j < in.size(); ++j) padded[j] = in[j];
    for (; j < length_; ++j) padded[j] = 0.0;
    fftw_execute_r2r(plan_, padded, result);
    for (std::size_t k = 0; k < length_; ++k) out[k] = 0.5 * result[k];
  }

 private:
  std::size_t length_;
  fftw_plan plan_;
};

}  // namespace eif
