#pragma once

#include "eif/error.hpp"
#include "eif/image.hpp"
#include "eif/pursuit.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace eif {

/// 10 log10(peak^2 / mse); +infinity when mse is zero.
inline double psnr_from_mse(double mse, double peak) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

inline double psnr(const gray_image& a, const gray_image& b) {
  if (a.width != b.width || a.height != b.height || a.bitdepth != b.bitdepth)
    fail(errc::shape_mismatch, "PSNR needs images of equal size and bit depth");
  if (a.samples.empty()) fail(errc::undefined, "PSNR of empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - static_cast<double>(b.samples[i]);
    sum += d * d;
  }
  return psnr_from_mse(sum / static_cast<double>(a.samples.size()), static_cast<double>(a.max_value()));
}

/// PSNR of a real-valued approximation (row-major, same layout as the image).
inline double psnr(const gray_image& reference, std::span<const double> approximation) {
  if (approximation.size() != reference.samples.size()) fail(errc::shape_mismatch, "PSNR operands differ in size");
  if (approximation.empty()) fail(errc::undefined, "PSNR of empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < approximation.size(); ++i) {
    const double d = static_cast<double>(reference.samples[i]) - approximation[i];
    sum += d * d;
  }
  return psnr_from_mse(sum / static_cast<double>(approximation.size()), static_cast<double>(reference.max_value()));
}

/// Total pixels over total coefficients.
inline double sparsity_ratio(std::size_t total_pixels, std::size_t total_coefficients) {
  if (total_coefficients == 0) fail(errc::undefined, "sparsity ratio with zero coefficients");
  return static_cast<double>(total_pixels) / static_cast<double>(total_coefficients);
}

inline double sparsity_ratio(std::span<const sparse_rep> reps) {
  std::size_t pixels = 0, coeffs = 0;
  for (const sparse_rep& rep : reps) {
    pixels += rep.block_side() * rep.block_side();
    coeffs += rep.size();
  }
  return sparsity_ratio(pixels, coeffs);
}

}  // namespace eif
