#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "iris/error.hpp"
#include "iris/types.hpp"

namespace iris {

struct Histogram {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;

  /// Cumulative count of levels <= g.
  std::array<std::uint64_t, 256> cumulative() const;

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

// PGM (P5, maxval <= 255).
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

Histogram compute_histogram(const GrayImage& image);

/// Builds a histogram from 256 non-negative weights, scaled to `total` integer counts.
Histogram histogram_from_weights(std::span<const double> weights, std::uint64_t total);

/// Built-in bi-modal reference: dark bump at 30 (weight 0.15, sigma 10) and
/// bright bump at 170 (weight 0.85, sigma 30).
const Histogram& default_reference_histogram();

/// Lookup table for histogram specification: level g maps to the smallest g'
/// with CDF_ref(g') >= CDF_src(g).
std::array<std::uint8_t, 256> histogram_matching_lut(const Histogram& source, const Histogram& reference);

GrayImage match_histogram(const GrayImage& image, const Histogram& reference);

/// Unit-sum sampled Gaussian of odd length.
std::vector<double> gaussian_kernel(double sigma, int kernel_size);

/// Separable convolution in double precision with edge-clamp borders.
RealImage convolve_separable(const RealImage& image, std::span<const double> kernel);

GrayImage gaussian_blur(const GrayImage& image, double sigma, int kernel_size);

/// Rounds to nearest (ties away from zero) and clamps to [0, 255].
std::uint8_t saturate_round(double value);
GrayImage to_gray(const RealImage& image);

/// Bits are set where intensity <= t.
BinaryImage threshold_binary(const GrayImage& image, int t);

/// Set bits become 255, clear bits 0.
GrayImage binary_to_gray(const BinaryImage& bits);

/// Bilinear sample at continuous pixel coordinates. Returns false when (x, y)
/// falls outside [0, w-1] x [0, h-1].
template <typename Derived>
bool sample_bilinear(const Eigen::MatrixBase<Derived>& image, double x, double y, double& out) {
  const auto w = image.cols();
  const auto h = image.rows();
  if (!(x >= 0.0 && y >= 0.0 && x <= static_cast<double>(w - 1) && y <= static_cast<double>(h - 1))) {
    return false;
  }
  const auto x0 = std::min(static_cast<Eigen::Index>(x), w > 1 ? w - 2 : 0);
  const auto y0 = std::min(static_cast<Eigen::Index>(y), h > 1 ? h - 2 : 0);
  const auto x1 = std::min(x0 + 1, w - 1);
  const auto y1 = std::min(y0 + 1, h - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const auto at = [&](Eigen::Index yy, Eigen::Index xx) { return static_cast<double>(image(yy, xx)); };
  const double top = at(y0, x0) + fx * (at(y0, x1) - at(y0, x0));
  const double bottom = at(y1, x0) + fx * (at(y1, x1) - at(y1, x0));
  out = top + fy * (bottom - top);
  return true;
}

}  // namespace iris
