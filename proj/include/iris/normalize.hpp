#pragma once

#include "iris/types.hpp"

namespace iris {

/// Rubber-sheet strip. Row 0 lies on the pupillary boundary, the last row on
/// the limbic boundary; column j is at angle 2*pi*j/cols, counterclockwise
/// from the positive x-axis (image y grows downwards, so "up" is -y).
struct NormalizedIris {
  GrayImage strip;
  BinaryImage mask;  // true = valid iris pixel

  int rows() const { return static_cast<int>(strip.rows()); }
  int cols() const { return static_cast<int>(strip.cols()); }
};

NormalizedIris rubber_sheet(const GrayImage& image, const Boundaries& boundaries, int radial_res = 64,
                            int angular_res = 512);

struct NoiseMaskParams {
  int dark_t = 50;
  int bright_t = 245;
  double edge_high_ratio = 0.35;
};

NormalizedIris build_noise_mask(const NormalizedIris& in, const NoiseMaskParams& params = {});

/// Histogram equalization over valid pixels only.
NormalizedIris enhance_strip(const NormalizedIris& in);

/// Circular column shift: out(:, j) = in(:, (j + shift) mod cols).
NormalizedIris shift_columns(const NormalizedIris& in, int shift);

}  // namespace iris
