#pragma once

#include "iris/types.hpp"

namespace iris {

struct GradientField {
  RealImage gx;
  RealImage gy;
  RealImage magnitude;

  int width() const { return static_cast<int>(gx.cols()); }
  int height() const { return static_cast<int>(gx.rows()); }
};

struct CannyParams {
  double low_ratio = 0.05;
  double high_ratio = 0.15;
  double sigma = 1.4;
};

/// 3x3 Sobel with edge-clamp borders. gx responds to intensity increasing
/// with x, gy to intensity increasing with y (downwards).
GradientField sobel_gradients(const RealImage& image);
GradientField sobel_gradients(const GrayImage& image);

struct CannyResult {
  BinaryImage edges;
  GradientField gradients;  // of the pre-smoothed image
};

/// Direction bin for non-maximum suppression: 0, 1, 2, 3 for 0, 45, 90, 135
/// degrees. Boundary angles fall to the lower bin.
int quantize_direction(double gx, double gy);

BinaryImage non_maximum_suppression(const GradientField& gradients);

CannyResult canny_detailed(const GrayImage& image, const CannyParams& params = {});
BinaryImage canny(const GrayImage& image, const CannyParams& params = {});

}  // namespace iris
