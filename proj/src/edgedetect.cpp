#include "iris/edgedetect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "iris/error.hpp"
#include "iris/imgcore.hpp"

namespace iris {

GradientField sobel_gradients(const RealImage& image) {
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  if (h < 3 || w < 3) throw Error(ErrorCode::TooSmall, "Sobel needs at least 3x3 pixels");
  GradientField g{RealImage(h, w), RealImage(h, w), RealImage(h, w)};
  const auto at = [&](Eigen::Index y, Eigen::Index x) {
    return image(std::clamp<Eigen::Index>(y, 0, h - 1), std::clamp<Eigen::Index>(x, 0, w - 1));
  };
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const double gx = (at(y - 1, x + 1) + 2.0 * at(y, x + 1) + at(y + 1, x + 1)) -
                        (at(y - 1, x - 1) + 2.0 * at(y, x - 1) + at(y + 1, x - 1));
      const double gy = (at(y + 1, x - 1) + 2.0 * at(y + 1, x) + at(y + 1, x + 1)) -
                        (at(y - 1, x - 1) + 2.0 * at(y - 1, x) + at(y - 1, x + 1));
      g.gx(y, x) = gx;
      g.gy(y, x) = gy;
      g.magnitude(y, x) = std::hypot(gx, gy);
    }
  }
  return g;
}

GradientField sobel_gradients(const GrayImage& image) { return sobel_gradients(RealImage(image.cast<double>())); }

int quantize_direction(double gx, double gy) {
  double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
  if (angle < 0.0) angle += 180.0;
  if (angle >= 180.0) angle -= 180.0;
  if (angle <= 22.5 || angle > 157.5) return 0;
  if (angle <= 67.5) return 1;
  if (angle <= 112.5) return 2;
  return 3;
}

BinaryImage non_maximum_suppression(const GradientField& g) {
  // Neighbour offsets (dx, dy) along the gradient for each direction bin; y grows downwards.
  static constexpr int kOffsets[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  const Eigen::Index h = g.magnitude.rows();
  const Eigen::Index w = g.magnitude.cols();
  BinaryImage keep = BinaryImage::Zero(h, w);
  const auto mag_at = [&](Eigen::Index y, Eigen::Index x) {
    if (y < 0 || x < 0 || y >= h || x >= w) return 0.0;
    return g.magnitude(y, x);
  };
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const double m = g.magnitude(y, x);
      if (m <= 0.0) continue;
      const auto& off = kOffsets[quantize_direction(g.gx(y, x), g.gy(y, x))];
      const double ahead = mag_at(y + off[1], x + off[0]);
      const double behind = mag_at(y - off[1], x - off[0]);
      // Strict on one side so flat-topped ridges keep exactly one pixel.
      keep(y, x) = m > ahead && m >= behind;
    }
  }
  return keep;
}

CannyResult canny_detailed(const GrayImage& image, const CannyParams& params) {
  if (!(params.low_ratio > 0.0 && params.low_ratio < params.high_ratio && params.high_ratio <= 1.0)) {
    throw Error(ErrorCode::BadThresholds, "need 0 < low_ratio < high_ratio <= 1");
  }
  const int kernel_size = 2 * static_cast<int>(std::ceil(3.0 * params.sigma)) + 1;
  const RealImage smoothed = convolve_separable(image.cast<double>(), gaussian_kernel(params.sigma, kernel_size));
  CannyResult result{BinaryImage::Zero(image.rows(), image.cols()), sobel_gradients(smoothed)};
  const GradientField& g = result.gradients;

  const double max_mag = g.magnitude.maxCoeff();
  if (!(max_mag > 0.0)) return result;
  const double high = params.high_ratio * max_mag;
  const double low = params.low_ratio * max_mag;

  const BinaryImage candidates = non_maximum_suppression(g);
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  BinaryImage& edges = result.edges;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (candidates(y, x) && g.magnitude(y, x) >= high) {
        edges(y, x) = true;
        stack.emplace_back(y, x);
      }
    }
  }
  while (!stack.empty()) {
    const auto [y, x] = stack.back();
    stack.pop_back();
    for (Eigen::Index dy = -1; dy <= 1; ++dy) {
      for (Eigen::Index dx = -1; dx <= 1; ++dx) {
        const Eigen::Index ny = y + dy;
        const Eigen::Index nx = x + dx;
        if (ny < 0 || nx < 0 || ny >= h || nx >= w || edges(ny, nx)) continue;
        if (candidates(ny, nx) && g.magnitude(ny, nx) >= low) {
          edges(ny, nx) = true;
          stack.emplace_back(ny, nx);
        }
      }
    }
  }
  return result;
}

BinaryImage canny(const GrayImage& image, const CannyParams& params) { return canny_detailed(image, params).edges; }

}  // namespace iris
