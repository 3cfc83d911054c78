#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace iris {

// Rasters are row-major: row index is y, column index is x.
template <typename Scalar>
using Raster = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GrayImage = Raster<std::uint8_t>;
using BinaryImage = Raster<bool>;
using RealImage = Raster<double>;

struct CircleParams {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;

  friend bool operator==(const CircleParams&, const CircleParams&) = default;
};

struct Boundaries {
  CircleParams pupil;
  CircleParams limbic;

  friend bool operator==(const Boundaries&, const Boundaries&) = default;
};

inline int width(const auto& raster) { return static_cast<int>(raster.cols()); }
inline int height(const auto& raster) { return static_cast<int>(raster.rows()); }

}  // namespace iris
