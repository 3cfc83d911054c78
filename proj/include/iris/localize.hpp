#pragma once

#include <cstdint>
#include <vector>

#include "iris/config.hpp"
#include "iris/edgedetect.hpp"
#include "iris/types.hpp"

namespace iris {

/// Vote array over (r, cy, cx) with 1 px bins. Centers span the image grid,
/// radii span [r_min, r_max].
class HoughAccumulator {
 public:
  HoughAccumulator(int width, int height, int r_min, int r_max);

  int width() const { return width_; }
  int height() const { return height_; }
  int r_min() const { return r_min_; }
  int r_max() const { return r_max_; }

  void vote(int cx, int cy, int r) { ++votes_[index(cx, cy, r)]; }
  std::int32_t votes(int cx, int cy, int r) const { return votes_[index(cx, cy, r)]; }

  struct Peak {
    int cx = 0;
    int cy = 0;
    int r = 0;
    std::int32_t score = 0;
  };

  /// Global maximum; ties go to the smallest r, then smallest (cy, cx).
  Peak peak() const;

 private:
  std::size_t index(int cx, int cy, int r) const {
    return (static_cast<std::size_t>(r - r_min_) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(cy)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(cx);
  }

  int width_;
  int height_;
  int r_min_;
  int r_max_;
  std::vector<std::int32_t> votes_;
};

/// Gradient-directed voting: every edge pixel casts, for each integer radius,
/// one vote at each of the two centers along +/- its gradient direction.
/// Only circles lying entirely inside the image receive votes.
HoughAccumulator hough_accumulate(const BinaryImage& edges, const GradientField& gradients, int r_min, int r_max);

struct HoughResult {
  CircleParams circle;
  std::int32_t score = 0;
};

HoughResult hough_circle(const BinaryImage& edges, const GradientField& gradients, int r_min, int r_max);

/// Intermediate products of pupil localization, kept for stage dumps.
struct PupilStages {
  GrayImage matched;
  GrayImage blurred;
  BinaryImage thresholded;
  BinaryImage edges;
  GradientField edge_gradients;
  HoughResult hough;
  double boundary_quality = 0.0;  // contrast at the detected radius relative to the best radius
};

/// Histogram matching, blur, dark threshold and Canny on the threshold mask.
PupilStages preprocess_for_pupil(const GrayImage& image, const PipelineConfig& cfg, const Histogram& reference);

PupilStages localize_pupil_detailed(const GrayImage& image, const PipelineConfig& cfg, const Histogram& reference);
CircleParams localize_pupil(const GrayImage& image, const PipelineConfig& cfg = {});

/// Mean intensity over `samples` equally spaced points on a circle, bilinear.
/// With lateral_only, only angles within 45 degrees of the horizontal axis are used.
/// Returns NaN when no sample falls inside the image.
double circular_mean(const GrayImage& image, double cx, double cy, double r, int samples, bool lateral_only = false);

/// Ratio of the radial intensity step at `circle` to the largest step over
/// radii in [r_min, r_max] around the same center.
double boundary_contrast_ratio(const GrayImage& image, const CircleParams& circle, int r_min, int r_max);

/// Concentric-circle scan: the limbic radius is the r maximizing
/// mean(r + step) - mean(r), starting at pupil.r + gap.
CircleParams localize_limbic(const GrayImage& image, const CircleParams& pupil, const PipelineConfig& cfg = {});

struct IdopSearch {
  int cx_min = 0;
  int cx_max = 0;
  int cy_min = 0;
  int cy_max = 0;
  int r_min = 0;
  int r_max = 0;
};

struct IdopOptions {
  double sigma_r = 1.5;
  int samples = 128;
  int coarse_step = 4;
  int refine_half = 4;
};

/// Discrete integro-differential operator: maximizes the absolute,
/// Gaussian-smoothed radial derivative of the circular mean intensity.
CircleParams idop_localize(const RealImage& image, const IdopSearch& search, const IdopOptions& options = {});
CircleParams idop_localize(const GrayImage& image, const IdopSearch& search, const IdopOptions& options = {});

}  // namespace iris
