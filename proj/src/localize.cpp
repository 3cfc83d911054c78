#include "iris/localize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "iris/error.hpp"
#include "iris/imgcore.hpp"

namespace iris {

HoughAccumulator::HoughAccumulator(int width, int height, int r_min, int r_max)
    : width_(width), height_(height), r_min_(r_min), r_max_(r_max) {
  if (!(r_min > 0 && r_min <= r_max)) {
    throw Error(ErrorCode::EmptyRadiusRange, "radius range [" + std::to_string(r_min) + ", " + std::to_string(r_max) + "]");
  }
  votes_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                    static_cast<std::size_t>(r_max - r_min + 1),
                0);
}

HoughAccumulator::Peak HoughAccumulator::peak() const {
  Peak best;
  best.r = r_min_;
  std::size_t i = 0;
  for (int r = r_min_; r <= r_max_; ++r) {
    for (int cy = 0; cy < height_; ++cy) {
      for (int cx = 0; cx < width_; ++cx, ++i) {
        if (votes_[i] > best.score) best = {cx, cy, r, votes_[i]};
      }
    }
  }
  return best;
}

HoughAccumulator hough_accumulate(const BinaryImage& edges, const GradientField& gradients, int r_min, int r_max) {
  if (!(r_min > 0 && r_min < r_max)) {
    throw Error(ErrorCode::EmptyRadiusRange, "need 0 < r_min < r_max");
  }
  const int w = width(edges);
  const int h = height(edges);
  HoughAccumulator acc(w, h, r_min, r_max);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!edges(y, x)) continue;
      const double m = gradients.magnitude(y, x);
      if (!(m > 0.0)) continue;
      const double ux = gradients.gx(y, x) / m;
      const double uy = gradients.gy(y, x) / m;
      for (int r = r_min; r <= r_max; ++r) {
        // Integer pixel plus rounded offset keeps voting exactly translation-equivariant.
        const long ox = std::lround(r * ux);
        const long oy = std::lround(r * uy);
        for (const long sign : {1L, -1L}) {
          const long cx = x + sign * ox;
          const long cy = y + sign * oy;
          if (cx - r < 0 || cy - r < 0 || cx + r > w - 1 || cy + r > h - 1) continue;
          acc.vote(static_cast<int>(cx), static_cast<int>(cy), r);
        }
      }
    }
  }
  return acc;
}

HoughResult hough_circle(const BinaryImage& edges, const GradientField& gradients, int r_min, int r_max) {
  if (!edges.any()) throw Error(ErrorCode::NoEdges, "edge map is empty");
  const auto peak = hough_accumulate(edges, gradients, r_min, r_max).peak();
  if (peak.score == 0) throw Error(ErrorCode::NoEdges, "no edge pixel voted for a circle inside the image");
  return {{static_cast<double>(peak.cx), static_cast<double>(peak.cy), static_cast<double>(peak.r)}, peak.score};
}

namespace {

template <typename Derived>
double circular_mean_impl(const Eigen::MatrixBase<Derived>& image, double cx, double cy, double r, int samples,
                          bool lateral_only) {
  double sum = 0.0;
  int used = 0;
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    if (lateral_only) {
      const double c = std::cos(theta);
      if (std::abs(c) < std::cos(std::numbers::pi / 4) - 1e-12) continue;
    }
    double v = 0.0;
    if (sample_bilinear(image, cx + r * std::cos(theta), cy - r * std::sin(theta), v)) {
      sum += v;
      ++used;
    }
  }
  return used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double circular_mean(const GrayImage& image, double cx, double cy, double r, int samples, bool lateral_only) {
  return circular_mean_impl(image, cx, cy, r, samples, lateral_only);
}

double boundary_contrast_ratio(const GrayImage& image, const CircleParams& circle, int r_min, int r_max) {
  const auto step = [&](int r) {
    const double outer = circular_mean(image, circle.cx, circle.cy, r + 1, 360);
    const double inner = circular_mean(image, circle.cx, circle.cy, std::max(r - 1, 0), 360);
    return std::isfinite(outer) && std::isfinite(inner) ? std::abs(outer - inner) : 0.0;
  };
  double best = 0.0;
  for (int r = r_min; r <= r_max; ++r) best = std::max(best, step(r));
  if (!(best > 0.0)) return 0.0;
  return step(static_cast<int>(std::lround(circle.r))) / best;
}

PupilStages preprocess_for_pupil(const GrayImage& image, const PipelineConfig& cfg, const Histogram& reference) {
  if (image.rows() < 64 || image.cols() < 64) throw Error(ErrorCode::TooSmall, "pupil localization needs >= 64x64");
  PupilStages st;
  st.matched = match_histogram(image, reference);
  st.blurred = gaussian_blur(st.matched, cfg.blur_sigma, cfg.blur_kernel);
  st.thresholded = threshold_binary(st.blurred, cfg.pupil_threshold);
  auto edge_result = canny_detailed(binary_to_gray(st.thresholded), {cfg.canny_low, cfg.canny_high, cfg.canny_sigma});
  st.edges = std::move(edge_result.edges);
  st.edge_gradients = std::move(edge_result.gradients);
  return st;
}

PupilStages localize_pupil_detailed(const GrayImage& image, const PipelineConfig& cfg, const Histogram& reference) {
  PupilStages st = preprocess_for_pupil(image, cfg, reference);
  try {
    st.hough = hough_circle(st.edges, st.edge_gradients, cfg.pupil_r_min, cfg.pupil_r_max);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoEdges) throw Error(ErrorCode::PupilNotFound, e.what());
    throw;
  }
  st.boundary_quality = boundary_contrast_ratio(st.blurred, st.hough.circle, cfg.pupil_r_min, cfg.pupil_r_max);
  return st;
}

CircleParams localize_pupil(const GrayImage& image, const PipelineConfig& cfg) {
  return localize_pupil_detailed(image, cfg, cfg.reference_histogram()).hough.circle;
}

CircleParams localize_limbic(const GrayImage& image, const CircleParams& pupil, const PipelineConfig& cfg) {
  if (!(pupil.r > 0.0)) throw Error(ErrorCode::InvalidArgument, "pupil radius must be positive");
  const double margin = std::min({pupil.cx, pupil.cy, image.cols() - 1 - pupil.cx, image.rows() - 1 - pupil.cy});
  const double r_first = pupil.r + cfg.limbic_gap;
  const double r_limit = std::min(margin, pupil.r + cfg.limbic_span);
  if (r_first + cfg.limbic_step > r_limit) {
    throw Error(ErrorCode::SearchRangeOutOfImage,
                "no room for a limbic search beyond r=" + std::to_string(r_first) + " (limit " + std::to_string(r_limit) + ")");
  }
  double best_r = r_first;
  double best_diff = -std::numeric_limits<double>::infinity();
  double prev = circular_mean(image, pupil.cx, pupil.cy, r_first, cfg.limbic_samples, cfg.limbic_lateral_only);
  for (double r = r_first; r + cfg.limbic_step <= r_limit; r += cfg.limbic_step) {
    const double next = circular_mean(image, pupil.cx, pupil.cy, r + cfg.limbic_step, cfg.limbic_samples,
                                      cfg.limbic_lateral_only);
    const double diff = next - prev;
    if (diff > best_diff) {
      best_diff = diff;
      best_r = r;
    }
    prev = next;
  }
  return {pupil.cx, pupil.cy, best_r};
}

namespace {

struct IdopScore {
  double value = -1.0;
  int r = 0;
};

// Best |G * d/dr mean| over radii for one center.
IdopScore idop_center_score(const RealImage& image, int cx, int cy, const IdopSearch& s, const IdopOptions& o,
                            std::span<const double> kernel) {
  const int n = s.r_max - s.r_min + 1;
  std::vector<double> mean(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    const double m = circular_mean_impl(image, cx, cy, s.r_min + i, o.samples, false);
    mean[static_cast<std::size_t>(i)] = std::isfinite(m) ? m : 0.0;
  }
  std::vector<double> deriv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) deriv[static_cast<std::size_t>(i)] = mean[static_cast<std::size_t>(i + 1)] - mean[static_cast<std::size_t>(i)];
  const int half = static_cast<int>(kernel.size() / 2);
  IdopScore best;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) {
      acc += kernel[static_cast<std::size_t>(k + half)] * deriv[static_cast<std::size_t>(std::clamp(i + k, 0, n - 1))];
    }
    if (std::abs(acc) > best.value) best = {std::abs(acc), s.r_min + i};
  }
  return best;
}

}  // namespace

CircleParams idop_localize(const RealImage& image, const IdopSearch& s, const IdopOptions& o) {
  if (s.r_min <= 0 || s.r_max < s.r_min || s.cx_max < s.cx_min || s.cy_max < s.cy_min) {
    throw Error(ErrorCode::EmptySearchSpace, "empty center window or radius range");
  }
  if (s.cx_min < 0 || s.cy_min < 0 || s.cx_max >= image.cols() || s.cy_max >= image.rows()) {
    throw Error(ErrorCode::EmptySearchSpace, "center window extends outside the image");
  }
  const int half = std::max(1, static_cast<int>(std::ceil(3.0 * o.sigma_r)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double ksum = 0.0;
  for (int k = -half; k <= half; ++k) {
    ksum += kernel[static_cast<std::size_t>(k + half)] = std::exp(-(k * k) / (2.0 * o.sigma_r * o.sigma_r));
  }
  for (double& k : kernel) k /= ksum;

  struct Best {
    double value = -1.0;
    int cx = 0, cy = 0, r = 0;
  };
  const auto scan = [&](int x0, int x1, int y0, int y1, int step, Best& best) {
    for (int cy = y0; cy <= y1; cy += step) {
      for (int cx = x0; cx <= x1; cx += step) {
        const auto sc = idop_center_score(image, cx, cy, s, o, kernel);
        if (sc.value > best.value) best = {sc.value, cx, cy, sc.r};
      }
    }
  };
  Best coarse;
  scan(s.cx_min, s.cx_max, s.cy_min, s.cy_max, std::max(1, o.coarse_step), coarse);
  Best fine = coarse;
  if (o.coarse_step > 1) {
    scan(std::max(s.cx_min, coarse.cx - o.refine_half), std::min(s.cx_max, coarse.cx + o.refine_half),
         std::max(s.cy_min, coarse.cy - o.refine_half), std::min(s.cy_max, coarse.cy + o.refine_half), 1, fine);
  }
  if (!(fine.value > 1e-12)) throw Error(ErrorCode::DegenerateMaximum, "flat radial profile, no boundary");
  return {static_cast<double>(fine.cx), static_cast<double>(fine.cy), static_cast<double>(fine.r)};
}

CircleParams idop_localize(const GrayImage& image, const IdopSearch& search, const IdopOptions& options) {
  return idop_localize(RealImage(image.cast<double>()), search, options);
}

}  // namespace iris
