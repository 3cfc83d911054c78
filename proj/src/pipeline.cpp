#include "iris/pipeline.hpp"

#include <cmath>
#include <numbers>

namespace iris {

IdopSearch default_idop_search(const GrayImage& image, const PipelineConfig& cfg) {
  const int w = width(image);
  const int h = height(image);
  return {w / 4, w - 1 - w / 4, h / 4, h - 1 - h / 4, cfg.pupil_r_min, cfg.pupil_r_max};
}

PipelineOutput run_pipeline(const GrayImage& image, const PipelineConfig& cfg, const Histogram& reference,
                            Localizer method) {
  PipelineOutput out;
  if (method == Localizer::Cht) {
    out.stages = localize_pupil_detailed(image, cfg, reference);
  } else {
    out.stages = preprocess_for_pupil(image, cfg, reference);
    const auto circle = idop_localize(out.stages.blurred, default_idop_search(image, cfg),
                                      {cfg.idop_sigma_r, cfg.idop_samples, cfg.idop_coarse_step, cfg.idop_refine_half});
    out.stages.hough = {circle, 0};
    out.stages.boundary_quality = boundary_contrast_ratio(out.stages.blurred, circle, cfg.pupil_r_min, cfg.pupil_r_max);
  }
  out.boundaries.pupil = out.stages.hough.circle;
  out.boundaries.limbic = localize_limbic(out.stages.blurred, out.boundaries.pupil, cfg);
  out.boundary_quality = out.stages.boundary_quality;
  out.quality_warning = out.boundary_quality < cfg.quality_gate;

  out.strip = rubber_sheet(image, out.boundaries, cfg.strip_rows, cfg.strip_cols);
  out.masked = build_noise_mask(out.strip, {cfg.mask_dark, cfg.mask_bright, cfg.mask_edge_high});
  out.enhanced = out.masked.mask.any() ? enhance_strip(out.masked) : out.masked;
  out.code = encode_iris(out.enhanced);
  return out;
}

GrayImage overlay_boundaries(const GrayImage& image, const Boundaries& b) {
  GrayImage out = image;
  for (const auto* c : {&b.pupil, &b.limbic}) {
    const int steps = std::max(64, static_cast<int>(2.0 * std::numbers::pi * c->r * 2.0));
    for (int k = 0; k < steps; ++k) {
      const double t = 2.0 * std::numbers::pi * k / steps;
      const long x = std::lround(c->cx + c->r * std::cos(t));
      const long y = std::lround(c->cy - c->r * std::sin(t));
      if (x >= 0 && y >= 0 && x < out.cols() && y < out.rows()) out(y, x) = 255;
    }
  }
  return out;
}

}  // namespace iris
