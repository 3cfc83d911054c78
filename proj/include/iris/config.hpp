#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iris/imgcore.hpp"

namespace iris {

/// Every tunable of the pipeline. Keys in the `key = value` config format
/// match the member names.
struct PipelineConfig {
  // pre-processing
  double blur_sigma = 2.0;
  int blur_kernel = 5;
  int pupil_threshold = 70;
  std::string reference_pgm;  // empty: built-in bi-modal reference

  // edges
  double canny_low = 0.05;
  double canny_high = 0.15;
  double canny_sigma = 1.4;

  // pupil
  int pupil_r_min = 20;
  int pupil_r_max = 90;
  double quality_gate = 0.8;

  // limbic
  int limbic_gap = 10;
  int limbic_step = 2;
  int limbic_span = 130;
  int limbic_samples = 360;
  bool limbic_lateral_only = false;

  // integro-differential operator
  double idop_sigma_r = 1.5;
  int idop_samples = 128;
  int idop_coarse_step = 4;
  int idop_refine_half = 4;

  // normalization
  int strip_rows = 64;
  int strip_cols = 512;
  int mask_dark = 50;
  int mask_bright = 245;
  double mask_edge_high = 0.35;

  // matching
  std::vector<int> shifts = {-16, -12, -8, -4, 0, 4, 8, 12, 16};
  double match_threshold = 0.35;
  int min_overlap = 512;

  /// Throws Error(BadConfig) on the first out-of-range value.
  void validate() const;

  /// Reference histogram for matching: loaded from reference_pgm when set.
  Histogram reference_histogram() const;
};

/// Applies one `key = value` assignment. Unknown keys raise BadConfig.
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// One `key = value` line per setting, parseable by parse_config.
std::string format_config(const PipelineConfig& cfg);

}  // namespace iris
