#pragma once

#include <string>

#include "iris/config.hpp"
#include "iris/encode.hpp"
#include "iris/localize.hpp"
#include "iris/normalize.hpp"

namespace iris {

enum class Localizer { Cht, Idop };

struct PipelineOutput {
  PupilStages stages;
  Boundaries boundaries;
  NormalizedIris strip;     // raw rubber sheet
  NormalizedIris masked;    // after the noise mask
  NormalizedIris enhanced;  // equalized, the matching probe
  IrisCode code;
  double boundary_quality = 0.0;
  bool quality_warning = false;
};

/// Center window for the integro-differential localizer: the middle half of
/// the image in each axis.
IdopSearch default_idop_search(const GrayImage& image, const PipelineConfig& cfg);

/// Localization, normalization, masking, enhancement and encoding.
PipelineOutput run_pipeline(const GrayImage& image, const PipelineConfig& cfg, const Histogram& reference,
                            Localizer method = Localizer::Cht);

/// Pupil then limbic circle overlaid at 255 on a copy of the image.
GrayImage overlay_boundaries(const GrayImage& image, const Boundaries& b);

}  // namespace iris
