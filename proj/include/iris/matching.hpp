#pragma once

#include <span>
#include <string>
#include <vector>

#include "iris/encode.hpp"
#include "iris/normalize.hpp"

namespace iris {

struct HammingResult {
  double hd = 0.0;
  int usable = 0;
};

/// Masked fractional Hamming distance over bits valid in both masks.
HammingResult hamming_distance(const IrisCode& a, const IrisCode& b, int min_overlap = 512);

enum class Decision { Accept, Reject };

struct MatchResult {
  double hd = 1.0;
  int usable_bits = 0;
  int best_shift = 0;  // positive: probe content rotated counterclockwise relative to the gallery
  Decision decision = Decision::Reject;
  double threshold = 0.35;
};

struct MatchOptions {
  std::vector<int> shifts = {-16, -12, -8, -4, 0, 4, 8, 12, 16};
  double threshold = 0.35;
  int min_overlap = 512;
};

/// Re-encodes the probe strip at each circular column shift and keeps the
/// smallest distance. Equal distances resolve to the shift of smallest magnitude.
MatchResult match_with_shifts(const NormalizedIris& probe, const IrisCode& gallery, const MatchOptions& options = {});

struct RatePoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct ScoreDistribution {
  std::vector<double> genuine;
  std::vector<double> imposter;
  std::vector<RatePoint> rates;  // thresholds 0.01 .. 0.50
  double dprime = 0.0;
};

/// FAR(t) = share of imposter scores <= t; FRR(t) = share of genuine scores > t.
ScoreDistribution evaluate(std::span<const double> genuine, std::span<const double> imposter);

/// |mu_imp - mu_gen| / sqrt((var_imp + var_gen) / 2), population variances.
double decidability(std::span<const double> genuine, std::span<const double> imposter);

/// `threshold,far,frr` rows followed by `# dprime=<value>`.
std::string format_score_csv(const ScoreDistribution& dist);

}  // namespace iris
