#include "iris/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "iris/error.hpp"

namespace iris {

HammingResult hamming_distance(const IrisCode& a, const IrisCode& b, int min_overlap) {
  const auto joint = a.mask & b.mask;
  const int usable = static_cast<int>(joint.count());
  if (usable < min_overlap || usable == 0) {
    throw Error(ErrorCode::InsufficientOverlap,
                std::to_string(usable) + " usable bits, need " + std::to_string(std::max(min_overlap, 1)));
  }
  const auto differing = (a.bits ^ b.bits) & joint;
  return {static_cast<double>(differing.count()) / usable, usable};
}

MatchResult match_with_shifts(const NormalizedIris& probe, const IrisCode& gallery, const MatchOptions& options) {
  if (options.shifts.empty()) throw Error(ErrorCode::InvalidArgument, "shift list is empty");
  std::vector<int> order = options.shifts;
  std::stable_sort(order.begin(), order.end(), [](int x, int y) { return std::abs(x) < std::abs(y); });

  MatchResult best;
  best.threshold = options.threshold;
  bool found = false;
  for (int s : order) {
    if (s % 4 != 0) throw Error(ErrorCode::InvalidArgument, "shift " + std::to_string(s) + " is not a multiple of 4");
    const IrisCode code = encode_iris(shift_columns(probe, s));
    HammingResult hr;
    try {
      hr = hamming_distance(code, gallery, options.min_overlap);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InsufficientOverlap) continue;
      throw;
    }
    if (!found || hr.hd < best.hd) {
      best.hd = hr.hd;
      best.usable_bits = hr.usable;
      best.best_shift = s;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::InsufficientOverlap, "no shift reached the minimum bit overlap");
  best.decision = best.hd <= options.threshold ? Decision::Accept : Decision::Reject;
  return best;
}

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double variance_of(std::span<const double> v, double mu) {
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(v.size());
}

}  // namespace

double decidability(std::span<const double> genuine, std::span<const double> imposter) {
  if (genuine.empty() || imposter.empty()) throw Error(ErrorCode::EmptyInput, "score lists must be non-empty");
  const double mg = mean_of(genuine);
  const double mi = mean_of(imposter);
  const double pooled = std::sqrt((variance_of(imposter, mi) + variance_of(genuine, mg)) / 2.0);
  if (!(pooled > 0.0)) return mg == mi ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(mi - mg) / pooled;
}

ScoreDistribution evaluate(std::span<const double> genuine, std::span<const double> imposter) {
  if (genuine.empty() || imposter.empty()) throw Error(ErrorCode::EmptyInput, "score lists must be non-empty");
  ScoreDistribution d;
  d.genuine.assign(genuine.begin(), genuine.end());
  d.imposter.assign(imposter.begin(), imposter.end());
  for (int k = 1; k <= 50; ++k) {
    const double t = k / 100.0;
    const auto accepted = std::count_if(imposter.begin(), imposter.end(), [t](double s) { return s <= t; });
    const auto rejected = std::count_if(genuine.begin(), genuine.end(), [t](double s) { return s > t; });
    d.rates.push_back({t, static_cast<double>(accepted) / static_cast<double>(imposter.size()),
                       static_cast<double>(rejected) / static_cast<double>(genuine.size())});
  }
  d.dprime = decidability(genuine, imposter);
  return d;
}

std::string format_score_csv(const ScoreDistribution& dist) {
  std::string out = "threshold,far,frr\n";
  char line[96];
  for (const auto& p : dist.rates) {
    std::snprintf(line, sizeof line, "%.2f,%.6f,%.6f\n", p.threshold, p.far, p.frr);
    out += line;
  }
  std::snprintf(line, sizeof line, "# dprime=%.17g\n", dist.dprime);
  out += line;
  return out;
}

}  // namespace iris
