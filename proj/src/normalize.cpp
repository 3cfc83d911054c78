#include "iris/normalize.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "iris/edgedetect.hpp"
#include "iris/error.hpp"
#include "iris/imgcore.hpp"

namespace iris {

NormalizedIris rubber_sheet(const GrayImage& image, const Boundaries& b, int radial_res, int angular_res) {
  if (!(b.limbic.r > b.pupil.r) || !(b.pupil.r > 0.0)) {
    throw Error(ErrorCode::DegenerateAnnulus, "limbic radius must exceed pupil radius");
  }
  if (radial_res < 2 || angular_res < 1) throw Error(ErrorCode::InvalidArgument, "strip must have >= 2 rows");
  NormalizedIris out{GrayImage::Zero(radial_res, angular_res), BinaryImage::Zero(radial_res, angular_res)};
  for (int j = 0; j < angular_res; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / angular_res;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double px = b.pupil.cx + b.pupil.r * c;
    const double py = b.pupil.cy - b.pupil.r * s;
    const double lx = b.limbic.cx + b.limbic.r * c;
    const double ly = b.limbic.cy - b.limbic.r * s;
    for (int i = 0; i < radial_res; ++i) {
      const double rho = static_cast<double>(i) / (radial_res - 1);
      double v = 0.0;
      if (sample_bilinear(image, px + rho * (lx - px), py + rho * (ly - py), v)) {
        out.strip(i, j) = saturate_round(v);
        out.mask(i, j) = true;
      }
    }
  }
  return out;
}

NormalizedIris build_noise_mask(const NormalizedIris& in, const NoiseMaskParams& p) {
  if (p.dark_t >= p.bright_t) throw Error(ErrorCode::InvalidArgument, "dark_t must be below bright_t");
  NormalizedIris out = in;
  const auto dark = in.strip.array() < static_cast<std::uint8_t>(std::clamp(p.dark_t, 0, 255));
  const auto bright = in.strip.array().cast<int>() > p.bright_t;
  out.mask = (in.mask.array() && !dark && !bright).matrix();

  if (in.rows() < 3 || in.cols() < 3) return out;
  const auto detail = canny_detailed(in.strip, {p.edge_high_ratio * 0.5, p.edge_high_ratio, 1.4});
  const int h = in.rows();
  const int w = in.cols();
  const auto dilate = [&](const BinaryImage& src, int radius) {
    BinaryImage dst = BinaryImage::Zero(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!src(y, x)) continue;
        for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) {
          for (int dx = -radius; dx <= radius; ++dx) dst(yy, (x + dx + w) % w) = true;  // strip wraps in angle
        }
      }
    }
    return dst;
  };
  // Only edges next to dark or bright clutter count; the annulus boundaries
  // and the texture itself also produce strong edges.
  const BinaryImage near_clutter = dilate((dark || bright).matrix(), 2);
  const BinaryImage clutter_edges = (detail.edges.array() && near_clutter.array()).matrix();
  out.mask = (out.mask.array() && !dilate(clutter_edges, 1).array()).matrix();
  return out;
}

NormalizedIris enhance_strip(const NormalizedIris& in) {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
  for (Eigen::Index i = 0; i < in.strip.size(); ++i) {
    if (in.mask.data()[i]) {
      ++counts[in.strip.data()[i]];
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorCode::AllMasked, "no valid pixels to equalize");
  // Classic equalization: g -> round(255 * (cdf(g) - cdf_min) / (total - cdf_min)).
  std::array<std::uint8_t, 256> lut{};
  std::uint64_t cdf = 0;
  std::uint64_t cdf_min = 0;
  for (int g = 0; g < 256; ++g) {
    if (counts[g] > 0 && cdf_min == 0) cdf_min = counts[g];
    cdf += counts[g];
    if (total == cdf_min) {
      lut[g] = static_cast<std::uint8_t>(g);  // single level: identity
    } else {
      const double scaled = 255.0 * static_cast<double>(cdf > cdf_min ? cdf - cdf_min : 0) / static_cast<double>(total - cdf_min);
      lut[g] = saturate_round(scaled);
    }
  }
  NormalizedIris out = in;
  for (Eigen::Index i = 0; i < in.strip.size(); ++i) {
    if (in.mask.data()[i]) out.strip.data()[i] = lut[in.strip.data()[i]];
  }
  return out;
}

NormalizedIris shift_columns(const NormalizedIris& in, int shift) {
  const int w = in.cols();
  NormalizedIris out{GrayImage(in.strip.rows(), w), BinaryImage(in.mask.rows(), w)};
  for (int j = 0; j < w; ++j) {
    const int src = ((j + shift) % w + w) % w;
    out.strip.col(j) = in.strip.col(src);
    out.mask.col(j) = in.mask.col(src);
  }
  return out;
}

}  // namespace iris
