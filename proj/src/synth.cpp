#include "iris/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <vector>

#include "iris/error.hpp"
#include "iris/imgcore.hpp"

namespace iris::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Streams keep the independent random quantities apart.
enum Stream : std::uint64_t { kTexture = 1, kNoise = 2, kLashes = 3 };

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t hash64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return mix(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ (counter + 0x632be59bd9b4e019ULL));
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(hash64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  // Box-Muller on two decorrelated counters.
  const double u1 = 1.0 - uniform01(seed, stream, 2 * counter);
  const double u2 = uniform01(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

IrisTexture::IrisTexture(std::uint64_t seed) {
  std::uint64_t c = 0;
  const auto u = [&] { return uniform01(seed, kTexture, c++); };
  // Distinct integer angular frequencies (continuous at 2*pi); a shared
  // frequency between two identities is what makes their strips correlate.
  std::array<int, kMaxAngularFreq - kMinAngularFreq + 1> freqs{};
  std::iota(freqs.begin(), freqs.end(), kMinAngularFreq);
  for (std::size_t i = 0; i < kHarmonics; ++i) {
    const auto pick = i + static_cast<std::size_t>(u() * static_cast<double>(freqs.size() - i));
    std::swap(freqs[i], freqs[std::min(pick, freqs.size() - 1)]);
  }
  for (std::size_t i = 0; i < kHarmonics; ++i) {
    auto& h = harmonics_[i];
    h.amplitude = 6.0 + 8.0 * u();
    h.angular_freq = freqs[i];
    h.angular_phase = kTwoPi * u();
    h.radial_freq = 1.0 + 4.0 * u();
  }
}

double IrisTexture::operator()(double theta, double rho) const {
  double v = 0.0;
  for (const auto& h : harmonics_) {
    v += h.amplitude * std::sin(h.angular_freq * theta + h.angular_phase) *
         std::sin(h.radial_freq * rho * std::numbers::pi);  // zero at the pupillary boundary
  }
  return v;
}

void validate(const EyeSpec& s) {
  const auto fail = [](const std::string& why) { throw Error(ErrorCode::SpecInvalid, why); };
  if (s.width < 64 || s.height < 64) fail("image must be at least 64x64");
  if (!(s.pupil.r > 0.0)) fail("pupil radius must be positive");
  if (!(s.pupil.r < s.limbic_r)) fail("pupil radius must be below the limbic radius");
  if (!(s.limbic_r < std::min(s.width, s.height) / 2.0)) fail("limbic radius must be below min(width, height)/2");
  if (s.pupil.cx - s.limbic_r < 0.0 || s.pupil.cy - s.limbic_r < 0.0 || s.pupil.cx + s.limbic_r > s.width - 1 ||
      s.pupil.cy + s.limbic_r > s.height - 1) {
    fail("limbic circle must lie inside the image");
  }
  for (int v : {s.sclera_intensity, s.iris_intensity, s.pupil_intensity}) {
    if (v < 0 || v > 255) fail("intensities must lie in [0, 255]");
  }
  if (s.noise_sigma < 0.0) fail("noise sigma must be >= 0");
  if (s.eyelash_count < 0) fail("eyelash count must be >= 0");
  if (s.specular && (!(s.specular->r > 0.0) || s.specular->intensity < 0 || s.specular->intensity > 255)) {
    fail("specular blob needs a positive radius and an intensity in [0, 255]");
  }
}

namespace {

struct Lash {
  double x0, y0, dx, length, bend, half_width;
};

Lash make_lash(const EyeSpec& s, int index) {
  const auto u = [&](int k) { return uniform01(s.identity_seed ^ s.noise_seed, kLashes, static_cast<std::uint64_t>(index) * 8 + k); };
  Lash l{};
  l.x0 = s.pupil.cx + (2.0 * u(0) - 1.0) * 0.8 * s.limbic_r;
  l.y0 = std::max(1.0, s.pupil.cy - s.limbic_r - 5.0 - 15.0 * u(1));
  l.dx = (2.0 * u(2) - 1.0) * 15.0;
  l.length = 30.0 + 40.0 * u(3);
  l.bend = (2.0 * u(4) - 1.0) * 10.0;
  l.half_width = 0.8 + 0.5 * u(5);
  return l;
}

// Blends `value` into the raster with anti-aliased coverage around a polyline.
void draw_lash(RealImage& img, BinaryImage& clutter, const Lash& l, double value) {
  std::vector<std::pair<double, double>> pts;
  const int steps = static_cast<int>(l.length * 4);
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    pts.emplace_back(l.x0 + t * l.dx + t * t * l.bend, l.y0 + t * l.length);
  }
  double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
  for (const auto& [x, y] : pts) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  const int pad = 3;
  const int x_lo = std::max(0, static_cast<int>(min_x) - pad);
  const int x_hi = std::min(static_cast<int>(img.cols()) - 1, static_cast<int>(max_x) + pad);
  const int y_lo = std::max(0, static_cast<int>(min_y) - pad);
  const int y_hi = std::min(static_cast<int>(img.rows()) - 1, static_cast<int>(max_y) + pad);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      double best = 1e9;
      for (const auto& [px, py] : pts) best = std::min(best, std::hypot(x - px, y - py));
      const double coverage = std::clamp(l.half_width + 0.5 - best, 0.0, 1.0);
      if (coverage <= 0.0) continue;
      img(y, x) += coverage * (value - img(y, x));
      if (coverage > 0.25) clutter(y, x) = true;
    }
  }
}

}  // namespace

RenderedEye render_eye(const EyeSpec& s) {
  validate(s);
  const IrisTexture texture(s.identity_seed);
  const double pr = s.pupil.r;
  const double lr = s.limbic_r;
  const auto intensity_at = [&](double x, double y) {
    const double dx = x - s.pupil.cx;
    const double dy = s.pupil.cy - y;
    const double d = std::hypot(dx, dy);
    if (d < pr) return static_cast<double>(s.pupil_intensity);
    if (d >= lr) return static_cast<double>(s.sclera_intensity);
    const double theta = std::atan2(dy, dx);
    return s.iris_intensity + texture(theta - s.rotation, (d - pr) / (lr - pr));
  };

  RealImage img(s.height, s.width);
  constexpr int kSuper = 4;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const double d = std::hypot(x - s.pupil.cx, y - s.pupil.cy);
      if (std::abs(d - pr) < 1.0 || std::abs(d - lr) < 1.0) {
        double acc = 0.0;
        for (int sy = 0; sy < kSuper; ++sy) {
          for (int sx = 0; sx < kSuper; ++sx) {
            acc += intensity_at(x + (sx + 0.5) / kSuper - 0.5, y + (sy + 0.5) / kSuper - 0.5);
          }
        }
        img(y, x) = acc / (kSuper * kSuper);
      } else {
        img(y, x) = intensity_at(x, y);
      }
    }
  }

  RenderedEye out;
  out.truth.pupil = s.pupil;
  out.truth.limbic = {s.pupil.cx, s.pupil.cy, lr};
  out.truth.identity_seed = s.identity_seed;
  out.truth.rotation = s.rotation;
  out.truth.clutter = BinaryImage::Zero(s.height, s.width);

  for (int i = 0; i < s.eyelash_count; ++i) draw_lash(img, out.truth.clutter, make_lash(s, i), 25.0);

  if (s.specular) {
    const auto& sp = *s.specular;
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        const double coverage = std::clamp(sp.r + 0.5 - std::hypot(x - sp.cx, y - sp.cy), 0.0, 1.0);
        if (coverage <= 0.0) continue;
        img(y, x) += coverage * (sp.intensity - img(y, x));
        if (coverage > 0.25) out.truth.clutter(y, x) = true;
      }
    }
  }

  if (s.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < img.size(); ++i) {
      img.data()[i] += s.noise_sigma * standard_normal(s.noise_seed, kNoise, static_cast<std::uint64_t>(i));
    }
  }
  out.image = to_gray(img);
  return out;
}

EyeSpec perturb(const EyeSpec& spec, Perturbation kind, double magnitude) {
  EyeSpec out = spec;
  switch (kind) {
    case Perturbation::Dilation: out.pupil.r += magnitude; break;
    case Perturbation::Rotation: out.rotation += magnitude; break;
    case Perturbation::Noise:
      out.noise_sigma += magnitude;
      out.noise_seed = hash64(spec.noise_seed, kNoise, 0xfeed);
      break;
    case Perturbation::Clutter: out.eyelash_count += static_cast<int>(std::lround(magnitude)); break;
  }
  validate(out);
  return out;
}

std::optional<Perturbation> parse_perturbation(const std::string& name) {
  if (name == "dilation") return Perturbation::Dilation;
  if (name == "rotation") return Perturbation::Rotation;
  if (name == "noise") return Perturbation::Noise;
  if (name == "clutter") return Perturbation::Clutter;
  return std::nullopt;
}

std::string format_truth(const GroundTruth& t) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "pupil %.4f %.4f %.4f\nlimbic %.4f %.4f %.4f\nseed %llu\nrotation %.17g\n", t.pupil.cx,
                t.pupil.cy, t.pupil.r, t.limbic.cx, t.limbic.cy, t.limbic.r,
                static_cast<unsigned long long>(t.identity_seed), t.rotation);
  return buf;
}

GrayImage render_disk(int width, int height, const CircleParams& disk, int inside, int outside) {
  RealImage img(height, width);
  constexpr int kSuper = 4;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int in = 0;
      for (int sy = 0; sy < kSuper; ++sy) {
        for (int sx = 0; sx < kSuper; ++sx) {
          const double px = x + (sx + 0.5) / kSuper - 0.5;
          const double py = y + (sy + 0.5) / kSuper - 0.5;
          in += std::hypot(px - disk.cx, py - disk.cy) < disk.r;
        }
      }
      const double f = static_cast<double>(in) / (kSuper * kSuper);
      img(y, x) = f * inside + (1.0 - f) * outside;
    }
  }
  return to_gray(img);
}

RingFixture render_ring(int width, int height, const CircleParams& c) {
  RingFixture f{BinaryImage::Zero(height, width),
                {RealImage::Zero(height, width), RealImage::Zero(height, width), RealImage::Zero(height, width)}};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - c.cx;
      const double dy = y - c.cy;
      const double d = std::hypot(dx, dy);
      if (d > 0.0) {
        f.gradients.gx(y, x) = dx / d;
        f.gradients.gy(y, x) = dy / d;
        f.gradients.magnitude(y, x) = 1.0;
      }
      f.edges(y, x) = std::lround(d) == std::lround(c.r);
    }
  }
  return f;
}

GrayImage render_function(int width, int height, const std::function<double(double, double)>& fn) {
  RealImage img(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) img(y, x) = fn(x, y);
  }
  return to_gray(img);
}

}  // namespace iris::synth
