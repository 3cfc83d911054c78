#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "iris/edgedetect.hpp"
#include "iris/types.hpp"

namespace iris::synth {

/// Counter-based generator: a pure function of (seed, stream, counter).
std::uint64_t hash64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

struct Specular {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
  int intensity = 250;
};

struct EyeSpec {
  int width = 320;
  int height = 280;
  CircleParams pupil{160.0, 140.0, 45.0};
  double limbic_r = 110.0;  // limbic circle shares the pupil center
  std::uint64_t identity_seed = 0;
  std::uint64_t noise_seed = 0;
  int sclera_intensity = 200;
  int iris_intensity = 120;
  int pupil_intensity = 30;
  double rotation = 0.0;  // radians, counterclockwise
  double noise_sigma = 0.0;
  int eyelash_count = 0;
  std::optional<Specular> specular;
};

struct GroundTruth {
  CircleParams pupil;
  CircleParams limbic;
  std::uint64_t identity_seed = 0;
  double rotation = 0.0;
  BinaryImage clutter;  // eyelash and specular pixels
};

struct RenderedEye {
  GrayImage image;
  GroundTruth truth;
};

/// Iris texture: sum of 8 separable harmonics in (angle, normalized radius).
class IrisTexture {
 public:
  static constexpr int kHarmonics = 8;
  static constexpr int kMinAngularFreq = 3;
  static constexpr int kMaxAngularFreq = 40;

  explicit IrisTexture(std::uint64_t identity_seed);

  /// Offset from the iris base intensity; theta in radians, rho in [0, 1].
  double operator()(double theta, double rho) const;

 private:
  struct Harmonic {
    double amplitude;
    double angular_freq;
    double angular_phase;
    double radial_freq;
  };
  std::array<Harmonic, kHarmonics> harmonics_{};
};

/// Throws Error(SpecInvalid) when the spec's invariants do not hold.
void validate(const EyeSpec& spec);

RenderedEye render_eye(const EyeSpec& spec);

enum class Perturbation { Dilation, Rotation, Noise, Clutter };

/// Dilation adds to the pupil radius, rotation to the angle, noise to the
/// noise sigma (with a fresh noise realization), clutter to the eyelash count.
EyeSpec perturb(const EyeSpec& spec, Perturbation kind, double magnitude);

std::optional<Perturbation> parse_perturbation(const std::string& name);

/// Ground-truth sidecar: `pupil cx cy r`, `limbic cx cy r`, `seed N`, `rotation R`.
std::string format_truth(const GroundTruth& truth);

// Test fixtures.

/// Anti-aliased filled disk.
GrayImage render_disk(int width, int height, const CircleParams& disk, int inside, int outside);

struct RingFixture {
  BinaryImage edges;
  GradientField gradients;  // unit vectors pointing away from the center
};

/// One-pixel ring of pixels whose distance to the center rounds to r.
RingFixture render_ring(int width, int height, const CircleParams& circle);

/// Samples f(x, y) at every pixel center, rounded and clamped.
GrayImage render_function(int width, int height, const std::function<double(double, double)>& f);

}  // namespace iris::synth
