#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iris/error.hpp"
#include "iris/localize.hpp"
#include "iris/normalize.hpp"
#include "iris/synth.hpp"

using namespace iris;
using namespace iris::synth;

namespace {

ErrorCode validate_code(const EyeSpec& s) {
  try {
    validate(s);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

NormalizedIris strip_of(const RenderedEye& eye) { return rubber_sheet(eye.image, {eye.truth.pupil, eye.truth.limbic}); }

double pearson(const GrayImage& a, const GrayImage& b) {
  const Eigen::ArrayXd x = a.reshaped().cast<double>().array();
  const Eigen::ArrayXd y = b.reshaped().cast<double>().array();
  const Eigen::ArrayXd dx = x - x.mean();
  const Eigen::ArrayXd dy = y - y.mean();
  return (dx * dy).sum() / std::sqrt((dx * dx).sum() * (dy * dy).sum());
}

}  // namespace

TEST_CASE("counter-based generator") {
  CHECK(hash64(1, 2, 3) == hash64(1, 2, 3));
  CHECK(hash64(1, 2, 3) != hash64(1, 2, 4));
  CHECK(hash64(1, 2, 3) != hash64(1, 3, 3));
  CHECK(hash64(1, 2, 3) != hash64(2, 2, 3));
  double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(7, 1, static_cast<std::uint64_t>(i));
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double z = standard_normal(7, 2, static_cast<std::uint64_t>(i));
    sum += z;
    sq += z * z;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("rendering is deterministic") {
  EyeSpec s;
  s.identity_seed = 17;
  s.noise_seed = 99;
  s.noise_sigma = 6.0;
  s.eyelash_count = 12;
  s.specular = Specular{150.0, 120.0, 6.0, 250};
  const auto a = render_eye(s);
  const auto b = render_eye(s);
  CHECK(a.image == b.image);
  CHECK(a.truth.clutter == b.truth.clutter);
  s.noise_seed = 100;
  CHECK(render_eye(s).image != a.image);
  s.noise_seed = 99;
  s.identity_seed = 18;
  CHECK(render_eye(s).image != a.image);
}

TEST_CASE("clean render regions") {
  EyeSpec s;
  s.identity_seed = 3;
  const auto eye = render_eye(s);
  CHECK(eye.image(140, 160) == 30);
  CHECK(eye.image(5, 5) == 200);
  CHECK(eye.truth.limbic.cx == s.pupil.cx);
  CHECK(eye.truth.limbic.r == 110.0);
  CHECK(eye.truth.clutter.count() == 0);
  // Iris texture stays around the base intensity.
  const auto n = strip_of(eye);
  const double mean = n.strip.cast<double>().mean();
  CHECK(std::abs(mean - 120.0) < 15.0);
}

TEST_CASE("texture vanishes at the pupillary boundary") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const IrisTexture t(seed);
    double peak = 0.0;
    for (int k = 0; k < 360; ++k) {
      const double theta = k * std::numbers::pi / 180.0;
      CHECK(std::abs(t(theta, 0.0)) < 1e-9);
      for (double rho : {0.25, 0.5, 0.75}) peak = std::max(peak, std::abs(t(theta, rho)));
      CHECK(t(theta, 0.5) == doctest::Approx(t(theta + 2.0 * std::numbers::pi, 0.5)).epsilon(1e-9));
    }
    CHECK(peak > 5.0);
    CHECK(peak < 80.0);
  }
}

TEST_CASE("eyelashes and speculars are recorded as clutter") {
  EyeSpec s;
  s.identity_seed = 5;
  s.eyelash_count = 20;
  const auto lashes = render_eye(s);
  CHECK(lashes.truth.clutter.count() > 200);
  double mean = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < lashes.image.size(); ++i) {
    if (!lashes.truth.clutter.data()[i]) continue;
    mean += lashes.image.data()[i];
    ++n;
  }
  CHECK(mean / n < 90.0);

  s.eyelash_count = 0;
  s.specular = Specular{180.0, 130.0, 5.0, 250};
  const auto spot = render_eye(s);
  CHECK(spot.image(130, 180) == 250);
  CHECK(spot.truth.clutter(130, 180));
  CHECK(!spot.truth.clutter(130, 190));
  CHECK(spot.truth.clutter.count() > 60);
  CHECK(spot.truth.clutter.count() < 120);
}

TEST_CASE("spec validation") {
  EyeSpec s;
  validate(s);
  auto bad = s;
  bad.pupil.r = 0.0;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.pupil.r = 110.0;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.limbic_r = 140.0;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.pupil.cx = 100.0;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.iris_intensity = 256;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.noise_sigma = -1.0;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.eyelash_count = -1;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.specular = Specular{10.0, 10.0, 0.0, 250};
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  bad = s;
  bad.width = 32;
  CHECK(validate_code(bad) == ErrorCode::SpecInvalid);
  CHECK_THROWS_AS(render_eye(bad), Error);
}

TEST_CASE("perturbations") {
  EyeSpec s;
  s.noise_seed = 11;
  CHECK(perturb(s, Perturbation::Dilation, 5.0).pupil.r == 50.0);
  CHECK(perturb(s, Perturbation::Dilation, -5.0).pupil.r == 40.0);
  CHECK(perturb(s, Perturbation::Rotation, 0.1).rotation == doctest::Approx(0.1));
  const auto noisy = perturb(s, Perturbation::Noise, 4.0);
  CHECK(noisy.noise_sigma == 4.0);
  CHECK(noisy.noise_seed != s.noise_seed);
  CHECK(perturb(s, Perturbation::Clutter, 3.0).eyelash_count == 3);
  // Everything else is left alone.
  const auto d = perturb(s, Perturbation::Dilation, 5.0);
  CHECK(d.identity_seed == s.identity_seed);
  CHECK(d.limbic_r == s.limbic_r);
  CHECK(d.noise_seed == s.noise_seed);
  try {
    perturb(s, Perturbation::Dilation, 80.0);
    FAIL("expected SpecInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpecInvalid);
  }
  CHECK(parse_perturbation("dilation") == Perturbation::Dilation);
  CHECK(parse_perturbation("rotation") == Perturbation::Rotation);
  CHECK(parse_perturbation("noise") == Perturbation::Noise);
  CHECK(parse_perturbation("clutter") == Perturbation::Clutter);
  CHECK(!parse_perturbation("blur"));
}

TEST_CASE("normalized texture is invariant to pupil dilation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EyeSpec s;
    s.identity_seed = seed;
    s.pupil.r = 35.0;
    const auto small = strip_of(render_eye(s));
    s.pupil.r = 55.0;
    const auto large = strip_of(render_eye(s));
    const double mad = (small.strip.cast<double>() - large.strip.cast<double>()).cwiseAbs().mean();
    CHECK(mad <= 3.0);
  }
}

TEST_CASE("different identities are uncorrelated") {
  // Rows 0 and 63 sit on the pupil and sclera steps, which every identity
  // shares; per pair only the texture rows are compared.
  double worst = 0.0, mean_full = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EyeSpec a, b;
    a.identity_seed = seed;
    b.identity_seed = seed + 5000;
    const GrayImage sa = strip_of(render_eye(a)).strip;
    const GrayImage sb = strip_of(render_eye(b)).strip;
    worst = std::max(worst, std::abs(pearson(sa.middleRows(1, 62), sb.middleRows(1, 62))));
    mean_full += std::abs(pearson(sa, sb)) / 100.0;
  }
  CHECK(worst < 0.3);
  CHECK(mean_full < 0.3);
}

TEST_CASE("integro-differential localizer recovers clean renders") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    EyeSpec s;
    s.identity_seed = seed;
    s.pupil = {150.0 + 5.0 * static_cast<double>(seed), 135.0, 40.0 + 5.0 * static_cast<double>(seed)};
    const auto eye = render_eye(s);
    const auto c = idop_localize(eye.image, {100, 220, 90, 190, 20, 90});
    CHECK(std::abs(c.cx - s.pupil.cx) <= 1.0);
    CHECK(std::abs(c.cy - s.pupil.cy) <= 1.0);
    CHECK(std::abs(c.r - s.pupil.r) <= 1.0);
  }
}

TEST_CASE("truth sidecar format") {
  GroundTruth t;
  t.pupil = {160.0, 140.0, 45.0};
  t.limbic = {160.0, 140.0, 110.0};
  t.identity_seed = 42;
  t.rotation = 0.25;
  CHECK(format_truth(t) ==
        "pupil 160.0000 140.0000 45.0000\nlimbic 160.0000 140.0000 110.0000\nseed 42\nrotation 0.25\n");
}

TEST_CASE("fixtures") {
  const auto disk = render_disk(40, 40, {20.0, 20.0, 10.0}, 0, 255);
  CHECK(disk(20, 20) == 0);
  CHECK(disk(0, 0) == 255);
  CHECK(disk(20, 30) > 0);
  CHECK(disk(20, 30) < 255);

  const auto ring = render_ring(60, 60, {30.0, 30.0, 12.0});
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 60; ++x) {
      const double d = std::hypot(x - 30.0, y - 30.0);
      CHECK(ring.edges(y, x) == (std::lround(d) == 12));
      if (ring.edges(y, x)) {
        CHECK(ring.gradients.gx(y, x) == doctest::Approx((x - 30.0) / d));
        CHECK(ring.gradients.gy(y, x) == doctest::Approx((y - 30.0) / d));
      }
    }
  }

  const auto f = render_function(4, 3, [](double x, double y) { return 100.0 * x + y - 50.0; });
  CHECK(f(0, 0) == 0);
  CHECK(f(2, 1) == 52);
  CHECK(f(0, 3) == 250);
}
