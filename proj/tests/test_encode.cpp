#include <doctest.h>

#include <cmath>
#include <random>

#include "iris/encode.hpp"
#include "iris/error.hpp"
#include "iris/haar.hpp"

using namespace iris;

namespace {

using Mat = CoefficientMatrix<double>;

Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Orthonormal one-level Haar analysis matrix: low-pass rows on top.
Eigen::MatrixXd haar_matrix(int n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n / 2; ++i) {
    h(i, 2 * i) = s;
    h(i, 2 * i + 1) = s;
    h(n / 2 + i, 2 * i) = s;
    h(n / 2 + i, 2 * i + 1) = -s;
  }
  return h;
}

// Brute-force DWT: H_r * M * H_c^T per level, quadrants read off as subbands.
SubbandSet<double> matrix_dwt(const Mat& m, int levels) {
  SubbandSet<double> out;
  Eigen::MatrixXd cur = m;
  for (int k = 0; k < levels; ++k) {
    const Eigen::Index r = cur.rows(), c = cur.cols();
    const Eigen::MatrixXd t = haar_matrix(static_cast<int>(r)) * cur * haar_matrix(static_cast<int>(c)).transpose();
    DetailBands<double> b;
    b.lh = t.topRightCorner(r / 2, c / 2);
    b.hl = t.bottomLeftCorner(r / 2, c / 2);
    b.hh = t.bottomRightCorner(r / 2, c / 2);
    out.details.push_back(b);
    cur = t.topLeftCorner(r / 2, c / 2);
  }
  out.approximation = cur;
  return out;
}

double max_abs(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

NormalizedIris full_strip(const GrayImage& g) { return {g, BinaryImage::Constant(g.rows(), g.cols(), true)}; }

}  // namespace

TEST_CASE("haar of a constant 8x8 matrix") {
  const Mat m = Mat::Constant(8, 8, 5.0);
  const auto s = haar_dwt2(m, 3);
  REQUIRE(s.levels() == 3);
  CHECK(s.approximation.rows() == 1);
  CHECK(s.approximation(0, 0) == doctest::Approx(40.0));
  for (const auto& b : s.details) {
    CHECK(b.lh.cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.hl.cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.hh.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(max_abs(haar_idwt2(s), m) == 0.0);
}

TEST_CASE("haar subband dimensions") {
  std::mt19937_64 rng(101);
  const auto s = haar_dwt2(random_matrix(rng, 64, 512), 3);
  for (int k = 1; k <= 3; ++k) {
    const auto& b = s.details[static_cast<std::size_t>(k - 1)];
    CHECK(b.lh.rows() == 64 >> k);
    CHECK(b.lh.cols() == 512 >> k);
    CHECK(b.hl.rows() == 64 >> k);
    CHECK(b.hh.cols() == 512 >> k);
  }
  CHECK(s.approximation.rows() == 8);
  CHECK(s.approximation.cols() == 64);
}

TEST_CASE("haar hand-computed horizontal ramp") {
  Mat ramp(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) ramp(i, j) = j;
  }
  const auto s = haar_dwt2(ramp, 3);
  // Level 1: LH = ((a-b)+(c-d))/2 = -1; level 2 on 4j+1: -4; level 3 on 16j+6: -16.
  CHECK((s.details[0].lh.array() == -1.0).all());
  CHECK((s.details[1].lh.array() == -4.0).all());
  CHECK(s.details[2].lh(0, 0) == -16.0);
  for (const auto& b : s.details) {
    CHECK((b.hl.array() == 0.0).all());
    CHECK((b.hh.array() == 0.0).all());
  }
  CHECK(s.approximation(0, 0) == 28.0);
}

TEST_CASE("haar matches the brute-force matrix product") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat m = random_matrix(rng, 64, 512);
    const auto fast = haar_dwt2(m, 3);
    const auto slow = matrix_dwt(m, 3);
    for (int k = 0; k < 3; ++k) {
      CHECK(max_abs(fast.details[k].lh, slow.details[k].lh) <= 1e-9);
      CHECK(max_abs(fast.details[k].hl, slow.details[k].hl) <= 1e-9);
      CHECK(max_abs(fast.details[k].hh, slow.details[k].hh) <= 1e-9);
    }
    CHECK(max_abs(fast.approximation, slow.approximation) <= 1e-9);
  }
}

TEST_CASE("haar perfect reconstruction and energy conservation") {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> pow2(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const int levels = pow2(rng);
    const int rows = (1 << levels) * pow2(rng);
    const int cols = (1 << levels) * pow2(rng) * 3;
    const Mat m = random_matrix(rng, rows, cols);
    const auto s = haar_dwt2(m, levels);
    CHECK(max_abs(haar_idwt2(s), m) <= 1e-9);
    const double e = m.squaredNorm();
    CHECK(std::abs(subband_energy(s) - e) <= 1e-6 * e);
    // Every level conserves energy on its own.
    Mat cur = m;
    for (int k = 0; k < levels; ++k) {
      Mat ll;
      DetailBands<double> b;
      haar_analyze_level(cur, ll, b);
      const double before = cur.squaredNorm();
      const double after = ll.squaredNorm() + b.lh.squaredNorm() + b.hl.squaredNorm() + b.hh.squaredNorm();
      CHECK(std::abs(after - before) <= 1e-9 * before);
      cur = ll;
    }
  }
}

TEST_CASE("haar rejects indivisible dimensions") {
  for (const auto& [r, c, l] : {std::tuple{12, 16, 3}, std::tuple{16, 20, 3}, std::tuple{8, 8, 0}}) {
    try {
      haar_dwt2(Mat::Zero(r, c), l);
      FAIL("expected IndivisibleDims");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IndivisibleDims);
    }
  }
}

TEST_CASE("inverse of a constant set and of an approximation-only set") {
  SubbandSet<double> s;
  s.approximation = Mat::Constant(2, 3, 16.0);
  for (int k = 3; k >= 1; --k) {
    const int rows = 2 << (3 - k), cols = 3 << (3 - k);
    s.details.insert(s.details.begin(), DetailBands<double>{Mat::Zero(rows, cols), Mat::Zero(rows, cols), Mat::Zero(rows, cols)});
  }
  const Mat flat = haar_idwt2(s);
  CHECK(flat.rows() == 16);
  CHECK(flat.cols() == 24);
  CHECK((flat.array() == 2.0).all());

  std::mt19937_64 rng(109);
  const Mat m = random_matrix(rng, 16, 32);
  auto d = haar_dwt2(m, 3);
  for (auto& b : d.details) {
    b.lh.setZero();
    b.hl.setZero();
    b.hh.setZero();
  }
  const Mat smooth = haar_idwt2(d);
  for (int bi = 0; bi < 2; ++bi) {
    for (int bj = 0; bj < 4; ++bj) {
      const double mean = m.block(bi * 8, bj * 8, 8, 8).mean();
      CHECK((smooth.block(bi * 8, bj * 8, 8, 8).array() - mean).abs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("haar works in single precision") {
  std::mt19937_64 rng(113);
  const CoefficientMatrix<float> m = random_matrix(rng, 16, 16).cast<float>();
  const auto s = haar_dwt2(m, 2);
  CHECK((haar_idwt2(s) - m).cwiseAbs().maxCoeff() <= 1e-3f);
}

TEST_CASE("constant strip encodes to all ones") {
  const auto code = encode_iris(full_strip(GrayImage::Constant(64, 512, 140)));
  CHECK(code.bits.all());
  CHECK(code.mask.all());
  CHECK(code.strip_rows == 64);
  CHECK(code.strip_cols == 512);
}

TEST_CASE("fully masked strip has an empty code mask") {
  const auto code = encode_iris({GrayImage::Constant(64, 512, 140), BinaryImage::Zero(64, 512)});
  CHECK(code.mask.none());
  CHECK(code.bits.size() == 2048);
}

TEST_CASE("encode rejects strips that do not divide into 8x8 blocks") {
  CHECK_THROWS_AS(encode_iris(full_strip(GrayImage::Zero(60, 512))), Error);
}

TEST_CASE("code mask is the AND over each 8x8 block") {
  NormalizedIris n = full_strip(GrayImage::Constant(64, 512, 90));
  n.mask(19, 333) = false;  // block row 2, block column 41
  n.mask(63, 0) = false;    // block row 7, block column 0
  const auto code = encode_iris(n);
  for (int seg = 0; seg < 4; ++seg) {
    for (int br = 0; br < 8; ++br) {
      for (int bc = 0; bc < 64; ++bc) {
        const bool hole = (br == 2 && bc == 41) || (br == 7 && bc == 0);
        CHECK(code.mask[static_cast<std::size_t>(seg * 512 + br * 64 + bc)] == !hole);
      }
    }
  }
}

TEST_CASE("triangle wave along columns alternates the LH segment") {
  GrayImage g(64, 512);
  for (int j = 0; j < 512; ++j) {
    const int t = j % 16 < 8 ? j % 8 : 7 - j % 8;
    g.col(j).setConstant(static_cast<std::uint8_t>(100 + 10 * t));
  }
  const auto code = encode_iris(full_strip(g));
  for (int br = 0; br < 8; ++br) {
    for (int bc = 0; bc < 64; ++bc) {
      const std::size_t k = static_cast<std::size_t>(br * 64 + bc);
      CHECK(code.bits[k]);                      // LL3 - mean is exactly 0
      CHECK(code.bits[512 + k] == (bc % 2 == 1));  // rising blocks negative, falling positive
      CHECK(code.bits[1024 + k]);               // HL3 exactly 0
      CHECK(code.bits[1536 + k]);               // HH3 exactly 0
    }
  }
}

TEST_CASE("exact zero coefficients encode as one") {
  // Level-3 coefficients in {-8, 0, 8} around LL3 = 1024 reconstruct to an
  // integer strip, so the coefficients are recovered exactly.
  std::mt19937_64 rng(127);
  std::uniform_int_distribution<int> tri(-1, 1);
  SubbandSet<double> s = haar_dwt2(Mat::Zero(64, 512), 3);
  s.approximation.setConstant(1024.0);
  auto& l3 = s.details[2];
  for (auto* band : {&l3.lh, &l3.hl, &l3.hh}) {
    for (Eigen::Index i = 0; i < band->size(); ++i) band->data()[i] = 8.0 * tri(rng);
  }
  const Mat strip = haar_idwt2(s);
  REQUIRE((strip.array() == strip.array().round()).all());
  const GrayImage g = strip.cast<std::uint8_t>();
  const auto code = encode_iris(full_strip(g));
  int zeros = 0;
  for (int seg = 1; seg < 4; ++seg) {
    const Mat& band = seg == 1 ? l3.lh : (seg == 2 ? l3.hl : l3.hh);
    for (int k = 0; k < 512; ++k) {
      const double c = band.data()[k];
      zeros += c == 0.0;
      CHECK(code.bits[static_cast<std::size_t>(seg * 512 + k)] == (c >= 0.0));
    }
  }
  CHECK(zeros > 100);
  for (int k = 0; k < 512; ++k) CHECK(code.bits[static_cast<std::size_t>(k)]);
}

TEST_CASE("encoding is invariant to positive affine gain") {
  std::mt19937_64 rng(131);
  std::uniform_int_distribution<int> level(0, 50);
  std::uniform_int_distribution<int> gain(1, 5);
  std::uniform_int_distribution<int> offset(0, 5);
  std::bernoulli_distribution hole(0.002);
  for (int trial = 0; trial < 25; ++trial) {
    NormalizedIris n{GrayImage(64, 512), BinaryImage(64, 512)};
    for (Eigen::Index i = 0; i < n.strip.size(); ++i) {
      n.strip.data()[i] = static_cast<std::uint8_t>(level(rng));
      n.mask.data()[i] = !hole(rng);
    }
    const int a = gain(rng), b = offset(rng);
    NormalizedIris scaled = n;
    scaled.strip = (n.strip.cast<int>().array() * a + b).cast<std::uint8_t>().matrix();
    const auto c0 = encode_iris(n);
    const auto c1 = encode_iris(scaled);
    CHECK(c0.bits == c1.bits);
    CHECK(c0.mask == c1.mask);
  }
}

TEST_CASE("pack layout and round trip") {
  IrisCode ones;
  ones.bits.set();
  ones.mask.set();
  const auto packed = pack_code(ones);
  REQUIRE(packed.size() == 512);
  CHECK(std::all_of(packed.begin(), packed.end(), [](std::uint8_t b) { return b == 0xFF; }));

  IrisCode first;
  first.bits.set(0);
  first.mask.set(9);
  const auto p = pack_code(first);
  CHECK(p[0] == 0x80);
  CHECK(p[256] == 0x00);
  CHECK(p[257] == 0x40);

  std::mt19937_64 rng(137);
  for (int trial = 0; trial < 50; ++trial) {
    IrisCode c;
    for (int k = 0; k < kCodeBits; ++k) {
      c.bits[static_cast<std::size_t>(k)] = rng() & 1;
      c.mask[static_cast<std::size_t>(k)] = rng() & 1;
    }
    const auto back = unpack_code(pack_code(c));
    CHECK(back.bits == c.bits);
    CHECK(back.mask == c.mask);
  }
}

TEST_CASE("unpack rejects wrong lengths") {
  for (const std::size_t n : {0u, 255u, 511u, 513u}) {
    const std::vector<std::uint8_t> bytes(n, 0);
    try {
      unpack_code(bytes);
      FAIL("expected BadLength");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadLength);
    }
  }
}
