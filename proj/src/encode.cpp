#include "iris/encode.hpp"

#include <string>

#include "iris/error.hpp"
#include "iris/haar.hpp"

namespace iris {

IrisCode encode_iris(const NormalizedIris& n) {
  constexpr int block = 1 << kHaarLevels;
  if (n.rows() % block != 0 || n.cols() % block != 0 || n.rows() == 0) {
    throw Error(ErrorCode::IndivisibleDims, "strip must be divisible by 8 in both axes");
  }
  const int seg_rows = n.rows() / block;
  const int seg_cols = n.cols() / block;
  const int seg_len = seg_rows * seg_cols;
  if (4 * seg_len != kCodeBits) {
    throw Error(ErrorCode::IndivisibleDims, "strip " + std::to_string(n.rows()) + "x" + std::to_string(n.cols()) +
                                                " does not yield a " + std::to_string(kCodeBits) + "-bit code");
  }

  const auto bands = haar_dwt2(CoefficientMatrix<double>(n.strip.cast<double>()), kHaarLevels);
  const auto& level3 = bands.details.back();
  // sum / count is exact here: LL3 entries are multiples of 1/8 and the count is a power of two.
  const CoefficientMatrix<double> centered = bands.approximation.array() - bands.approximation.mean();

  IrisCode code;
  code.strip_rows = n.rows();
  code.strip_cols = n.cols();
  const CoefficientMatrix<double>* segments[4] = {&centered, &level3.lh, &level3.hl, &level3.hh};
  for (int s = 0; s < 4; ++s) {
    for (int i = 0; i < seg_rows; ++i) {
      for (int j = 0; j < seg_cols; ++j) {
        code.bits[static_cast<std::size_t>(s * seg_len + i * seg_cols + j)] = (*segments[s])(i, j) >= 0.0;
      }
    }
  }
  for (int i = 0; i < seg_rows; ++i) {
    for (int j = 0; j < seg_cols; ++j) {
      const bool usable = n.mask.block(i * block, j * block, block, block).all();
      for (int s = 0; s < 4; ++s) code.mask[static_cast<std::size_t>(s * seg_len + i * seg_cols + j)] = usable;
    }
  }
  return code;
}

namespace {

void pack_bits(const std::bitset<kCodeBits>& bits, std::uint8_t* out) {
  for (int byte = 0; byte < kCodeBytes; ++byte) {
    std::uint8_t v = 0;
    for (int b = 0; b < 8; ++b) v = static_cast<std::uint8_t>((v << 1) | (bits[static_cast<std::size_t>(byte * 8 + b)] ? 1 : 0));
    out[byte] = v;
  }
}

void unpack_bits(const std::uint8_t* in, std::bitset<kCodeBits>& bits) {
  for (int byte = 0; byte < kCodeBytes; ++byte) {
    for (int b = 0; b < 8; ++b) bits[static_cast<std::size_t>(byte * 8 + b)] = (in[byte] >> (7 - b)) & 1;
  }
}

}  // namespace

std::vector<std::uint8_t> pack_code(const IrisCode& code) {
  std::vector<std::uint8_t> out(2 * kCodeBytes);
  pack_bits(code.bits, out.data());
  pack_bits(code.mask, out.data() + kCodeBytes);
  return out;
}

IrisCode unpack_code(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 2 * kCodeBytes) {
    throw Error(ErrorCode::BadLength, "packed code needs " + std::to_string(2 * kCodeBytes) + " bytes, got " +
                                          std::to_string(bytes.size()));
  }
  IrisCode code;
  unpack_bits(bytes.data(), code.bits);
  unpack_bits(bytes.data() + kCodeBytes, code.mask);
  return code;
}

}  // namespace iris
