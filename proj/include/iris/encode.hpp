#pragma once

#include <bitset>
#include <cstdint>
#include <span>
#include <vector>

#include "iris/normalize.hpp"

namespace iris {

inline constexpr int kCodeBits = 2048;
inline constexpr int kCodeBytes = kCodeBits / 8;
inline constexpr int kHaarLevels = 3;

/// Bit order: four segments (LL3 - mean(LL3), LH3, HL3, HH3), each the
/// level-3 subband in row-major order.
struct IrisCode {
  std::bitset<kCodeBits> bits;
  std::bitset<kCodeBits> mask;  // true = usable
  int strip_rows = 64;
  int strip_cols = 512;
  int shift = 0;

  friend bool operator==(const IrisCode&, const IrisCode&) = default;
};

/// Sign rule: coefficients >= 0 (including exactly zero) encode as 1.
IrisCode encode_iris(const NormalizedIris& n);

/// 256 code bytes followed by 256 mask bytes, MSB-first.
std::vector<std::uint8_t> pack_code(const IrisCode& code);
IrisCode unpack_code(std::span<const std::uint8_t> bytes);

}  // namespace iris
