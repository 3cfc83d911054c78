#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "iris/error.hpp"

namespace iris {

template <typename Scalar>
using CoefficientMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Detail subbands of one level. The first letter names the filter applied
/// across rows (vertical), the second the filter across columns (horizontal):
/// a signal that varies only along x lands in LH.
template <typename Scalar>
struct DetailBands {
  CoefficientMatrix<Scalar> lh;
  CoefficientMatrix<Scalar> hl;
  CoefficientMatrix<Scalar> hh;
};

template <typename Scalar>
struct SubbandSet {
  std::vector<DetailBands<Scalar>> details;  // details[k-1] is level k
  CoefficientMatrix<Scalar> approximation;   // LL at the deepest level

  int levels() const { return static_cast<int>(details.size()); }
};

/// One orthonormal Haar analysis step on 2x2 blocks [a b; c d]:
///   LL = (a+b+c+d)/2, LH = (a-b+c-d)/2, HL = (a+b-c-d)/2, HH = (a-b-c+d)/2.
/// This equals filtering rows then columns with (x+y)/sqrt2, (x-y)/sqrt2; the
/// /2 form is exact in binary floating point for integer-valued input.
template <typename Derived>
void haar_analyze_level(const Eigen::MatrixBase<Derived>& in, CoefficientMatrix<typename Derived::Scalar>& ll,
                        DetailBands<typename Derived::Scalar>& bands) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = in.rows() / 2;
  const Eigen::Index cols = in.cols() / 2;
  ll.resize(rows, cols);
  bands.lh.resize(rows, cols);
  bands.hl.resize(rows, cols);
  bands.hh.resize(rows, cols);
  const Scalar half(0.5);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Scalar a = in(2 * i, 2 * j);
      const Scalar b = in(2 * i, 2 * j + 1);
      const Scalar c = in(2 * i + 1, 2 * j);
      const Scalar d = in(2 * i + 1, 2 * j + 1);
      ll(i, j) = ((a + b) + (c + d)) * half;
      bands.lh(i, j) = ((a - b) + (c - d)) * half;
      bands.hl(i, j) = ((a + b) - (c + d)) * half;
      bands.hh(i, j) = ((a - b) - (c - d)) * half;
    }
  }
}

template <typename Derived>
SubbandSet<typename Derived::Scalar> haar_dwt2(const Eigen::MatrixBase<Derived>& m, int levels) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index block = Eigen::Index{1} << levels;
  if (levels < 1 || m.rows() % block != 0 || m.cols() % block != 0 || m.rows() == 0 || m.cols() == 0) {
    throw Error(ErrorCode::IndivisibleDims, std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                                " not divisible by 2^" + std::to_string(levels));
  }
  SubbandSet<Scalar> out;
  out.details.resize(static_cast<std::size_t>(levels));
  CoefficientMatrix<Scalar> current = m;
  for (int k = 0; k < levels; ++k) {
    CoefficientMatrix<Scalar> next;
    haar_analyze_level(current, next, out.details[static_cast<std::size_t>(k)]);
    current = std::move(next);
  }
  out.approximation = std::move(current);
  return out;
}

template <typename Scalar>
CoefficientMatrix<Scalar> haar_idwt2(const SubbandSet<Scalar>& s) {
  CoefficientMatrix<Scalar> current = s.approximation;
  const Scalar half(0.5);
  for (int k = s.levels() - 1; k >= 0; --k) {
    const auto& bands = s.details[static_cast<std::size_t>(k)];
    if (bands.lh.rows() != current.rows() || bands.lh.cols() != current.cols()) {
      throw Error(ErrorCode::IndivisibleDims, "subband dimensions do not nest");
    }
    CoefficientMatrix<Scalar> up(current.rows() * 2, current.cols() * 2);
    for (Eigen::Index i = 0; i < current.rows(); ++i) {
      for (Eigen::Index j = 0; j < current.cols(); ++j) {
        const Scalar ll = current(i, j);
        const Scalar lh = bands.lh(i, j);
        const Scalar hl = bands.hl(i, j);
        const Scalar hh = bands.hh(i, j);
        up(2 * i, 2 * j) = ((ll + lh) + (hl + hh)) * half;
        up(2 * i, 2 * j + 1) = ((ll - lh) + (hl - hh)) * half;
        up(2 * i + 1, 2 * j) = ((ll + lh) - (hl + hh)) * half;
        up(2 * i + 1, 2 * j + 1) = ((ll - lh) - (hl - hh)) * half;
      }
    }
    current = std::move(up);
  }
  return current;
}

/// Sum of squares over every subband.
template <typename Scalar>
Scalar subband_energy(const SubbandSet<Scalar>& s) {
  Scalar e = s.approximation.squaredNorm();
  for (const auto& b : s.details) e += b.lh.squaredNorm() + b.hl.squaredNorm() + b.hh.squaredNorm();
  return e;
}

}  // namespace iris
