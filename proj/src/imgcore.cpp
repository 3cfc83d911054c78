#include "iris/imgcore.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

namespace iris {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::BadKernel: return "BadKernel";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::BadThresholds: return "BadThresholds";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::EmptyRadiusRange: return "EmptyRadiusRange";
    case ErrorCode::PupilNotFound: return "PupilNotFound";
    case ErrorCode::SearchRangeOutOfImage: return "SearchRangeOutOfImage";
    case ErrorCode::EmptySearchSpace: return "EmptySearchSpace";
    case ErrorCode::DegenerateMaximum: return "DegenerateMaximum";
    case ErrorCode::DegenerateAnnulus: return "DegenerateAnnulus";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::IndivisibleDims: return "IndivisibleDims";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownSubject: return "UnknownSubject";
    case ErrorCode::EmptyStore: return "EmptyStore";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::array<std::uint64_t, 256> Histogram::cumulative() const {
  std::array<std::uint64_t, 256> cdf{};
  std::partial_sum(counts.begin(), counts.end(), cdf.begin());
  return cdf;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads one decimal token.
  long next_number() {
    skip_blanks();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "expected a decimal number in PGM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw Error(ErrorCode::MalformedHeader, "header value too large");
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_blanks() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::MalformedHeader, "bad magic, expected P5");
  }
  HeaderReader reader(bytes);
  const long w = reader.next_number();
  const long h = reader.next_number();
  const long maxval = reader.next_number();
  if (w <= 0 || h <= 0) throw Error(ErrorCode::MalformedHeader, "non-positive dimensions");
  if (maxval <= 0) throw Error(ErrorCode::MalformedHeader, "maxval must be positive");
  if (maxval > 255) throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " > 255");
  const std::size_t offset = reader.raster_offset();
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < offset || bytes.size() - offset < need) {
    throw Error(ErrorCode::TruncatedData, "expected " + std::to_string(need) + " pixel bytes, found " +
                                              std::to_string(bytes.size() > offset ? bytes.size() - offset : 0));
  }
  GrayImage image(h, w);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(offset), need, image.data());
  return image;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.data(), image.data() + image.size());
  return out;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Histogram compute_histogram(const GrayImage& image) {
  Histogram hist;
  for (Eigen::Index i = 0; i < image.size(); ++i) ++hist.counts[image.data()[i]];
  hist.total = static_cast<std::uint64_t>(image.size());
  return hist;
}

Histogram histogram_from_weights(std::span<const double> weights, std::uint64_t total) {
  if (weights.size() != 256) throw Error(ErrorCode::InvalidArgument, "histogram needs 256 weights");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0)) throw Error(ErrorCode::EmptyReference, "weights sum to zero");
  Histogram hist;
  for (std::size_t g = 0; g < 256; ++g) {
    hist.counts[g] = static_cast<std::uint64_t>(std::llround(std::max(0.0, weights[g]) / sum * static_cast<double>(total)));
    hist.total += hist.counts[g];
  }
  return hist;
}

const Histogram& default_reference_histogram() {
  static const Histogram reference = [] {
    std::array<double, 256> weights{};
    const auto bump = [](double g, double mu, double sigma) {
      const double z = (g - mu) / sigma;
      return std::exp(-0.5 * z * z) / sigma;
    };
    for (int g = 0; g < 256; ++g) {
      weights[g] = 0.15 * bump(g, 30.0, 10.0) + 0.85 * bump(g, 170.0, 30.0);
    }
    return histogram_from_weights(weights, 1'000'000);
  }();
  return reference;
}

std::array<std::uint8_t, 256> histogram_matching_lut(const Histogram& source, const Histogram& reference) {
  if (reference.total == 0) throw Error(ErrorCode::EmptyReference, "reference histogram is empty");
  std::array<std::uint8_t, 256> lut{};
  if (source.total == 0) return lut;
  const auto src_cdf = source.cumulative();
  const auto ref_cdf = reference.cumulative();
  // CDF_ref(g') >= CDF_src(g)  <=>  ref_cdf[g'] * src.total >= src_cdf[g] * ref.total, exact in 128 bits.
  int g_ref = 0;
  for (int g = 0; g < 256; ++g) {
    const auto lhs_target = static_cast<unsigned __int128>(src_cdf[g]) * reference.total;
    while (g_ref < 255 && static_cast<unsigned __int128>(ref_cdf[g_ref]) * source.total < lhs_target) ++g_ref;
    lut[g] = static_cast<std::uint8_t>(g_ref);
  }
  return lut;
}

GrayImage match_histogram(const GrayImage& image, const Histogram& reference) {
  const auto lut = histogram_matching_lut(compute_histogram(image), reference);
  return image.unaryExpr([&lut](std::uint8_t v) { return lut[v]; });
}

std::vector<double> gaussian_kernel(double sigma, int kernel_size) {
  if (kernel_size < 3 || kernel_size % 2 == 0) {
    throw Error(ErrorCode::BadKernel, "kernel size must be odd and >= 3, got " + std::to_string(kernel_size));
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::BadKernel, "sigma must be positive");
  const int half = kernel_size / 2;
  std::vector<double> kernel(static_cast<std::size_t>(kernel_size));
  for (int i = -half; i <= half; ++i) kernel[static_cast<std::size_t>(i + half)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& k : kernel) k /= sum;
  return kernel;
}

RealImage convolve_separable(const RealImage& image, std::span<const double> kernel) {
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  const auto half = static_cast<Eigen::Index>(kernel.size() / 2);
  RealImage tmp(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Eigen::Index k = -half; k <= half; ++k) {
        acc += kernel[static_cast<std::size_t>(k + half)] * image(y, std::clamp<Eigen::Index>(x + k, 0, w - 1));
      }
      tmp(y, x) = acc;
    }
  }
  RealImage out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Eigen::Index k = -half; k <= half; ++k) {
        acc += kernel[static_cast<std::size_t>(k + half)] * tmp(std::clamp<Eigen::Index>(y + k, 0, h - 1), x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

std::uint8_t saturate_round(double value) {
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(value), 0, 255));
}

GrayImage to_gray(const RealImage& image) {
  return image.unaryExpr([](double v) { return saturate_round(v); });
}

GrayImage gaussian_blur(const GrayImage& image, double sigma, int kernel_size) {
  const auto kernel = gaussian_kernel(sigma, kernel_size);
  return to_gray(convolve_separable(image.cast<double>(), kernel));
}

BinaryImage threshold_binary(const GrayImage& image, int t) {
  if (t < 0 || t > 255) throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 255]");
  return image.unaryExpr([t](std::uint8_t v) { return static_cast<int>(v) <= t; });
}

GrayImage binary_to_gray(const BinaryImage& bits) {
  return bits.unaryExpr([](bool b) { return static_cast<std::uint8_t>(b ? 255 : 0); });
}

}  // namespace iris
