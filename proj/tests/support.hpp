#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "iris/types.hpp"

namespace iris::test {

inline GrayImage random_gray(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> level(0, 255);
  GrayImage img(h, w);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(level(rng));
  return img;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("iris_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace iris::test
