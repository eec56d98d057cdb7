#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "convbeers/error.hpp"
#include "convbeers/image.hpp"
#include "convbeers/rng.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() / ("convbeers_unit_" + tag)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

inline convbeers::PanImage random_image(convbeers::Rng& rng, int w, int h, double lo, double hi) {
  std::vector<float> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = static_cast<float>(rng.uniform(lo, hi));
  return convbeers::PanImage(w, h, std::move(px));
}

template <class Fn>
convbeers::ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const convbeers::Error& e) {
    return e.code();
  }
  FAIL("expected a convbeers::Error");
  return convbeers::ErrorCode::invalid_argument;
}

}  // namespace testing
