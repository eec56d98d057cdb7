#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "convbeers/image.hpp"

namespace convbeers {

/// NCHW tensor, channel-major within each batch item.
template <class T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int n, int c, int h, int w, T fill = T(0));
  BasicTensor(int n, int c, int h, int w, std::vector<T> data);

  int batch() const noexcept { return n_; }
  int channels() const noexcept { return c_; }
  int height() const noexcept { return h_; }
  int width() const noexcept { return w_; }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h_) * w_; }
  std::size_t item_size() const noexcept { return plane() * c_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool same_shape(const BasicTensor& o) const noexcept {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }
  std::string shape_string() const;

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  T* item(int i) noexcept { return data_.data() + item_size() * i; }
  const T* item(int i) const noexcept { return data_.data() + item_size() * i; }
  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  T& at(int n, int c, int y, int x) noexcept {
    return data_[((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x];
  }
  T at(int n, int c, int y, int x) const noexcept {
    return data_[((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x];
  }

  /// Throws a numerical error naming `what` if any value is NaN or Inf.
  void check_finite(const char* what) const;

  template <class U>
  BasicTensor<U> cast() const {
    return BasicTensor<U>(n_, c_, h_, w_, std::vector<U>(data_.begin(), data_.end()));
  }

 private:
  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

/// Stacks single-band images into an (N,1,H,W) tensor of radiance / scale.
Tensor images_to_tensor(const std::vector<PanImage>& images, double scale);
Tensor image_to_tensor(const PanImage& image, double scale);

/// Item `index` of a 1-channel tensor times `scale`, clamped to >= 0.
PanImage tensor_to_image(const Tensor& t, int index, double scale, double gsd = 1.0);

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace convbeers
