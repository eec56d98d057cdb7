#include "convbeers/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "convbeers/error.hpp"

namespace convbeers {

template <class T>
BasicTensor<T>::BasicTensor(int n, int c, int h, int w, T fill) : n_(n), c_(c), h_(h), w_(w) {
  require(n >= 0 && c >= 0 && h >= 0 && w >= 0, ErrorCode::invalid_argument,
          "tensor: negative dimension");
  data_.assign(static_cast<std::size_t>(n) * c * h * w, fill);
}

template <class T>
BasicTensor<T>::BasicTensor(int n, int c, int h, int w, std::vector<T> data)
    : n_(n), c_(c), h_(h), w_(w), data_(std::move(data)) {
  require(n >= 0 && c >= 0 && h >= 0 && w >= 0, ErrorCode::invalid_argument,
          "tensor: negative dimension");
  require(data_.size() == static_cast<std::size_t>(n) * c * h * w, ErrorCode::dimension_mismatch,
          "tensor: data length " + std::to_string(data_.size()) + " does not match shape " +
              shape_string());
}

template <class T>
std::string BasicTensor<T>::shape_string() const {
  return "(" + std::to_string(n_) + "," + std::to_string(c_) + "," + std::to_string(h_) + "," +
         std::to_string(w_) + ")";
}

template <class T>
void BasicTensor<T>::check_finite(const char* what) const {
  for (T v : data_)
    if (!std::isfinite(v)) throw Error(ErrorCode::numerical, std::string(what) + ": NaN/Inf detected");
}

template class BasicTensor<float>;
template class BasicTensor<double>;

Tensor images_to_tensor(const std::vector<PanImage>& images, double scale) {
  require(!images.empty(), ErrorCode::invalid_argument, "images_to_tensor: no images");
  require(scale > 0, ErrorCode::invalid_argument, "images_to_tensor: scale must be positive");
  const int w = images.front().width(), h = images.front().height();
  Tensor t(static_cast<int>(images.size()), 1, h, w);
  for (std::size_t i = 0; i < images.size(); ++i) {
    require(images[i].same_shape(images.front()), ErrorCode::dimension_mismatch,
            "images_to_tensor: images differ in size");
    const auto px = images[i].pixels();
    float* dst = t.item(static_cast<int>(i));
    for (std::size_t k = 0; k < px.size(); ++k) dst[k] = static_cast<float>(px[k] / scale);
  }
  return t;
}

Tensor image_to_tensor(const PanImage& image, double scale) {
  return images_to_tensor({image}, scale);
}

PanImage tensor_to_image(const Tensor& t, int index, double scale, double gsd) {
  require(t.channels() == 1, ErrorCode::dimension_mismatch, "tensor_to_image: expected 1 channel");
  require(index >= 0 && index < t.batch(), ErrorCode::invalid_argument,
          "tensor_to_image: index out of range");
  const float* src = t.item(index);
  std::vector<float> px(t.plane());
  for (std::size_t k = 0; k < px.size(); ++k)
    px[k] = std::max(0.0f, static_cast<float>(src[k] * scale));
  return PanImage(t.width(), t.height(), std::move(px), gsd);
}

}  // namespace convbeers
