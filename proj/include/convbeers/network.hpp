#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "convbeers/tensor.hpp"

namespace convbeers {

/// EDSR-style body: head conv, `blocks` residual blocks of two convs,
/// body_end conv, tail conv. All convs are 3x3, stride 1, zero pad 1.
struct NetworkShape {
  int channels = 64;
  int blocks = 16;

  int layers() const noexcept { return 2 * blocks + 3; }
  std::size_t parameter_count() const noexcept;
  bool operator==(const NetworkShape&) const = default;
};

template <class T>
struct ParamTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<T> values;
};

/// Parameters in canonical order: head, blocks.i.conv1, blocks.i.conv2,
/// body_end, tail; weight then bias for each conv. Weights are laid out
/// [out][in][ky][kx].
template <class T>
class BasicParams {
 public:
  BasicParams() = default;
  explicit BasicParams(NetworkShape shape);  // zero-filled

  const NetworkShape& shape() const noexcept { return shape_; }
  int layers() const noexcept { return shape_.layers(); }
  std::size_t parameter_count() const noexcept;

  std::vector<ParamTensor<T>>& tensors() noexcept { return tensors_; }
  const std::vector<ParamTensor<T>>& tensors() const noexcept { return tensors_; }

  ParamTensor<T>& weight(int layer) { return tensors_[static_cast<std::size_t>(2 * layer)]; }
  const ParamTensor<T>& weight(int layer) const { return tensors_[static_cast<std::size_t>(2 * layer)]; }
  ParamTensor<T>& bias(int layer) { return tensors_[static_cast<std::size_t>(2 * layer + 1)]; }
  const ParamTensor<T>& bias(int layer) const { return tensors_[static_cast<std::size_t>(2 * layer + 1)]; }

  int in_channels(int layer) const noexcept { return layer == 0 ? 1 : shape_.channels; }
  int out_channels(int layer) const noexcept { return layer == layers() - 1 ? 1 : shape_.channels; }

  const ParamTensor<T>* find(std::string_view name) const noexcept;

  /// Sets every value to zero, keeping the layout.
  void zero();

  template <class U>
  BasicParams<U> cast() const {
    BasicParams<U> out(shape_);
    for (std::size_t i = 0; i < tensors_.size(); ++i)
      out.tensors()[i].values.assign(tensors_[i].values.begin(), tensors_[i].values.end());
    return out;
  }

 private:
  NetworkShape shape_;
  std::vector<ParamTensor<T>> tensors_;
};

using NetworkParams = BasicParams<float>;

/// Canonical name of layer `layer` ("head", "blocks.3.conv2", "body_end", "tail").
std::string layer_name(const NetworkShape& shape, int layer);

enum class InitScheme {
  kaiming,                  ///< N(0, 2/fan_in) on every conv
  kaiming_damped_residual,  ///< as kaiming, residual-output convs scaled by 0.1
};

/// Fan-in scaled normal weights, zero biases; deterministic per seed.
NetworkParams init_params(std::uint64_t seed, const NetworkShape& shape = {},
                          InitScheme scheme = InitScheme::kaiming);

/// Called on every conv output (after bias, before ReLU or skip adds) with
/// the layer index, and once on the network input with layer -1. May modify
/// values in place.
template <class T>
using ActivationHook = std::function<void(int layer, T* data, std::size_t n)>;

/// Forward pass over an (N,1,H,W) batch; items run on up to `workers` threads.
/// Throws a numerical error when an activation becomes NaN/Inf.
template <class T>
BasicTensor<T> forward(const BasicParams<T>& params, const BasicTensor<T>& x, int workers = 1,
                       const ActivationHook<T>* hook = nullptr);

extern template class BasicParams<float>;
extern template class BasicParams<double>;

}  // namespace convbeers
