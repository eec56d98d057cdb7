#include "convbeers/network.hpp"

#include <cmath>

#include "convbeers/error.hpp"
#include "convbeers/rng.hpp"
#include "net_impl.hpp"
#include "parallel.hpp"

namespace convbeers {

std::size_t NetworkShape::parameter_count() const noexcept {
  const std::size_t c = static_cast<std::size_t>(channels);
  const std::size_t inner = c * c * 9 + c;
  return (9 * c + c) + 2 * static_cast<std::size_t>(blocks) * inner + inner + (9 * c + 1);
}

std::string layer_name(const NetworkShape& shape, int layer) {
  if (layer < 0) return "input";
  if (layer == 0) return "head";
  if (layer == 2 * shape.blocks + 1) return "body_end";
  if (layer == 2 * shape.blocks + 2) return "tail";
  const int b = (layer - 1) / 2;
  return "blocks." + std::to_string(b) + ((layer - 1) % 2 == 0 ? ".conv1" : ".conv2");
}

template <class T>
BasicParams<T>::BasicParams(NetworkShape shape) : shape_(shape) {
  require(shape.channels >= 1 && shape.blocks >= 0, ErrorCode::invalid_argument,
          "network: channels must be >= 1 and blocks >= 0");
  for (int l = 0; l < shape.layers(); ++l) {
    const auto cin = static_cast<std::uint32_t>(in_channels(l));
    const auto cout = static_cast<std::uint32_t>(out_channels(l));
    const std::string name = layer_name(shape, l);
    tensors_.push_back({name + ".weight", {cout, cin, 3, 3},
                        std::vector<T>(static_cast<std::size_t>(cout) * cin * 9, T(0))});
    tensors_.push_back({name + ".bias", {cout}, std::vector<T>(cout, T(0))});
  }
}

template <class T>
std::size_t BasicParams<T>::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.values.size();
  return n;
}

template <class T>
const ParamTensor<T>* BasicParams<T>::find(std::string_view name) const noexcept {
  for (const auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

template <class T>
void BasicParams<T>::zero() {
  for (auto& t : tensors_) std::fill(t.values.begin(), t.values.end(), T(0));
}

template class BasicParams<float>;
template class BasicParams<double>;

NetworkParams init_params(std::uint64_t seed, const NetworkShape& shape, InitScheme scheme) {
  NetworkParams p(shape);
  for (int l = 0; l < p.layers(); ++l) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(l)));
    const double fan_in = 9.0 * p.in_channels(l);
    double std = std::sqrt(2.0 / fan_in);
    const bool residual_out = (l >= 1 && l <= 2 * shape.blocks && (l - 1) % 2 == 1) ||
                              l == shape.layers() - 1;
    if (scheme == InitScheme::kaiming_damped_residual && residual_out) std *= 0.1;
    for (float& v : p.weight(l).values) v = static_cast<float>(std * rng.normal());
  }
  return p;
}

template <class T>
BasicTensor<T> forward(const BasicParams<T>& params, const BasicTensor<T>& x, int workers,
                       const ActivationHook<T>* hook) {
  require(x.channels() == 1, ErrorCode::dimension_mismatch,
          "forward: expected 1 input channel, got shape " + x.shape_string());
  require(x.height() >= 3 && x.width() >= 3, ErrorCode::invalid_argument,
          "forward: input must be at least 3x3");
  BasicTensor<T> y(x.batch(), 1, x.height(), x.width());
  detail::parallel_for(x.batch(), workers, [&](int i) {
    detail::forward_item<T>(params, x.item(i), x.height(), x.width(), y.item(i), hook, nullptr);
  });
  return y;
}

template BasicTensor<float> forward(const BasicParams<float>&, const BasicTensor<float>&, int,
                                    const ActivationHook<float>*);
template BasicTensor<double> forward(const BasicParams<double>&, const BasicTensor<double>&, int,
                                     const ActivationHook<double>*);

}  // namespace convbeers
