#include "convbeers/backward.hpp"

#include <cmath>

#include "convbeers/error.hpp"
#include "net_impl.hpp"
#include "parallel.hpp"

namespace convbeers {

template <class T>
BackwardResult<T> backward(const BasicParams<T>& params, const BasicTensor<T>& x,
                           const BasicTensor<T>& target, const LossWeights& weights,
                           const FeatureExtractor* fx, int workers) {
  require(x.same_shape(target), ErrorCode::dimension_mismatch,
          "backward: input " + x.shape_string() + " vs target " + target.shape_string());
  require(x.channels() == 1 && x.height() >= 3 && x.width() >= 3 && x.batch() >= 1,
          ErrorCode::invalid_argument, "backward: expected (N,1,H,W) with H, W >= 3");
  const int n = x.batch(), h = x.height(), w = x.width();
  const std::size_t plane = x.plane();
  std::vector<BasicParams<T>> item_grads(static_cast<std::size_t>(n));
  std::vector<LossBreakdown> item_loss(static_cast<std::size_t>(n));

  detail::parallel_for(n, workers, [&](int i) {
    detail::ItemCache<T> cache;
    BasicTensor<T> out(1, 1, h, w);
    detail::forward_item<T>(params, x.item(i), h, w, out.data(), nullptr, &cache);
    BasicTensor<T> tgt(1, 1, h, w, std::vector<T>(target.item(i), target.item(i) + plane));
    BasicTensor<T> dy;
    item_loss[static_cast<std::size_t>(i)] =
        loss_total_grad<T>(out, tgt, weights, fx, &dy, 1.0 / n);
    BasicParams<T> g(params.shape());
    detail::backward_item<T>(params, cache, h, w, dy.data(), g);
    item_grads[static_cast<std::size_t>(i)] = std::move(g);
  });

  BackwardResult<T> result{std::move(item_grads[0]), {}};
  for (int i = 1; i < n; ++i) {
    auto& dst = result.grads.tensors();
    const auto& src = item_grads[static_cast<std::size_t>(i)].tensors();
    for (std::size_t t = 0; t < dst.size(); ++t)
      for (std::size_t k = 0; k < dst[t].values.size(); ++k) dst[t].values[k] += src[t].values[k];
  }
  for (const auto& l : item_loss) {
    result.loss.l1 += l.l1 / n;
    result.loss.fft += l.fft / n;
    result.loss.perceptual += l.perceptual / n;
    result.loss.total += l.total / n;
  }
  for (const auto& t : result.grads.tensors())
    for (T v : t.values)
      if (!std::isfinite(v))
        throw Error(ErrorCode::numerical, "backward: NaN/Inf gradient in " + t.name);
  return result;
}

template BackwardResult<float> backward(const BasicParams<float>&, const BasicTensor<float>&,
                                        const BasicTensor<float>&, const LossWeights&,
                                        const FeatureExtractor*, int);
template BackwardResult<double> backward(const BasicParams<double>&, const BasicTensor<double>&,
                                         const BasicTensor<double>&, const LossWeights&,
                                         const FeatureExtractor*, int);

void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state, double lr) {
  require(params.shape() == grads.shape(), ErrorCode::dimension_mismatch,
          "adam_step: gradient layout does not match parameters");
  if (state.m.tensors().empty()) {
    state.m = NetworkParams(params.shape());
    state.v = NetworkParams(params.shape());
  }
  require(state.m.shape() == params.shape(), ErrorCode::dimension_mismatch,
          "adam_step: optimizer state layout does not match parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(kAdamBeta1, t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, t);
  auto& pt = params.tensors();
  const auto& gt = grads.tensors();
  for (std::size_t i = 0; i < pt.size(); ++i) {
    auto& p = pt[i].values;
    const auto& g = gt[i].values;
    auto& m = state.m.tensors()[i].values;
    auto& v = state.v.tensors()[i].values;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = g[k];
      const double mk = kAdamBeta1 * m[k] + (1 - kAdamBeta1) * gk;
      const double vk = kAdamBeta2 * v[k] + (1 - kAdamBeta2) * gk * gk;
      m[k] = static_cast<float>(mk);
      v[k] = static_cast<float>(vk);
      p[k] = static_cast<float>(p[k] - lr * (mk / c1) / (std::sqrt(vk / c2) + kAdamEps));
    }
  }
}

}  // namespace convbeers
