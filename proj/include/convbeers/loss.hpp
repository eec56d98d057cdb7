#pragma once

#include <vector>

#include "convbeers/tensor.hpp"

namespace convbeers {

struct LossWeights {
  double l1 = 1.0;
  double perceptual = 0.5;  ///< ignored when no feature extractor is supplied
  double fft = 0.1;
};

struct LossBreakdown {
  double l1 = 0;
  double fft = 0;
  double perceptual = 0;
  double total = 0;
};

/// Pluggable feature network for the perceptual term. No implementation
/// ships with the library.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  /// Feature maps of an (N,1,H,W) image batch.
  virtual std::vector<Tensor> features(const Tensor& image) const = 0;
  /// One weight per feature map.
  virtual std::vector<double> layer_weights() const = 0;
  /// Vector-Jacobian product: gradient w.r.t. `image` given gradients
  /// w.r.t. each feature map.
  virtual Tensor features_vjp(const Tensor& image, const std::vector<Tensor>& feature_grads) const = 0;
};

/// Mean absolute difference over all elements.
template <class T>
double loss_l1(const BasicTensor<T>& restored, const BasicTensor<T>& target);

/// Complex-component L1 between per-image 2-D DFTs, divided by the element count.
template <class T>
double loss_fft(const BasicTensor<T>& restored, const BasicTensor<T>& target);

/// Sum over feature maps of w_l * mean squared feature difference.
double loss_perceptual(const Tensor& restored, const Tensor& target, const FeatureExtractor& fx);

template <class T>
LossBreakdown loss_total(const BasicTensor<T>& restored, const BasicTensor<T>& target,
                         const LossWeights& weights, const FeatureExtractor* fx = nullptr);

/// loss_total plus its gradient w.r.t. `restored`, written to *grad.
/// `scale` multiplies the gradient only (batch-mean bookkeeping).
template <class T>
LossBreakdown loss_total_grad(const BasicTensor<T>& restored, const BasicTensor<T>& target,
                              const LossWeights& weights, const FeatureExtractor* fx,
                              BasicTensor<T>* grad, double scale = 1.0);

}  // namespace convbeers
