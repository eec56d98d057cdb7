#pragma once

#include <cstdint>

#include "convbeers/loss.hpp"
#include "convbeers/network.hpp"

namespace convbeers {

template <class T>
struct BackwardResult {
  BasicParams<T> grads;
  LossBreakdown loss;  ///< batch-mean loss parts
};

/// Exact gradients of the batch-mean loss_total w.r.t. every parameter.
/// Items are processed on up to `workers` threads; per-item gradients are
/// reduced in item order, so the result does not depend on `workers`.
template <class T>
BackwardResult<T> backward(const BasicParams<T>& params, const BasicTensor<T>& x,
                           const BasicTensor<T>& target, const LossWeights& weights,
                           const FeatureExtractor* fx = nullptr, int workers = 1);

struct AdamState {
  std::uint64_t step = 0;
  NetworkParams m;
  NetworkParams v;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

/// One bias-corrected Adam update in place.
void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state, double lr);

}  // namespace convbeers
