#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "conv.hpp"
#include "convbeers/error.hpp"
#include "convbeers/network.hpp"

namespace convbeers::detail {

// Conv inputs kept for the backward pass of one item.
template <class T>
struct ItemCache {
  std::vector<std::vector<T>> trunk;  // input of each block's conv1, then of body_end
  std::vector<std::vector<T>> relu;   // input of each block's conv2
  std::vector<T> body_out;            // input of the tail
  std::vector<T> input;               // network input after the input hook
};

template <class T>
void check_finite(const std::vector<T>& v, int layer, const NetworkShape& shape) {
  for (T x : v)
    if (!std::isfinite(x))
      throw Error(ErrorCode::numerical,
                  "forward: NaN/Inf in activations of " + layer_name(shape, layer));
}

template <class T>
void run_conv(const BasicParams<T>& p, int layer, const std::vector<T>& in, int h, int w,
              std::vector<T>& out, const ActivationHook<T>* hook) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  out.resize(plane * p.out_channels(layer));
  conv_forward(in.data(), p.in_channels(layer), h, w, p.weight(layer).values.data(),
               p.bias(layer).values.data(), p.out_channels(layer), out.data());
  if (hook && *hook) (*hook)(layer, out.data(), out.size());
  check_finite(out, layer, p.shape());
}

// One item, 1 x h x w in, 1 x h x w out. Fills `cache` when non-null.
template <class T>
void forward_item(const BasicParams<T>& p, const T* x, int h, int w, T* y,
                  const ActivationHook<T>* hook, ItemCache<T>* cache) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const int blocks = p.shape().blocks;
  std::vector<T> input(x, x + plane);
  if (hook && *hook) (*hook)(-1, input.data(), input.size());

  std::vector<T> head, cur, a, c;
  run_conv(p, 0, input, h, w, head, hook);
  cur = head;
  if (cache) {
    cache->trunk.assign(static_cast<std::size_t>(blocks) + 1, {});
    cache->relu.assign(static_cast<std::size_t>(blocks), {});
  }
  for (int b = 0; b < blocks; ++b) {
    const int l1 = 1 + 2 * b, l2 = 2 + 2 * b;
    run_conv(p, l1, cur, h, w, a, hook);
    for (T& v : a) v = std::max(v, T(0));
    run_conv(p, l2, a, h, w, c, hook);
    if (cache) {
      cache->trunk[static_cast<std::size_t>(b)] = cur;
      cache->relu[static_cast<std::size_t>(b)] = a;
    }
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] += c[i];
  }
  const int body_end = 2 * blocks + 1, tail = 2 * blocks + 2;
  run_conv(p, body_end, cur, h, w, a, hook);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += head[i];
  run_conv(p, tail, a, h, w, c, hook);
  for (std::size_t i = 0; i < plane; ++i) y[i] = c[i] + input[i];
  if (cache) {
    cache->trunk[static_cast<std::size_t>(blocks)] = std::move(cur);
    cache->body_out = std::move(a);
    cache->input = std::move(input);
  }
}

// Accumulates parameter gradients of one item given dL/dy.
template <class T>
void backward_item(const BasicParams<T>& p, const ItemCache<T>& cache, int h, int w,
                   const T* dy, BasicParams<T>& g) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const int blocks = p.shape().blocks;
  const int ch = p.shape().channels;
  const int body_end = 2 * blocks + 1, tail = 2 * blocks + 2;
  auto back = [&](int layer, const std::vector<T>& in, const T* dout, T* din) {
    conv_backward(in.data(), p.in_channels(layer), h, w, p.weight(layer).values.data(),
                  p.out_channels(layer), dout, g.weight(layer).values.data(),
                  g.bias(layer).values.data(), din);
  };
  std::vector<T> de(plane * ch), dcur(plane * ch), dr(plane * ch), dtmp(plane * ch);
  back(tail, cache.body_out, dy, de.data());
  back(body_end, cache.trunk[static_cast<std::size_t>(blocks)], de.data(), dcur.data());
  for (int b = blocks - 1; b >= 0; --b) {
    const auto& r = cache.relu[static_cast<std::size_t>(b)];
    back(2 + 2 * b, r, dcur.data(), dr.data());
    for (std::size_t i = 0; i < dr.size(); ++i)
      if (!(r[i] > T(0))) dr[i] = T(0);
    back(1 + 2 * b, cache.trunk[static_cast<std::size_t>(b)], dr.data(), dtmp.data());
    for (std::size_t i = 0; i < dcur.size(); ++i) dcur[i] += dtmp[i];
  }
  for (std::size_t i = 0; i < dcur.size(); ++i) dcur[i] += de[i];
  back(0, cache.input, dcur.data(), nullptr);
}

}  // namespace convbeers::detail
