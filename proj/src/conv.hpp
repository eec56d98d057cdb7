#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace convbeers::detail {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using StridedMap = Eigen::Map<Mat<T>, 0, Eigen::OuterStride<>>;
template <class T>
using ConstStridedMap = Eigen::Map<const Mat<T>, 0, Eigen::OuterStride<>>;

// Pixels per im2col chunk; fixed so that reduction order never varies.
inline constexpr int kChunkPixels = 2048;

inline int chunk_rows(int w) { return std::max(1, kChunkPixels / w); }

// Column j = ci*9 + ky*3 + kx holds the input shifted by (ky-1, kx-1), zero padded.
template <class T>
void im2col(const T* in, int cin, int h, int w, int y0, int y1, T* col) {
  const std::size_t p = static_cast<std::size_t>(y1 - y0) * w;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int ci = 0; ci < cin; ++ci)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = col + static_cast<std::size_t>(ci * 9 + ky * 3 + kx) * p;
        const int x_lo = std::max(0, 1 - kx), x_hi = std::min(w, w + 1 - kx);
        for (int y = y0; y < y1; ++y) {
          T* row = dst + static_cast<std::size_t>(y - y0) * w;
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) {
            std::fill(row, row + w, T(0));
            continue;
          }
          const T* src = in + ci * plane + static_cast<std::size_t>(sy) * w + (kx - 1);
          std::fill(row, row + x_lo, T(0));
          std::copy(src + x_lo, src + x_hi, row + x_lo);
          std::fill(row + x_hi, row + w, T(0));
        }
      }
}

template <class T>
std::vector<T>& scratch() {
  thread_local std::vector<T> buf;
  return buf;
}

// out[cout][h][w] = conv3x3(in[cin][h][w]) + bias.
template <class T>
void conv_forward(const T* in, int cin, int h, int w, const T* weight, const T* bias, int cout,
                  T* out) {
  const int rows = chunk_rows(w);
  const Eigen::Index plane = static_cast<Eigen::Index>(h) * w;
  Eigen::Map<const Mat<T>> wt(weight, 9 * cin, cout);
  auto& col = scratch<T>();
  for (int y0 = 0; y0 < h; y0 += rows) {
    const int y1 = std::min(h, y0 + rows);
    const Eigen::Index p = static_cast<Eigen::Index>(y1 - y0) * w;
    col.resize(static_cast<std::size_t>(p) * 9 * cin);
    im2col(in, cin, h, w, y0, y1, col.data());
    Eigen::Map<const Mat<T>> c(col.data(), p, 9 * cin);
    StridedMap<T> o(out + static_cast<std::size_t>(y0) * w, p, cout, Eigen::OuterStride<>(plane));
    if (cout > 1) {
      o.noalias() = c * wt;
      for (int co = 0; co < cout; ++co) o.col(co).array() += bias[co];
    } else {
      T* dst = out + static_cast<std::size_t>(y0) * w;
      std::fill(dst, dst + p, bias[0]);
      for (Eigen::Index k = 0; k < 9 * cin; ++k) {
        const T* ck = c.data() + k * p;
        const T wk = weight[k];
        for (Eigen::Index i = 0; i < p; ++i) dst[i] += ck[i] * wk;
      }
    }
  }
}

// [cin][cout][ky][kx] from [cout][cin][2-ky][2-kx]: the input gradient of a
// zero-padded 3x3 conv is a conv of the output gradient with these weights.
template <class T>
std::vector<T> flipped_transpose(const T* weight, int cin, int cout) {
  std::vector<T> out(static_cast<std::size_t>(cin) * cout * 9);
  for (int co = 0; co < cout; ++co)
    for (int ci = 0; ci < cin; ++ci)
      for (int k = 0; k < 9; ++k)
        out[(static_cast<std::size_t>(ci) * cout + co) * 9 + k] =
            weight[(static_cast<std::size_t>(co) * cin + ci) * 9 + (8 - k)];
  return out;
}

// Accumulates dweight/dbias; writes the input gradient to din when non-null.
template <class T>
void conv_backward(const T* in, int cin, int h, int w, const T* weight, int cout, const T* dout,
                   T* dweight, T* dbias, T* din) {
  const int rows = chunk_rows(w);
  const Eigen::Index plane = static_cast<Eigen::Index>(h) * w;
  Eigen::Map<Mat<T>> dw(dweight, 9 * cin, cout);
  auto& col = scratch<T>();
  for (int y0 = 0; y0 < h; y0 += rows) {
    const int y1 = std::min(h, y0 + rows);
    const Eigen::Index p = static_cast<Eigen::Index>(y1 - y0) * w;
    col.resize(static_cast<std::size_t>(p) * 9 * cin);
    im2col(in, cin, h, w, y0, y1, col.data());
    Eigen::Map<const Mat<T>> c(col.data(), p, 9 * cin);
    ConstStridedMap<T> d(dout + static_cast<std::size_t>(y0) * w, p, cout,
                         Eigen::OuterStride<>(plane));
    // Vectorized reductions peel to the buffer's alignment, so their rounding
    // would follow heap addresses; single-column cases stay scalar.
    if (cout > 1) {
      dw.noalias() += c.transpose() * d;
    } else {
      for (Eigen::Index k = 0; k < 9 * cin; ++k) {
        const T* ck = c.data() + k * p;
        T s = 0;
        for (Eigen::Index i = 0; i < p; ++i) s += ck[i] * d.data()[i];
        dw(k, 0) += s;
      }
    }
    for (int co = 0; co < cout; ++co) {
      const T* dc = dout + static_cast<std::size_t>(co) * plane + static_cast<std::size_t>(y0) * w;
      T s = 0;
      for (Eigen::Index i = 0; i < p; ++i) s += dc[i];
      dbias[co] += s;
    }
  }
  if (din) {
    const std::vector<T> wt = flipped_transpose(weight, cin, cout);
    const std::vector<T> zero(static_cast<std::size_t>(cin), T(0));
    conv_forward(dout, cout, h, w, wt.data(), zero.data(), cin, din);
  }
}

}  // namespace convbeers::detail
