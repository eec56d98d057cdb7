#include "convbeers/loss.hpp"

#include <cmath>
#include <string>

#include "convbeers/error.hpp"
#include "convbeers/fft.hpp"

namespace convbeers {
namespace {

template <class T>
void require_same(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* what) {
  require(a.same_shape(b), ErrorCode::dimension_mismatch,
          std::string(what) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
}

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// DFT of (restored - target) for one plane.
template <class T>
ComplexGrid diff_spectrum(const T* a, const T* b, int w, int h) {
  ComplexGrid d(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = std::complex<double>(static_cast<double>(a[i]) - static_cast<double>(b[i]), 0.0);
  return fft2(d, w, h, FftDirection::forward);
}

template <class T>
double fft_term(const BasicTensor<T>& restored, const BasicTensor<T>& target, BasicTensor<T>* grad,
                double grad_scale) {
  const int w = restored.width(), h = restored.height();
  const std::size_t plane = restored.plane();
  const double n = static_cast<double>(restored.size());
  double acc = 0;
  const int planes = restored.batch() * restored.channels();
  for (int k = 0; k < planes; ++k) {
    const T* a = restored.data() + plane * k;
    const T* b = target.data() + plane * k;
    const ComplexGrid d = diff_spectrum(a, b, w, h);
    for (const auto& z : d) acc += std::abs(z.real()) + std::abs(z.imag());
    if (grad) {
      // d/dx of sum |Re| + |Im| is Re(IDFT_unnormalised(sign Re + i sign Im)).
      ComplexGrid s(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) s[i] = {sign(d[i].real()), sign(d[i].imag())};
      const ComplexGrid back = fft2(s, w, h, FftDirection::inverse);
      T* g = grad->data() + plane * k;
      for (std::size_t i = 0; i < plane; ++i)
        g[i] += static_cast<T>(grad_scale * back[i].real() / n);
    }
  }
  return acc / n;
}

template <class T>
double l1_term(const BasicTensor<T>& restored, const BasicTensor<T>& target, BasicTensor<T>* grad,
               double grad_scale) {
  const double n = static_cast<double>(restored.size());
  double acc = 0;
  for (std::size_t i = 0; i < restored.size(); ++i) {
    const double d = static_cast<double>(restored.data()[i]) - static_cast<double>(target.data()[i]);
    acc += std::abs(d);
    if (grad) grad->data()[i] += static_cast<T>(grad_scale * sign(d) / n);
  }
  return acc / n;
}

double perceptual_term(const Tensor& restored, const Tensor& target, const FeatureExtractor& fx,
                       Tensor* grad, double grad_scale) {
  const auto fr = fx.features(restored);
  const auto ft = fx.features(target);
  const auto wl = fx.layer_weights();
  require(fr.size() == ft.size() && fr.size() == wl.size(), ErrorCode::dimension_mismatch,
          "perceptual loss: feature extractor returned inconsistent layer counts");
  double total = 0;
  std::vector<Tensor> grads;
  for (std::size_t l = 0; l < fr.size(); ++l) {
    require(fr[l].same_shape(ft[l]), ErrorCode::dimension_mismatch,
            "perceptual loss: feature shape mismatch");
    const double n = static_cast<double>(fr[l].size());
    double acc = 0;
    Tensor g(fr[l].batch(), fr[l].channels(), fr[l].height(), fr[l].width());
    for (std::size_t i = 0; i < fr[l].size(); ++i) {
      const double d = static_cast<double>(fr[l].data()[i]) - ft[l].data()[i];
      acc += d * d;
      g.data()[i] = static_cast<float>(grad_scale * wl[l] * 2.0 * d / n);
    }
    total += wl[l] * acc / n;
    grads.push_back(std::move(g));
  }
  if (grad) {
    const Tensor gi = fx.features_vjp(restored, grads);
    require(gi.same_shape(*grad), ErrorCode::dimension_mismatch,
            "perceptual loss: feature extractor gradient has the wrong shape");
    for (std::size_t i = 0; i < gi.size(); ++i) grad->data()[i] += gi.data()[i];
  }
  return total;
}

template <class T>
LossBreakdown combine(const BasicTensor<T>& restored, const BasicTensor<T>& target,
                      const LossWeights& wt, const FeatureExtractor* fx, BasicTensor<T>* grad,
                      double scale) {
  require_same(restored, target, "loss_total");
  require(wt.l1 >= 0 && wt.perceptual >= 0 && wt.fft >= 0, ErrorCode::invalid_argument,
          "loss_total: loss weights must be non-negative");
  if (grad) *grad = BasicTensor<T>(restored.batch(), restored.channels(), restored.height(), restored.width());
  LossBreakdown out;
  out.l1 = l1_term(restored, target, grad, scale * wt.l1);
  out.fft = fft_term(restored, target, wt.fft > 0 ? grad : nullptr, scale * wt.fft);
  if (fx) {
    Tensor gp;
    Tensor* gp_ptr = nullptr;
    if (grad && wt.perceptual > 0) {
      gp = Tensor(restored.batch(), restored.channels(), restored.height(), restored.width());
      gp_ptr = &gp;
    }
    out.perceptual = perceptual_term(restored.template cast<float>(), target.template cast<float>(),
                                     *fx, gp_ptr, scale * wt.perceptual);
    if (gp_ptr)
      for (std::size_t i = 0; i < gp.size(); ++i) grad->data()[i] += static_cast<T>(gp.data()[i]);
  }
  out.total = wt.l1 * out.l1 + (fx ? wt.perceptual * out.perceptual : 0.0) + wt.fft * out.fft;
  if (grad) grad->check_finite("loss gradient");
  return out;
}

}  // namespace

template <class T>
double loss_l1(const BasicTensor<T>& restored, const BasicTensor<T>& target) {
  require_same(restored, target, "loss_l1");
  return l1_term<T>(restored, target, nullptr, 0.0);
}

template <class T>
double loss_fft(const BasicTensor<T>& restored, const BasicTensor<T>& target) {
  require_same(restored, target, "loss_fft");
  return fft_term<T>(restored, target, nullptr, 0.0);
}

double loss_perceptual(const Tensor& restored, const Tensor& target, const FeatureExtractor& fx) {
  require_same(restored, target, "loss_perceptual");
  return perceptual_term(restored, target, fx, nullptr, 0.0);
}

template <class T>
LossBreakdown loss_total(const BasicTensor<T>& restored, const BasicTensor<T>& target,
                         const LossWeights& weights, const FeatureExtractor* fx) {
  return combine<T>(restored, target, weights, fx, nullptr, 1.0);
}

template <class T>
LossBreakdown loss_total_grad(const BasicTensor<T>& restored, const BasicTensor<T>& target,
                              const LossWeights& weights, const FeatureExtractor* fx,
                              BasicTensor<T>* grad, double scale) {
  require(grad != nullptr, ErrorCode::invalid_argument, "loss_total_grad: null gradient output");
  return combine<T>(restored, target, weights, fx, grad, scale);
}

#define CONVBEERS_LOSS_INSTANTIATE(T)                                                          \
  template double loss_l1(const BasicTensor<T>&, const BasicTensor<T>&);                       \
  template double loss_fft(const BasicTensor<T>&, const BasicTensor<T>&);                      \
  template LossBreakdown loss_total(const BasicTensor<T>&, const BasicTensor<T>&,              \
                                    const LossWeights&, const FeatureExtractor*);              \
  template LossBreakdown loss_total_grad(const BasicTensor<T>&, const BasicTensor<T>&,         \
                                         const LossWeights&, const FeatureExtractor*,          \
                                         BasicTensor<T>*, double);
CONVBEERS_LOSS_INSTANTIATE(float)
CONVBEERS_LOSS_INSTANTIATE(double)
#undef CONVBEERS_LOSS_INSTANTIATE

}  // namespace convbeers
