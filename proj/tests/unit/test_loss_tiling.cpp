#include <cmath>

#include "convbeers/loss.hpp"
#include "convbeers/network.hpp"
#include "convbeers/patterns.hpp"
#include "convbeers/tiling.hpp"
#include "helpers.hpp"

using namespace convbeers;

namespace {

BasicTensor<double> random_tensor(Rng& rng, int h, int w) {
  BasicTensor<double> t(1, 1, h, w);
  for (auto& v : t.values()) v = rng.uniform();
  return t;
}

}  // namespace

TEST_CASE("L1 and FFT losses vanish on identical inputs") {
  Rng rng(1);
  const auto a = random_tensor(rng, 9, 7);
  CHECK(loss_l1(a, a) == 0.0);
  CHECK(loss_fft(a, a) == 0.0);
}

TEST_CASE("FFT loss of a DC offset") {
  // Only the DC bin is non-zero: |N d| / N.
  BasicTensor<double> a(1, 1, 4, 4), b(1, 1, 4, 4);
  for (auto& v : b.values()) v = 0.25;
  CHECK(loss_fft(a, b) == doctest::Approx(0.25));
  CHECK(loss_l1(a, b) == doctest::Approx(0.25));
}

TEST_CASE("total loss weights its terms") {
  Rng rng(2);
  const auto a = random_tensor(rng, 8, 8), b = random_tensor(rng, 8, 8);
  const LossBreakdown l = loss_total(a, b, LossWeights{2.0, 0.5, 0.3});
  CHECK(l.perceptual == 0.0);
  CHECK(l.total == doctest::Approx(2.0 * l.l1 + 0.3 * l.fft));
}

TEST_CASE("loss gradient matches finite differences away from kinks") {
  Rng rng(3);
  const auto a = random_tensor(rng, 6, 5);
  auto b = a;
  for (auto& v : b.values()) v += (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.5, 1.0);
  const LossWeights w{1.0, 0.0, 0.1};
  BasicTensor<double> g(1, 1, 6, 5);
  loss_total_grad(a, b, w, nullptr, &g, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto p = a, m = a;
    p.values()[i] += 1e-6;
    m.values()[i] -= 1e-6;
    const double fd = (loss_total(p, b, w).total - loss_total(m, b, w).total) / 2e-6;
    CHECK(g.data()[i] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("tile origins cover the frame with the last tile flush") {
  const auto o = tile_origins(1000, 256, 32);
  CHECK(o.front() == 0);
  CHECK(o.back() == 1000 - 256);
  for (std::size_t i = 1; i < o.size(); ++i) CHECK(o[i] - o[i - 1] <= 256 - 32);
  CHECK(tile_origins(200, 256, 32) == std::vector<int>{0});
}

TEST_CASE("invalid tiling options are rejected") {
  const Tensor x(1, 1, 300, 300);
  const NetworkParams p(NetworkShape{4, 1});
  CHECK_THROWS_AS(infer_tiled(p, x, TileOptions{32, 16, 1}), Error);
  CHECK_THROWS_AS(infer_tiled(p, x, TileOptions{128, 8, 1}), Error);
  CHECK_THROWS_AS(infer_tiled(p, x, TileOptions{64, 32, 1}), Error);
}

TEST_CASE("tiling matches full-frame inference when the receptive field fits the halo") {
  // 2 blocks: 7 convs, receptive radius 7 < the 16 px ownership margin.
  const NetworkParams p = init_params(5, NetworkShape{8, 2});
  const PanImage img = render_scene(300, 230, 8);
  const Tensor x = image_to_tensor(img, 163.84);
  const Tensor full = forward(p, x);
  for (int workers : {1, 2}) {
    const Tensor tiled = infer_tiled(p, x, TileOptions{96, 32, workers});
    double worst = 0;
    for (std::size_t i = 0; i < full.size(); ++i)
      worst = std::max(worst, double(std::abs(full.data()[i] - tiled.data()[i])));
    // GEMM blocking follows the chunk size, so only rounding differs.
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("restore_image keeps geometry and non-negativity") {
  const NetworkParams p = init_params(5, NetworkShape{4, 1});
  const PanImage img = render_scene(80, 70, 2).with_gsd(2.0);
  const PanImage r = restore_image(p, img, 163.84);
  CHECK(r.same_shape(img));
  CHECK(r.gsd() == 2.0);
  for (float v : r.pixels()) CHECK(v >= 0.f);
}
