#include <cmath>
#include <numbers>

#include "convbeers/patterns.hpp"
#include "convbeers/sensor_sim.hpp"
#include "helpers.hpp"

using namespace convbeers;

TEST_CASE("MTF grid hits the configured Nyquist value") {
  for (double m : {0.03, 0.07, 0.25}) {
    const MtfGrid g = build_mtf_grid(MtfConfig{m}, 64, 64, 1);
    CHECK(g.at(0, 0) == doctest::Approx(1.0));
    CHECK(g.at(32, 0) == doctest::Approx(m).epsilon(1e-12));
    CHECK(g.at(0, 32) == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("with oversampling the anti-alias filter supplies half the Nyquist loss") {
  // Nyquist of the coarse grid sits at bin w / (2r) of the fine grid.
  const int r = 4, w = 256;
  const double m = 0.05;
  const MtfGrid g = build_mtf_grid(MtfConfig{m}, w, w, r);
  const double sigma = antialias_sigma(r);
  const double f = 0.5 / r;
  const double gauss = std::exp(-2 * std::numbers::pi * std::numbers::pi * sigma * sigma * f * f);
  CHECK(gauss == doctest::Approx(kAntiAliasNyquistGain).epsilon(1e-12));
  CHECK(g.at(w / (2 * r), 0) * gauss == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("Nyquist targets above the detector ceiling are rejected") {
  CHECK_THROWS_AS(gamma_from_nyquist(MtfConfig{0.7}), Error);
  CHECK(gamma_from_nyquist(MtfConfig{kDetectorNyquistMtf}) == 0.0);
}

TEST_CASE("PSF sums to one and is symmetric") {
  const Psf p = make_psf(MtfConfig{0.07}, 2);
  double s = 0;
  for (double v : p.kernel) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  const int h = p.half();
  for (int d = 1; d <= h; ++d) {
    CHECK(p.at(d, 0) == doctest::Approx(p.at(-d, 0)));
    CHECK(p.at(0, d) == doctest::Approx(p.at(d, 0)));
  }
  CHECK(p.retained_energy > 0.99);
}

TEST_CASE("blur preserves flat fields; direct and FFT paths agree") {
  const PanImage flat = PanImage::uniform(64, 64, 42.f);
  const Psf p = make_psf(MtfConfig{0.05}, 1, 15);
  const PanImage b = apply_blur(flat, p);
  for (float v : b.pixels()) CHECK(v == doctest::Approx(42.f).epsilon(1e-5));

  const PanImage edge = render_slanted_edge(96, 5.0, 10, 100);
  const PanImage d = apply_blur(edge, p, BlurMethod::direct);
  const PanImage f = apply_blur(edge, p, BlurMethod::fft);
  double worst = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    worst = std::max(worst, double(std::abs(d.pixels()[i] - f.pixels()[i])));
  CHECK(worst < 1e-3);
}

TEST_CASE("downsampling coarsens the grid and GSD") {
  const PanImage img = PanImage::uniform(64, 48, 7.f, 0.5);
  const PanImage d = downsample_gsd(img, 4);
  CHECK(d.width() == 16);
  CHECK(d.height() == 12);
  CHECK(d.gsd() == doctest::Approx(2.0));
  for (float v : d.pixels()) CHECK(v == doctest::Approx(7.f).epsilon(1e-5));
}

TEST_CASE("noise calibration solves both anchors exactly") {
  const NoiseConfig nc{25, 50, 100, 110};
  const NoiseParams p = calibrate_noise(nc);
  CHECK(p.snr(25) == doctest::Approx(50).epsilon(1e-12));
  CHECK(p.snr(100) == doctest::Approx(110).epsilon(1e-12));
  CHECK(p.beta > 0);
  // beta > 0 needs snr1 > 2 snr0 at these anchors.
  CHECK(testing::error_code_of([] { calibrate_noise(NoiseConfig{25, 60, 100, 110}); }) ==
        ErrorCode::calibration);
}

TEST_CASE("applied noise matches the variance law and is seeded") {
  const NoiseParams p = calibrate_noise(NoiseConfig{});
  const PanImage flat = PanImage::uniform(256, 256, 100.f);
  const PanImage a = apply_noise(flat, p, 9), b = apply_noise(flat, p, 9), c = apply_noise(flat, p, 10);
  CHECK(std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin()));
  CHECK_FALSE(std::equal(a.pixels().begin(), a.pixels().end(), c.pixels().begin()));
  double m = a.mean(), v = 0;
  for (float x : a.pixels()) v += (x - m) * (x - m);
  v /= static_cast<double>(a.size() - 1);
  CHECK(m == doctest::Approx(100).epsilon(0.002));
  CHECK(v == doctest::Approx(p.variance(100)).epsilon(0.03));
}

TEST_CASE("sampled configs stay inside their ranges and have a positive noise law") {
  const DegradationConfig cfg = sim_degraded_variable();
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto d = sample_config(cfg, s);
    CHECK(cfg.contains(d.mtf.mtf_nyq, d.noise.snr0, d.noise.snr1));
    const NoiseParams p = calibrate_noise(d.noise);
    CHECK(p.beta > 0);
  }
  const auto a = sample_config(cfg, 5), b = sample_config(cfg, 5);
  CHECK(a.mtf.mtf_nyq == b.mtf.mtf_nyq);
  CHECK(a.noise.snr0 == b.noise.snr0);
}

TEST_CASE("config validation lists every violation") {
  DegradationConfig c;
  c.mtf_range = {0.08, 0.02};
  c.oversampling = 0;
  CHECK(c.violations().size() >= 2);
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("degrade records what it applied") {
  const PanImage src = render_scene(128, 128, 3);
  const auto r = degrade(src, MtfConfig{0.05}, NoiseConfig{}, 2, 77);
  CHECK(r.image.width() == 64);
  CHECK(r.applied.mtf_nyq == 0.05);
  CHECK(r.applied.oversampling == 2);
  CHECK(r.applied.seed == 77);
  const auto again = degrade(src, MtfConfig{0.05}, NoiseConfig{}, 2, 77);
  CHECK(std::equal(r.image.pixels().begin(), r.image.pixels().end(), again.image.pixels().begin()));
}
