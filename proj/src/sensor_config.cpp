#include <algorithm>
#include <sstream>

#include "convbeers/error.hpp"
#include "convbeers/rng.hpp"
#include "convbeers/sensor_sim.hpp"

namespace convbeers {
namespace {

constexpr double kMinSnr = 5.0;

void check_range(const Range& r, const char* name, double lo_bound, double hi_bound,
                 std::vector<std::string>& out) {
  std::ostringstream msg;
  if (!(r.first <= r.second)) {
    msg << name << ": lower bound " << r.first << " exceeds upper bound " << r.second;
    out.push_back(msg.str());
  } else if (!(r.first > lo_bound && r.second < hi_bound)) {
    msg << name << ": [" << r.first << ", " << r.second << "] outside (" << lo_bound << ", "
        << hi_bound << ")";
    out.push_back(msg.str());
  }
}

double draw(Rng& rng, const Range& r) {
  if (r.first == r.second) return r.first;
  return rng.uniform(r.first, r.second);
}

}  // namespace

std::vector<std::string> DegradationConfig::violations() const {
  std::vector<std::string> out;
  if (oversampling < 1) out.push_back("oversampling must be >= 1");
  const double mtf_ceiling =
      kDetectorNyquistMtf * (oversampling > 1 ? kAntiAliasNyquistGain : 1.0) * (1 + 1e-12);
  check_range(mtf_range, "mtf_range", 0.0, mtf_ceiling + 1e-15, out);
  check_range(snr0_range, "snr0_range", 0.0, 1e9, out);
  check_range(snr1_range, "snr1_range", 0.0, 1e9, out);
  if (!(l0 > 0) || !(l1 > 0)) out.push_back("l0 and l1 must be positive");
  if (l0 == l1) out.push_back("l0 and l1 must differ");
  return out;
}

void DegradationConfig::validate() const {
  const auto v = violations();
  if (!v.empty()) {
    std::string all;
    for (const auto& s : v) all += (all.empty() ? "" : "; ") + s;
    throw Error(ErrorCode::config, all);
  }
}

bool DegradationConfig::contains(double mtf_nyq, double snr0, double snr1) const noexcept {
  auto in = [](const Range& r, double v) { return v >= r.first && v <= r.second; };
  return in(mtf_range, mtf_nyq) &&
         in({std::max(snr0_range.first, kMinSnr), snr0_range.second}, snr0) &&
         in({std::max(snr1_range.first, kMinSnr), snr1_range.second}, snr1);
}

DegradationConfig sim_degraded_variable() {
  DegradationConfig c;
  c.mtf_range = {0.03, 0.07};
  c.snr0_range = {10, 90};
  c.snr1_range = {70, 150};
  return c;
}

DegradationConfig sim_degraded_fixed() {
  DegradationConfig c;
  c.mtf_range = {0.07, 0.07};
  c.snr0_range = {50, 50};
  c.snr1_range = {110, 110};
  return c;
}

DegradationConfig sim_reference_fixed() {
  DegradationConfig c;
  c.mtf_range = {0.25, 0.25};
  c.snr0_range = {80, 80};
  c.snr1_range = {170, 170};
  return c;
}

constexpr int kMaxSnrDraws = 10000;

SampledDegradation sample_config(const DegradationConfig& cfg, std::uint64_t seed,
                                 double operating_max) {
  cfg.validate();
  const Range snr0{std::max(cfg.snr0_range.first, kMinSnr), cfg.snr0_range.second};
  const Range snr1{std::max(cfg.snr1_range.first, kMinSnr), cfg.snr1_range.second};
  require(snr0.first <= snr0.second && snr1.first <= snr1.second, ErrorCode::config,
          "SNR range empty after clamping lower bounds to >= 5");
  Rng rng(seed);
  SampledDegradation s;
  s.mtf.mtf_nyq = draw(rng, cfg.mtf_range);
  s.noise.l0 = cfg.l0;
  s.noise.l1 = cfg.l1;
  // SNR pairs whose noise law goes negative on the operating range are redrawn.
  for (int attempt = 0; attempt < kMaxSnrDraws; ++attempt) {
    s.noise.snr0 = draw(rng, snr0);
    s.noise.snr1 = draw(rng, snr1);
    const double s0 = s.noise.l0 / s.noise.snr0, s1 = s.noise.l1 / s.noise.snr1;
    const double alpha = (s1 * s1 - s0 * s0) / (s.noise.l1 - s.noise.l0);
    const double beta = s0 * s0 - alpha * s.noise.l0;
    if (beta > 0 && alpha * operating_max + beta > 0) return s;
  }
  throw Error(ErrorCode::calibration,
              "no SNR pair inside the configured ranges gives a positive noise variance on [0, " +
                  std::to_string(operating_max) + "]");
}

}  // namespace convbeers
