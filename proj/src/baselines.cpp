#include "nullpapr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nullpapr {
namespace {

void clip_columns(TimeGrid& y, double ratio) {
  const double len = static_cast<double>(y.n_samples());
  for (Index m = 0; m < y.n_antennas(); ++m) {
    auto col = y.data().col(m);
    const double level = ratio * std::sqrt(col.squaredNorm() / len);
    for (Index k = 0; k < col.size(); ++k) {
      const double mod = std::abs(col(k));
      if (mod > level) col(k) *= level / mod;
    }
  }
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

ClipResult clip_transmit(const SignalGrid& x, int oversample, const ClipConfig& cfg) {
  if (!(cfg.clip_ratio > 0.0)) throw ConfigError("clipping: clip ratio must be positive");
  TimeGrid y = synthesize(x, oversample);
  clip_columns(y, cfg.clip_ratio);
  SignalGrid freq = analyze(y);
  return {std::move(y), std::move(freq)};
}

TimeGrid zf_transmit(const SignalGrid& x, int oversample) {
  return synthesize(x, oversample);
}

double calibrate_clip_ratio(std::span<const SignalGrid> grids, int oversample,
                            double target_db) {
  if (grids.empty()) throw ConfigError("clip calibration: no grids given");
  std::vector<TimeGrid> signals;
  for (const auto& g : grids) signals.push_back(synthesize(g, oversample));

  auto median_papr = [&](double ratio) {
    std::vector<double> samples;
    for (const auto& s : signals) {
      TimeGrid y = s;
      clip_columns(y, ratio);
      for (double p : papr_db_per_antenna(y)) samples.push_back(p);
    }
    return median(std::move(samples));
  };

  // Clipping at ratio r bounds the PAPR by roughly r^2, so [1, 100] brackets
  // any reachable target.
  double lo = 1.0, hi = 100.0;
  if (median_papr(hi) <= target_db) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (median_papr(mid) < target_db ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nullpapr
