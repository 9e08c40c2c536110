#include "nullpapr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nullpapr/csv.hpp"

namespace nullpapr {

std::vector<double> default_thresholds() {
  std::vector<double> t(281);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.05 * static_cast<double>(i);
  return t;
}

CcdfCurve ccdf(std::span<const double> samples_db, std::span<const double> thresholds_db) {
  if (samples_db.empty()) throw ConfigError("ccdf: no samples");
  std::vector<double> sorted(samples_db.begin(), samples_db.end());
  std::sort(sorted.begin(), sorted.end());
  CcdfCurve curve;
  curve.sample_count = sorted.size();
  curve.thresholds_db.assign(thresholds_db.begin(), thresholds_db.end());
  for (double t : thresholds_db) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    curve.probabilities.push_back(static_cast<double>(above) /
                                  static_cast<double>(sorted.size()));
  }
  return curve;
}

double papr_at_ccdf(std::span<const double> samples_db, double prob) {
  if (samples_db.empty()) throw ConfigError("papr_at_ccdf: no samples");
  if (!(prob >= 0.0 && prob < 1.0)) throw DomainError("papr_at_ccdf: prob outside [0, 1)");
  std::vector<double> sorted(samples_db.begin(), samples_db.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const auto allowed = static_cast<std::size_t>(std::floor(prob * static_cast<double>(n)));
  return sorted[n - 1 - allowed];
}

double power_increase_db(const SignalGrid& xhat, const SignalGrid& x_zf) {
  if (xhat.n_tones() != x_zf.n_tones() || xhat.n_antennas() != x_zf.n_antennas())
    throw ShapeError("power_increase: shapes differ");
  const double ref = x_zf.power();
  if (ref <= 0.0) throw DomainError("power_increase: zero reference power");
  return to_db(xhat.power() / ref);
}

double guard_band_power(const SignalGrid& xhat, const ToneMap& tones) {
  if (xhat.n_tones() != tones.n_tones())
    throw ShapeError("guard_band_power: grid does not match tone map");
  const double total = xhat.power();
  if (total <= 0.0) return 0.0;
  double guard = 0.0;
  for (int n : tones.guard_tones()) guard += xhat.data().row(n).squaredNorm();
  return guard / total;
}

void write_ccdf_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, CcdfCurve>>& curves) {
  CsvWriter csv(path, {"threshold_db", "scheme", "ccdf"});
  for (const auto& [scheme, curve] : curves)
    for (std::size_t i = 0; i < curve.thresholds_db.size(); ++i) {
      csv.cell(curve.thresholds_db[i]).cell(scheme).cell(curve.probabilities[i]);
      csv.end_row();
    }
}

void write_trials_csv(const std::filesystem::path& path,
                      const std::vector<TrialRecord>& records) {
  CsvWriter csv(path, {"trial", "seed", "scheme", "max_papr_db", "mean_papr_db", "pi_db",
                       "mui_residual", "guard_power_fraction", "iterations"});
  for (const auto& r : records) {
    const double max_papr = *std::max_element(r.papr_db.begin(), r.papr_db.end());
    const double mean_papr = std::accumulate(r.papr_db.begin(), r.papr_db.end(), 0.0) /
                             static_cast<double>(r.papr_db.size());
    csv.cell(static_cast<long long>(r.trial))
        .cell(std::to_string(r.seed))
        .cell(r.scheme)
        .cell(max_papr)
        .cell(mean_papr)
        .cell(r.pi_db)
        .cell(r.mui)
        .cell(r.guard_fraction)
        .cell(r.iterations);
    csv.end_row();
  }
}

}  // namespace nullpapr
