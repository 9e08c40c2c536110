#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nullpapr/channel.hpp"
#include "nullpapr/transforms.hpp"

namespace nullpapr {

struct CcdfCurve {
  std::vector<double> thresholds_db;
  std::vector<double> probabilities;  // Pr(PAPR > threshold)
  std::size_t sample_count = 0;
};

/// 0 to 14 dB in 0.05 dB steps.
std::vector<double> default_thresholds();

/// Empirical exceedance probability at each threshold. Throws ConfigError on
/// an empty sample set.
CcdfCurve ccdf(std::span<const double> samples_db, std::span<const double> thresholds_db);

/// Smallest sample value v with Pr(PAPR > v) <= prob.
double papr_at_ccdf(std::span<const double> samples_db, double prob);

/// 10 log10(||xhat||_F^2 / ||x_zf||_F^2).
double power_increase_db(const SignalGrid& xhat, const SignalGrid& x_zf);

/// Fraction of ||xhat||_F^2 carried by guard tones.
double guard_band_power(const SignalGrid& xhat, const ToneMap& tones);

struct TrialRecord {
  std::string scheme;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> papr_db;  // per antenna
  double pi_db = 0.0;
  double mui = 0.0;
  double guard_fraction = 0.0;
  int iterations = 0;
};

/// Columns threshold_db,scheme,ccdf.
void write_ccdf_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, CcdfCurve>>& curves);

/// One row per (trial, scheme):
/// trial,seed,scheme,max_papr_db,mean_papr_db,pi_db,mui_residual,guard_power_fraction,iterations
void write_trials_csv(const std::filesystem::path& path,
                      const std::vector<TrialRecord>& records);

}  // namespace nullpapr
