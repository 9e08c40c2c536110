#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullpapr/ber.hpp"
#include "nullpapr/metrics.hpp"
#include "nullpapr/system.hpp"

namespace nullpapr {

/// Every knob of an experiment run. Defaults reproduce the full-size setup
/// (M=128, K=16, N=128, D=8, L=4, lambda=1, rho=0.5, 200 x 2 iterations,
/// 1000 trials).
struct ExperimentConfig {
  SystemConfig system;
  AdmmParams admm = default_admm();
  std::optional<double> clip_ratio;  // fixed ratio; otherwise calibrated
  double clip_target_db = 3.9;
  int clip_calibration_trials = 20;
  std::vector<std::string> schemes{"zf", "clipping", "proxinf-admm"};
  int trials = 1000;
  std::uint64_t seed = 1;
  // N0 is referenced to the per-tone transmit power, so the array gain
  // (about (M-K)/K) shifts the waterfall well below 0 dB at full size.
  std::vector<double> snr_db{-8, -7, -6, -5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> snapshot_iters{20};
  std::vector<double> lambda_grid{0.5, 1, 2, 5, 10, 100};
  std::vector<int> outer_grid{20, 200};
  bool soft_decoding = false;
  std::filesystem::path out_dir = "out";
  std::string preset = "paper";
  int threads = default_threads();

  static AdmmParams default_admm();

  /// "paper" (defaults) or "quick" (100 trials, N=64, M=32, K=8).
  void apply_preset(const std::string& name);
  /// Overwrites fields present in `doc`; keys mirror the CLI flag names.
  void apply_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  void validate() const;
  std::vector<SchemeKind> scheme_kinds() const;
};

/// Version string recorded in run metadata.
std::string version_string();

struct CcdfSummary {
  // Pooled per-antenna PAPR samples (dB) per curve label, in output order.
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  std::vector<TrialRecord> records;
  std::optional<double> clip_ratio;
  std::vector<TraceRow> mean_trace;  // proxinf-admm trace averaged over trials
};

/// Writes ccdf.csv, trials.csv and ccdf.json to cfg.out_dir.
CcdfSummary cmd_ccdf(const ExperimentConfig& cfg);

/// Writes convergence.csv (outer_iter,max_papr_db,mean_papr_db,objective,
/// perturbation_power; every column averaged over trials) and
/// convergence.json.
std::vector<TraceRow> cmd_convergence(const ExperimentConfig& cfg);

struct SweepRow {
  double lambda = 0.0;
  int outer = 0;
  double papr_ccdf50_db = 0.0;
  double papr_ccdf01_db = 0.0;
  double mean_pi_db = 0.0;
};

/// Writes sweep.csv (lambda,outer,papr_ccdf50_db,papr_ccdf01_db,mean_pi_db)
/// and sweep.json.
std::vector<SweepRow> cmd_lambda_sweep(const ExperimentConfig& cfg);

/// Writes ber.csv and ber.json.
std::vector<BerPoint> cmd_ber(const ExperimentConfig& cfg);

struct DemoSignal {
  std::string scheme;
  std::vector<double> time_magnitude;  // antenna 0, L*N samples
  std::vector<double> freq_magnitude;  // antenna 0, N tones
  double papr_db = 0.0;                // antenna 0
  double guard_fraction = 0.0;         // whole grid
};

/// One realization (trial 0). Writes signal_time.csv (scheme,sample,magnitude),
/// signal_freq.csv (scheme,tone,magnitude), signal_summary.csv and
/// demo-signal.json.
std::vector<DemoSignal> cmd_demo_signal(const ExperimentConfig& cfg);

}  // namespace nullpapr
