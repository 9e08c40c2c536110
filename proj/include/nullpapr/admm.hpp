#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "nullpapr/channel.hpp"
#include "nullpapr/precoding.hpp"
#include "nullpapr/transforms.hpp"

namespace nullpapr {

struct AdmmParams {
  double lambda = 1.0;
  double rho = 0.5;
  // Amplitude scale lambda is quoted against; the applied l-infinity weight
  // is lambda * amplitude_unit. For unit-energy 64-QAM symbols, 1/sqrt(42)
  // quotes lambda on the unnormalized {+-1, +-3, +-5, +-7} lattice.
  double amplitude_unit = 1.0;
  int outer = 200;
  int inner = 2;
  int oversample = 4;
  std::vector<double> antenna_weights;  // empty: all antennas weighted 1
  // Stop once the largest per-antenna PAPR of the transmit signal is at or
  // below this level (dB).
  std::optional<double> papr_target_db;
  ProjectorStorage storage = ProjectorStorage::factored;
  // Outer iterations at which per-antenna PAPRs are kept in the result.
  std::vector<int> snapshots;

  /// Throws ConfigError when any field is out of range.
  void validate() const;

  double effective_lambda() const { return lambda * amplitude_unit; }
};

/// One outer-iteration record. Iteration 0 describes the unperturbed signal.
struct TraceRow {
  int outer_iter = 0;
  double max_papr_db = 0.0;
  double mean_papr_db = 0.0;
  double objective = 0.0;
  double perturbation_power = 0.0;
};

struct InnerState {
  SignalGrid d;
  SignalGrid u;
};

/// State of the transmit signal at a requested outer iteration.
struct Snapshot {
  std::vector<double> papr_db;  // per antenna
  double grid_power = 0.0;      // ||X + Delta X||_F^2
};

struct AdmmResult {
  SignalGrid perturbation;  // Delta X
  TimeGrid transmit;        // synthesize(X + Delta X)
  std::vector<TraceRow> trace;
  std::map<int, Snapshot> snapshots;
  int iterations = 0;
};

/// Y = column-wise proxinf(synthesize(X + dX), effective_lambda * w_m).
TimeGrid outer_clip(const SignalGrid& x, const SignalGrid& dx,
                    const AdmmParams& params);

/// Runs params.inner ADMM iterations on
///   min ||V - F^H D||_F^2  s.t. guard rows of D zero, H_n d_n = 0,
/// starting from `warm`. `a` is analyze(V). The Z step uses the exact
/// minimizer (L A + rho D + U) / (L + rho).
InnerState inner_admm_analyzed(const SignalGrid& a, const ProjectorSet& projectors,
                               const ToneMap& tones, InnerState warm,
                               const AdmmParams& params);

/// Same, taking the time-domain target V.
InnerState inner_admm(const TimeGrid& v, const ProjectorSet& projectors,
                      const ToneMap& tones, InnerState warm,
                      const AdmmParams& params);

/// effective_lambda * sum_m w_m ||y_m||_inf + ||Y - synthesize(X + dX)||_F^2.
double relaxed_objective(const SignalGrid& x, const SignalGrid& dx,
                         const TimeGrid& y, const AdmmParams& params);

/// Called with (t, Delta X^(t)) after every outer iteration t >= 1.
using IterateObserver = std::function<void(int, const SignalGrid&)>;

/// Full double loop. Every intermediate perturbation is feasible.
AdmmResult run_admm(const SignalGrid& x, const ProjectorSet& projectors,
                    const ToneMap& tones, const AdmmParams& params,
                    const IterateObserver& observer = {});

AdmmResult run_admm(const SignalGrid& x, const ChannelSet& channels,
                    const ToneMap& tones, const AdmmParams& params,
                    const IterateObserver& observer = {});

/// CSV with header outer_iter,max_papr_db,objective,perturbation_power.
void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::filesystem::path& path);

}  // namespace nullpapr
