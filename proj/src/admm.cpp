#include "nullpapr/admm.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nullpapr/csv.hpp"
#include "nullpapr/proximal.hpp"

namespace nullpapr {
namespace {

void check_shapes(const SignalGrid& a, const SignalGrid& b, const char* what) {
  if (a.n_tones() != b.n_tones() || a.n_antennas() != b.n_antennas())
    throw ShapeError(std::string(what) + ": grid shapes differ");
}

double weight(const AdmmParams& p, Index m) {
  return p.antenna_weights.empty() ? 1.0 : p.antenna_weights[m];
}

double weighted_peak_sum(const TimeGrid& y, const AdmmParams& p) {
  double sum = 0.0;
  for (Index m = 0; m < y.n_antennas(); ++m)
    sum += weight(p, m) * y.data().col(m).cwiseAbs().maxCoeff();
  return p.effective_lambda() * sum;
}

TraceRow trace_row(int t, const TimeGrid& transmit, double objective,
                   double perturbation_power, std::vector<double>* papr_out) {
  auto papr = papr_db_per_antenna(transmit);
  TraceRow row;
  row.outer_iter = t;
  row.max_papr_db = *std::max_element(papr.begin(), papr.end());
  row.mean_papr_db =
      std::accumulate(papr.begin(), papr.end(), 0.0) / static_cast<double>(papr.size());
  row.objective = objective;
  row.perturbation_power = perturbation_power;
  if (papr_out) *papr_out = std::move(papr);
  return row;
}

}  // namespace

void AdmmParams::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("admm: lambda must be positive");
  if (!(rho > 0.0)) throw ConfigError("admm: rho must be positive");
  if (!(amplitude_unit > 0.0)) throw ConfigError("admm: amplitude unit must be positive");
  if (outer < 1) throw ConfigError("admm: outer iterations must be >= 1");
  if (inner < 1) throw ConfigError("admm: inner iterations must be >= 1");
  if (oversample < 1) throw ConfigError("admm: oversample must be >= 1");
  for (double w : antenna_weights)
    if (!(w >= 0.0)) throw ConfigError("admm: antenna weights must be >= 0");
}

TimeGrid outer_clip(const SignalGrid& x, const SignalGrid& dx,
                    const AdmmParams& params) {
  check_shapes(x, dx, "outer_clip");
  if (!params.antenna_weights.empty() &&
      static_cast<Index>(params.antenna_weights.size()) != x.n_antennas())
    throw ShapeError("outer_clip: one weight per antenna required");
  const SignalGrid sum(x.data() + dx.data());
  return proxinf_grid(synthesize(sum, params.oversample), params.effective_lambda(),
                      params.antenna_weights);
}

InnerState inner_admm_analyzed(const SignalGrid& a, const ProjectorSet& projectors,
                               const ToneMap& tones, InnerState warm,
                               const AdmmParams& params) {
  check_shapes(a, warm.d, "inner_admm");
  check_shapes(a, warm.u, "inner_admm");
  if (a.n_tones() != tones.n_tones())
    throw ShapeError("inner_admm: grid does not match tone map");
  for (int tone : tones.data_tones())
    if (!projectors.has(tone))
      throw ConfigError("inner_admm: missing projector for data tone " +
                        std::to_string(tone));

  const double l = params.oversample;
  const double rho = params.rho;
  CMatrix& d = warm.d.data();
  CMatrix& u = warm.u.data();
  const CMatrix la = l * a.data();
  CMatrix z(a.n_tones(), a.n_antennas());
  CVector target(a.n_antennas()), projected(a.n_antennas());

  for (int i = 0; i < params.inner; ++i) {
    z = (la + rho * d + u) / (l + rho);
    for (int tone : tones.data_tones()) {
      target = (z.row(tone) - u.row(tone) / rho).transpose();
      projectors.apply(tone, target, projected);
      d.row(tone) = projected.transpose();
    }
    for (int tone : tones.guard_tones()) d.row(tone).setZero();
    u += rho * (d - z);
  }
  return warm;
}

InnerState inner_admm(const TimeGrid& v, const ProjectorSet& projectors,
                      const ToneMap& tones, InnerState warm,
                      const AdmmParams& params) {
  if (v.oversample() != params.oversample)
    throw ShapeError("inner_admm: target oversampling differs from params");
  return inner_admm_analyzed(analyze(v), projectors, tones, std::move(warm), params);
}

double relaxed_objective(const SignalGrid& x, const SignalGrid& dx,
                         const TimeGrid& y, const AdmmParams& params) {
  check_shapes(x, dx, "relaxed_objective");
  const TimeGrid q = synthesize(SignalGrid(x.data() + dx.data()), y.oversample());
  if (q.n_samples() != y.n_samples() || q.n_antennas() != y.n_antennas())
    throw ShapeError("relaxed_objective: time grid shape differs");
  return weighted_peak_sum(y, params) + (y.data() - q.data()).squaredNorm();
}

AdmmResult run_admm(const SignalGrid& x, const ProjectorSet& projectors,
                    const ToneMap& tones, const AdmmParams& params,
                    const IterateObserver& observer) {
  params.validate();
  if (!params.antenna_weights.empty() &&
      static_cast<Index>(params.antenna_weights.size()) != x.n_antennas())
    throw ShapeError("run_admm: one weight per antenna required");
  if (x.n_tones() != tones.n_tones())
    throw ShapeError("run_admm: grid does not match tone map");

  AdmmResult result;
  SignalGrid dx(x.n_tones(), x.n_antennas());
  TimeGrid transmit = synthesize(x, params.oversample);
  auto wants_snapshot = [&](int t) {
    return std::find(params.snapshots.begin(), params.snapshots.end(), t) !=
           params.snapshots.end();
  };
  auto record = [&](int t, double objective) {
    std::vector<double> papr;
    result.trace.push_back(trace_row(t, transmit, objective, dx.power(), &papr));
    if (wants_snapshot(t))
      result.snapshots[t] = {std::move(papr), (x.data() + dx.data()).squaredNorm()};
  };
  record(0, weighted_peak_sum(transmit, params));

  for (int t = 0; t < params.outer; ++t) {
    if (params.papr_target_db && result.trace.back().max_papr_db <= *params.papr_target_db)
      break;
    TimeGrid y = transmit;
    for (Index m = 0; m < y.n_antennas(); ++m)
      proxinf_inplace(y.column(m), params.effective_lambda() * weight(params, m));

    SignalGrid a = analyze(y);
    a.data() -= x.data();
    InnerState state{dx, SignalGrid(x.n_tones(), x.n_antennas())};
    state = inner_admm_analyzed(a, projectors, tones, std::move(state), params);
    dx = std::move(state.d);
    result.iterations = t + 1;
    if (observer) observer(t + 1, dx);

    transmit = synthesize(SignalGrid(x.data() + dx.data()), params.oversample);
    record(t + 1, weighted_peak_sum(y, params) + (y.data() - transmit.data()).squaredNorm());
  }
  result.perturbation = std::move(dx);
  result.transmit = std::move(transmit);
  return result;
}

AdmmResult run_admm(const SignalGrid& x, const ChannelSet& channels,
                    const ToneMap& tones, const AdmmParams& params,
                    const IterateObserver& observer) {
  params.validate();
  const ProjectorSet projectors(channels, tones, params.storage);
  return run_admm(x, projectors, tones, params, observer);
}

void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::filesystem::path& path) {
  CsvWriter csv(path, {"outer_iter", "max_papr_db", "objective", "perturbation_power"});
  for (const auto& row : trace) {
    csv.cell(row.outer_iter).cell(row.max_papr_db).cell(row.objective)
        .cell(row.perturbation_power);
    csv.end_row();
  }
}

}  // namespace nullpapr
