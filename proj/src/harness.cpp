#include "nullpapr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "nullpapr/csv.hpp"

#ifndef NULLPAPR_VERSION
#define NULLPAPR_VERSION "0.1.0"
#endif

namespace nullpapr {
namespace {

using nlohmann::json;

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
  const auto probe = dir / ".write-test";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_metadata(const ExperimentConfig& cfg, const std::string& command,
                    const json& derived) {
  json doc;
  doc["command"] = command;
  doc["version"] = version_string();
  doc["config"] = cfg.to_json();
  doc["derived"] = derived;
  std::ofstream out(cfg.out_dir / (command + ".json"), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metadata to " + cfg.out_dir.string());
  out << doc.dump(2) << '\n';
}

bool has_scheme(const ExperimentConfig& cfg, SchemeKind kind) {
  const auto kinds = cfg.scheme_kinds();
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

// Clip ratio to use when clipping is among the schemes.
std::optional<double> resolve_clip_ratio(const ExperimentConfig& cfg, const ToneMap& tones) {
  if (!has_scheme(cfg, SchemeKind::clipping)) return cfg.clip_ratio;
  if (cfg.clip_ratio) return cfg.clip_ratio;
  const int n = std::max(1, std::min(cfg.clip_calibration_trials, cfg.trials));
  return calibrate_clip(cfg.system, tones, cfg.seed, n, cfg.clip_target_db);
}

SchemeSettings settings_for(const ExperimentConfig& cfg, std::optional<double> clip_ratio) {
  SchemeSettings s;
  s.admm = cfg.admm;
  s.admm.oversample = cfg.system.oversample;
  s.admm.snapshots.clear();
  for (int t : cfg.snapshot_iters)
    if (t > 0 && t < cfg.admm.outer) s.admm.snapshots.push_back(t);
  if (clip_ratio) s.clip.clip_ratio = *clip_ratio;
  return s;
}

json clip_json(std::optional<double> ratio) {
  return ratio ? json(*ratio) : json(nullptr);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Averages traces element-wise; shorter traces (early exit) repeat their
// last row.
std::vector<TraceRow> average_traces(const std::vector<std::vector<TraceRow>>& traces) {
  std::size_t len = 0;
  for (const auto& t : traces) len = std::max(len, t.size());
  std::vector<TraceRow> mean(len);
  for (std::size_t i = 0; i < len; ++i) {
    mean[i].outer_iter = static_cast<int>(i);
    for (const auto& t : traces) {
      const TraceRow& r = t[std::min(i, t.size() - 1)];
      mean[i].max_papr_db += r.max_papr_db;
      mean[i].mean_papr_db += r.mean_papr_db;
      mean[i].objective += r.objective;
      mean[i].perturbation_power += r.perturbation_power;
    }
    const double n = static_cast<double>(traces.size());
    mean[i].max_papr_db /= n;
    mean[i].mean_papr_db /= n;
    mean[i].objective /= n;
    mean[i].perturbation_power /= n;
  }
  return mean;
}

std::string snapshot_label(int t) { return "proxinf-admm@" + std::to_string(t); }

}  // namespace

AdmmParams ExperimentConfig::default_admm() {
  AdmmParams p;
  p.amplitude_unit = comm::kQamScale;
  return p;
}

std::string version_string() { return std::string("nullpapr ") + NULLPAPR_VERSION; }

void ExperimentConfig::apply_preset(const std::string& name) {
  if (name == "paper") {
    system = SystemConfig{};
    trials = 1000;
  } else if (name == "quick") {
    system.tones = 64;
    system.antennas = 32;
    system.users = 8;
    system.guard_tones.reset();
    trials = 100;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected paper or quick)");
  }
  preset = name;
}

void ExperimentConfig::apply_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  if (doc.contains("preset")) apply_preset(doc.at("preset").get<std::string>());
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("antennas", system.antennas);
  get("users", system.users);
  get("tones", system.tones);
  get("taps", system.taps);
  get("oversample", system.oversample);
  if (doc.contains("guard_tones")) {
    if (doc.at("guard_tones").is_null())
      system.guard_tones.reset();
    else
      system.guard_tones = doc.at("guard_tones").get<std::vector<int>>();
  }
  get("lambda", admm.lambda);
  get("rho", admm.rho);
  get("outer", admm.outer);
  get("inner", admm.inner);
  get("amplitude_unit", admm.amplitude_unit);
  if (doc.contains("papr_target_db") && !doc.at("papr_target_db").is_null())
    admm.papr_target_db = doc.at("papr_target_db").get<double>();
  if (doc.contains("dense_projectors"))
    admm.storage = doc.at("dense_projectors").get<bool>() ? ProjectorStorage::dense
                                                          : ProjectorStorage::factored;
  if (doc.contains("clip_ratio") && !doc.at("clip_ratio").is_null())
    clip_ratio = doc.at("clip_ratio").get<double>();
  get("clip_target_db", clip_target_db);
  get("clip_calibration_trials", clip_calibration_trials);
  get("scheme", schemes);
  get("trials", trials);
  get("seed", seed);
  get("snr", snr_db);
  get("snapshots", snapshot_iters);
  get("lambda_grid", lambda_grid);
  get("outer_grid", outer_grid);
  get("soft", soft_decoding);
  if (doc.contains("out")) out_dir = doc.at("out").get<std::string>();
  get("threads", threads);
}

json ExperimentConfig::to_json() const {
  json doc;
  doc["preset"] = preset;
  doc["antennas"] = system.antennas;
  doc["users"] = system.users;
  doc["tones"] = system.tones;
  doc["taps"] = system.taps;
  doc["oversample"] = system.oversample;
  doc["guard_tones"] = system.guard_tones ? json(*system.guard_tones) : json(nullptr);
  doc["lambda"] = admm.lambda;
  doc["rho"] = admm.rho;
  doc["outer"] = admm.outer;
  doc["inner"] = admm.inner;
  doc["amplitude_unit"] = admm.amplitude_unit;
  doc["papr_target_db"] = admm.papr_target_db ? json(*admm.papr_target_db) : json(nullptr);
  doc["dense_projectors"] = admm.storage == ProjectorStorage::dense;
  doc["clip_ratio"] = clip_json(clip_ratio);
  doc["clip_target_db"] = clip_target_db;
  doc["clip_calibration_trials"] = clip_calibration_trials;
  doc["scheme"] = schemes;
  doc["trials"] = trials;
  doc["seed"] = seed;
  doc["snr"] = snr_db;
  doc["snapshots"] = snapshot_iters;
  doc["lambda_grid"] = lambda_grid;
  doc["outer_grid"] = outer_grid;
  doc["soft"] = soft_decoding;
  doc["out"] = out_dir.string();
  return doc;
}

void ExperimentConfig::validate() const {
  system.validate();
  AdmmParams p = admm;
  p.oversample = system.oversample;
  p.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (clip_ratio && !(*clip_ratio > 0.0)) throw ConfigError("clip ratio must be positive");
  if (clip_calibration_trials < 1) throw ConfigError("clip calibration needs >= 1 trial");
  if (schemes.empty()) throw ConfigError("at least one scheme required");
  scheme_kinds();
  for (double l : lambda_grid)
    if (!(l > 0.0)) throw ConfigError("lambda grid values must be positive");
  for (int t : outer_grid)
    if (t < 1) throw ConfigError("outer grid values must be >= 1");
}

std::vector<SchemeKind> ExperimentConfig::scheme_kinds() const {
  std::vector<SchemeKind> kinds;
  for (const auto& s : schemes) {
    const SchemeKind k = parse_scheme(s);
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }
  return kinds;
}

CcdfSummary cmd_ccdf(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const ToneMap tones = cfg.system.tone_map();
  const auto kinds = cfg.scheme_kinds();
  CcdfSummary summary;
  summary.clip_ratio = resolve_clip_ratio(cfg, tones);
  const SchemeSettings settings = settings_for(cfg, summary.clip_ratio);

  struct TrialResult {
    std::vector<TrialRecord> records;
    std::map<int, std::vector<double>> snapshot_papr;
    std::vector<TraceRow> trace;
  };
  std::vector<TrialResult> results(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t t) {
    const TrialInput in = make_trial(cfg.system, tones, cfg.seed, t);
    auto& res = results[t];
    for (SchemeKind kind : kinds) {
      SchemeOutput out = apply_scheme(kind, in.x_zf, in.channels, tones, settings);
      TrialRecord rec;
      rec.scheme = std::string(scheme_name(kind));
      rec.trial = t;
      rec.seed = cfg.seed;
      rec.papr_db = papr_db_per_antenna(out.time);
      rec.pi_db = power_increase_db(out.freq, in.x_zf);
      rec.mui = mui_residual(in.channels, tones, out.freq, in.frame.symbols);
      rec.guard_fraction = guard_band_power(out.freq, tones);
      rec.iterations = out.iterations;
      res.records.push_back(std::move(rec));
      if (kind == SchemeKind::proxinf_admm) {
        for (auto& [iter, snap] : out.admm.snapshots)
          res.snapshot_papr[iter] = std::move(snap.papr_db);
        res.trace = std::move(out.admm.trace);
      }
    }
  });

  std::map<std::string, std::vector<double>> pooled;
  std::vector<std::string> order;
  auto add = [&](const std::string& label, const std::vector<double>& v) {
    if (!pooled.count(label)) order.push_back(label);
    auto& dst = pooled[label];
    dst.insert(dst.end(), v.begin(), v.end());
  };
  std::vector<std::vector<TraceRow>> traces;
  for (auto& res : results) {
    for (auto& rec : res.records) {
      add(rec.scheme, rec.papr_db);
      summary.records.push_back(std::move(rec));
    }
    for (const auto& [iter, papr] : res.snapshot_papr) add(snapshot_label(iter), papr);
    if (!res.trace.empty()) traces.push_back(std::move(res.trace));
  }
  if (!traces.empty()) summary.mean_trace = average_traces(traces);

  std::vector<std::pair<std::string, CcdfCurve>> curves;
  const auto thresholds = default_thresholds();
  for (const auto& label : order) {
    curves.emplace_back(label, ccdf(pooled[label], thresholds));
    summary.samples.emplace_back(label, std::move(pooled[label]));
  }
  write_ccdf_csv(cfg.out_dir / "ccdf.csv", curves);
  write_trials_csv(cfg.out_dir / "trials.csv", summary.records);

  json derived;
  derived["clip_ratio"] = clip_json(summary.clip_ratio);
  for (const auto& [label, samples] : summary.samples)
    derived["papr_at_ccdf_0.01_db"][label] = papr_at_ccdf(samples, 0.01);
  write_metadata(cfg, "ccdf", derived);
  return summary;
}

std::vector<TraceRow> cmd_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const ToneMap tones = cfg.system.tone_map();
  const SchemeSettings settings = settings_for(cfg, std::nullopt);
  std::vector<std::vector<TraceRow>> traces(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t t) {
    const TrialInput in = make_trial(cfg.system, tones, cfg.seed, t);
    traces[t] = run_admm(in.x_zf, in.channels, tones, settings.admm).trace;
  });
  const auto mean = average_traces(traces);
  CsvWriter csv(cfg.out_dir / "convergence.csv",
                {"outer_iter", "max_papr_db", "mean_papr_db", "objective", "perturbation_power"});
  for (const auto& r : mean) {
    csv.cell(r.outer_iter).cell(r.max_papr_db).cell(r.mean_papr_db).cell(r.objective)
        .cell(r.perturbation_power);
    csv.end_row();
  }
  write_metadata(cfg, "convergence", json::object());
  return mean;
}

std::vector<SweepRow> cmd_lambda_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const ToneMap tones = cfg.system.tone_map();
  std::vector<int> outers = cfg.outer_grid;
  std::sort(outers.begin(), outers.end());
  outers.erase(std::unique(outers.begin(), outers.end()), outers.end());
  const int longest = outers.back();

  const std::size_t n_lambda = cfg.lambda_grid.size();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  // results[lambda][trial][outer index] = (papr samples, PI dB)
  std::vector<std::vector<std::vector<std::pair<std::vector<double>, double>>>> results(
      n_lambda, std::vector<std::vector<std::pair<std::vector<double>, double>>>(trials));

  std::vector<TrialInput> inputs(trials);
  parallel_for(trials, cfg.threads, [&](std::size_t t) {
    inputs[t] = make_trial(cfg.system, tones, cfg.seed, t);
  });
  parallel_for(n_lambda * trials, cfg.threads, [&](std::size_t job) {
    const std::size_t li = job / trials, t = job % trials;
    AdmmParams p = settings_for(cfg, std::nullopt).admm;
    p.lambda = cfg.lambda_grid[li];
    p.outer = longest;
    p.papr_target_db.reset();
    p.snapshots = outers;
    const TrialInput& in = inputs[t];
    AdmmResult r = run_admm(in.x_zf, in.channels, tones, p);
    auto& slot = results[li][t];
    for (int outer : outers) {
      Snapshot snap;
      if (outer == longest) {
        snap.papr_db = papr_db_per_antenna(r.transmit);
        snap.grid_power = (in.x_zf.data() + r.perturbation.data()).squaredNorm();
      } else {
        snap = std::move(r.snapshots.at(outer));
      }
      slot.emplace_back(std::move(snap.papr_db), to_db(snap.grid_power / in.x_zf.power()));
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t li = 0; li < n_lambda; ++li)
    for (std::size_t oi = 0; oi < outers.size(); ++oi) {
      std::vector<double> samples, pis;
      for (const auto& trial : results[li]) {
        samples.insert(samples.end(), trial[oi].first.begin(), trial[oi].first.end());
        pis.push_back(trial[oi].second);
      }
      rows.push_back({cfg.lambda_grid[li], outers[oi], papr_at_ccdf(samples, 0.5),
                      papr_at_ccdf(samples, 0.01), mean_of(pis)});
    }
  CsvWriter csv(cfg.out_dir / "sweep.csv",
                {"lambda", "outer", "papr_ccdf50_db", "papr_ccdf01_db", "mean_pi_db"});
  for (const auto& r : rows) {
    csv.cell(r.lambda).cell(r.outer).cell(r.papr_ccdf50_db).cell(r.papr_ccdf01_db)
        .cell(r.mean_pi_db);
    csv.end_row();
  }
  write_metadata(cfg, "lambda-sweep", json::object());
  return rows;
}

std::vector<BerPoint> cmd_ber(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const ToneMap tones = cfg.system.tone_map();
  BerSetup setup;
  setup.system = cfg.system;
  const auto clip = resolve_clip_ratio(cfg, tones);
  setup.settings = settings_for(cfg, clip);
  setup.settings.admm.snapshots.clear();
  setup.schemes = cfg.scheme_kinds();
  setup.snr_db = cfg.snr_db;
  setup.trials = cfg.trials;
  setup.seed = cfg.seed;
  setup.threads = cfg.threads;
  setup.soft = cfg.soft_decoding;
  auto points = simulate_ber(setup);
  write_ber_csv(cfg.out_dir / "ber.csv", points);
  json derived;
  derived["clip_ratio"] = clip_json(clip);
  write_metadata(cfg, "ber", derived);
  return points;
}

std::vector<DemoSignal> cmd_demo_signal(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_out_dir(cfg.out_dir);
  const ToneMap tones = cfg.system.tone_map();
  const auto clip = resolve_clip_ratio(cfg, tones);
  SchemeSettings settings = settings_for(cfg, clip);
  settings.admm.snapshots.clear();
  const TrialInput in = make_trial(cfg.system, tones, cfg.seed, 0);

  std::vector<DemoSignal> signals;
  for (SchemeKind kind : cfg.scheme_kinds()) {
    const SchemeOutput out = apply_scheme(kind, in.x_zf, in.channels, tones, settings);
    DemoSignal sig;
    sig.scheme = std::string(scheme_name(kind));
    for (Index k = 0; k < out.time.n_samples(); ++k)
      sig.time_magnitude.push_back(std::abs(out.time.data()(k, 0)));
    for (Index n = 0; n < out.freq.n_tones(); ++n)
      sig.freq_magnitude.push_back(std::abs(out.freq.data()(n, 0)));
    sig.papr_db = papr_db(out.time.column(0));
    sig.guard_fraction = guard_band_power(out.freq, tones);
    signals.push_back(std::move(sig));
  }

  CsvWriter time_csv(cfg.out_dir / "signal_time.csv", {"scheme", "sample", "magnitude"});
  CsvWriter freq_csv(cfg.out_dir / "signal_freq.csv", {"scheme", "tone", "magnitude"});
  CsvWriter sum_csv(cfg.out_dir / "signal_summary.csv",
                    {"scheme", "papr_db", "guard_power_fraction"});
  for (const auto& sig : signals) {
    for (std::size_t k = 0; k < sig.time_magnitude.size(); ++k) {
      time_csv.cell(sig.scheme).cell(static_cast<long long>(k)).cell(sig.time_magnitude[k]);
      time_csv.end_row();
    }
    for (std::size_t n = 0; n < sig.freq_magnitude.size(); ++n) {
      freq_csv.cell(sig.scheme).cell(static_cast<long long>(n)).cell(sig.freq_magnitude[n]);
      freq_csv.end_row();
    }
    sum_csv.cell(sig.scheme).cell(sig.papr_db).cell(sig.guard_fraction);
    sum_csv.end_row();
  }
  json derived;
  derived["clip_ratio"] = clip_json(clip);
  write_metadata(cfg, "demo-signal", derived);
  return signals;
}

}  // namespace nullpapr
