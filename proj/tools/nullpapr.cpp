// nullpapr: Monte-Carlo driver for null-space PAPR reduction experiments.
//
//   nullpapr ccdf --preset quick --out out/quick
//   nullpapr ber --snr 10,14,18 --trials 50
//
// Precedence: --preset, then --config <json>, then individual flags.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "nullpapr/harness.hpp"

namespace {

using nullpapr::ExperimentConfig;

struct Flags {
  std::optional<std::string> preset, config, out;
  std::optional<int> antennas, users, tones, taps, oversample, outer, inner, trials, threads;
  std::optional<double> lambda, rho, clip_ratio, papr_target;
  std::optional<std::uint64_t> seed;
  std::vector<double> snr;
  std::vector<std::string> schemes;
  bool dense = false;
  bool soft = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--preset", f.preset, "paper | quick")->check(CLI::IsMember({"paper", "quick"}));
  app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--antennas,-M", f.antennas, "transmit antennas");
  app->add_option("--users,-K", f.users, "single-antenna users");
  app->add_option("--tones,-N", f.tones, "OFDM tones");
  app->add_option("--taps,-D", f.taps, "channel taps");
  app->add_option("--oversample,-L", f.oversample, "oversampling factor");
  app->add_option("--lambda", f.lambda, "l-inf weight");
  app->add_option("--rho", f.rho, "ADMM penalty");
  app->add_option("--outer", f.outer, "outer iterations");
  app->add_option("--inner", f.inner, "inner ADMM iterations");
  app->add_option("--papr-target", f.papr_target, "early exit once max PAPR <= target (dB)");
  app->add_option("--trials", f.trials, "Monte-Carlo trials");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--snr", f.snr, "SNR grid in dB (comma separated)")->delimiter(',');
  app->add_option("--scheme", f.schemes, "zf | clipping | proxinf-admm (repeatable)");
  app->add_option("--clip-ratio", f.clip_ratio, "fixed clip ratio (default: calibrated)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--threads", f.threads, "worker threads");
  app->add_flag("--dense-projectors", f.dense, "store explicit M x M projectors");
  app->add_flag("--soft", f.soft, "soft-decision Viterbi");
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg;
  if (f.preset) cfg.apply_preset(*f.preset);
  if (f.config) {
    std::ifstream in(*f.config);
    cfg.apply_json(nlohmann::json::parse(in));
  }
  auto set = [](const auto& flag, auto& field) {
    if (flag) field = *flag;
  };
  set(f.antennas, cfg.system.antennas);
  set(f.users, cfg.system.users);
  set(f.tones, cfg.system.tones);
  set(f.taps, cfg.system.taps);
  set(f.oversample, cfg.system.oversample);
  set(f.lambda, cfg.admm.lambda);
  set(f.rho, cfg.admm.rho);
  set(f.outer, cfg.admm.outer);
  set(f.inner, cfg.admm.inner);
  set(f.trials, cfg.trials);
  set(f.seed, cfg.seed);
  set(f.threads, cfg.threads);
  if (f.papr_target) cfg.admm.papr_target_db = *f.papr_target;
  if (f.clip_ratio) cfg.clip_ratio = *f.clip_ratio;
  if (f.out) cfg.out_dir = *f.out;
  if (!f.snr.empty()) cfg.snr_db = f.snr;
  if (!f.schemes.empty()) cfg.schemes = f.schemes;
  if (f.dense) cfg.admm.storage = nullpapr::ProjectorStorage::dense;
  if (f.soft) cfg.soft_decoding = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null-space PAPR reduction for massive MIMO-OFDM"};
  app.set_version_flag("--version", nullpapr::version_string());
  app.require_subcommand(1);

  Flags flags;
  std::vector<double> lambdas;
  std::vector<int> outers;
  auto* ccdf = app.add_subcommand("ccdf", "PAPR CCDF of every scheme");
  auto* ber = app.add_subcommand("ber", "coded BER versus SNR");
  auto* conv = app.add_subcommand("convergence", "PAPR per outer iteration");
  auto* sweep = app.add_subcommand("lambda-sweep", "PAPR versus lambda and outer iterations");
  auto* demo = app.add_subcommand("demo-signal", "one realization, antenna 0");
  for (auto* sub : {ccdf, ber, conv, sweep, demo}) add_flags(sub, flags);
  sweep->add_option("--lambdas", lambdas, "lambda grid")->delimiter(',');
  sweep->add_option("--outer-grid", outers, "outer iteration grid")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = build_config(flags);
    if (!lambdas.empty()) cfg.lambda_grid = lambdas;
    if (!outers.empty()) cfg.outer_grid = outers;
    cfg.validate();

    if (ccdf->parsed()) {
      const auto s = nullpapr::cmd_ccdf(cfg);
      for (const auto& [label, samples] : s.samples)
        std::cout << label << "  PAPR@1e-2 = " << nullpapr::papr_at_ccdf(samples, 0.01)
                  << " dB\n";
    } else if (ber->parsed()) {
      for (const auto& p : nullpapr::cmd_ber(cfg))
        std::cout << p.scheme << "  " << p.snr_db << " dB  BER " << p.ber() << "\n";
    } else if (conv->parsed()) {
      const auto trace = nullpapr::cmd_convergence(cfg);
      std::cout << "final max PAPR " << trace.back().max_papr_db << " dB\n";
    } else if (sweep->parsed()) {
      for (const auto& r : nullpapr::cmd_lambda_sweep(cfg))
        std::cout << "lambda " << r.lambda << "  T " << r.outer << "  median "
                  << r.papr_ccdf50_db << " dB\n";
    } else if (demo->parsed()) {
      for (const auto& s : nullpapr::cmd_demo_signal(cfg))
        std::cout << s.scheme << "  PAPR " << s.papr_db << " dB\n";
    }
    std::cout << "wrote " << cfg.out_dir.string() << "\n";
  } catch (const nullpapr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
