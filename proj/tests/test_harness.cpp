#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nullpapr/harness.hpp"

using namespace nullpapr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nullpapr_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny() {
  ExperimentConfig cfg;
  cfg.apply_preset("quick");
  cfg.system.antennas = 16;
  cfg.system.users = 4;
  cfg.system.tones = 32;
  cfg.trials = 4;
  cfg.admm.outer = 25;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("presets") {
  ExperimentConfig cfg;
  CHECK(cfg.system.antennas == 128);
  CHECK(cfg.system.users == 16);
  CHECK(cfg.system.tones == 128);
  CHECK(cfg.system.taps == 8);
  CHECK(cfg.admm.lambda == 1.0);
  CHECK(cfg.admm.rho == 0.5);
  CHECK(cfg.admm.outer == 200);
  CHECK(cfg.admm.inner == 2);
  CHECK(cfg.trials == 1000);
  cfg.apply_preset("quick");
  CHECK(cfg.trials == 100);
  CHECK(cfg.system.tones == 64);
  CHECK(cfg.system.antennas == 32);
  CHECK(cfg.system.users == 8);
  CHECK_THROWS_AS(cfg.apply_preset("huge"), ConfigError);
}

TEST_CASE("config json roundtrip and overrides") {
  ExperimentConfig cfg = tiny();
  cfg.clip_ratio = 1.7;
  cfg.schemes = {"zf", "proxinf-admm"};
  cfg.snr_db = {0, 3};
  cfg.system.guard_tones = std::vector<int>{0, 31};
  ExperimentConfig back;
  back.apply_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());

  ExperimentConfig partial;
  partial.apply_json(nlohmann::json{{"preset", "quick"}, {"lambda", 2.5}});
  CHECK(partial.system.tones == 64);
  CHECK(partial.admm.lambda == 2.5);
  CHECK_THROWS_AS(partial.apply_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("validation") {
  ExperimentConfig cfg = tiny();
  cfg.schemes = {"zf", "bogus"};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.system.users = 20;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.admm.rho = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("ccdf outputs are deterministic and thread-independent") {
  ExperimentConfig cfg = tiny();
  const fs::path first = scratch("ccdf_a");
  cfg.out_dir = first;
  const CcdfSummary s = cmd_ccdf(cfg);
  cfg.out_dir = scratch("ccdf_b");
  cfg.threads = 3;
  cmd_ccdf(cfg);
  for (const char* f : {"ccdf.csv", "trials.csv"})
    CHECK(slurp(first / f) == slurp(cfg.out_dir / f));
  CHECK(first_line(cfg.out_dir / "ccdf.csv") == "threshold_db,scheme,ccdf");
  CHECK(first_line(cfg.out_dir / "trials.csv") ==
        "trial,seed,scheme,max_papr_db,mean_papr_db,pi_db,mui_residual,guard_power_fraction,"
        "iterations");
  const auto meta = nlohmann::json::parse(slurp(cfg.out_dir / "ccdf.json"));
  CHECK(meta["command"] == "ccdf");
  CHECK(meta["derived"]["clip_ratio"].is_number());

  REQUIRE(s.samples.size() == 4);
  CHECK(s.samples[0].first == "zf");
  CHECK(s.samples[3].first == "proxinf-admm@20");
  for (const auto& [label, v] : s.samples) CHECK(v.size() == 4 * 16);
  CHECK(s.records.size() == 12);
  for (const auto& r : s.records) {
    if (r.scheme == "clipping") {
      CHECK(r.pi_db < 0.0);
      CHECK(r.guard_fraction > 0.0);
    } else {
      CHECK(r.guard_fraction == 0.0);
      CHECK(r.mui <= 1e-8);
      CHECK(r.pi_db >= 0.0);
    }
  }
  CHECK(s.mean_trace.size() == 26);
}

TEST_CASE("convergence averages traces") {
  ExperimentConfig cfg = tiny();
  cfg.out_dir = scratch("conv");
  const auto mean = cmd_convergence(cfg);
  REQUIRE(mean.size() == 26);
  CHECK(first_line(cfg.out_dir / "convergence.csv") ==
        "outer_iter,max_papr_db,mean_papr_db,objective,perturbation_power");
  // iteration 0 is the ZF signal
  const ToneMap tones = cfg.system.tone_map();
  double zf = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    const auto p = papr_db_per_antenna(synthesize(make_trial(cfg.system, tones, cfg.seed, t).x_zf, 4));
    zf += *std::max_element(p.begin(), p.end());
  }
  CHECK(mean[0].max_papr_db == doctest::Approx(zf / cfg.trials).epsilon(1e-12));
  CHECK(mean.back().max_papr_db < mean[0].max_papr_db);

  // early exit: shorter traces carry their last row forward
  cfg.admm.papr_target_db = 6.0;
  cfg.out_dir = scratch("conv_target");
  const auto capped = cmd_convergence(cfg);
  CHECK(capped.size() <= 26);
  CHECK(capped.back().max_papr_db <= 6.0);
}

TEST_CASE("lambda sweep") {
  ExperimentConfig cfg = tiny();
  cfg.lambda_grid = {0.5, 1.0};
  cfg.outer_grid = {5, 20};
  cfg.out_dir = scratch("sweep");
  const auto rows = cmd_lambda_sweep(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].lambda == 0.5);
  CHECK(rows[0].outer == 5);
  CHECK(rows[1].outer == 20);
  for (const auto& r : rows) {
    CHECK(r.papr_ccdf01_db >= r.papr_ccdf50_db);
    CHECK(r.mean_pi_db >= 0.0);
  }
  CHECK(rows[1].mean_pi_db >= rows[0].mean_pi_db);
  CHECK(first_line(cfg.out_dir / "sweep.csv") ==
        "lambda,outer,papr_ccdf50_db,papr_ccdf01_db,mean_pi_db");
}

TEST_CASE("ber: noiseless link, monotone curves, csv") {
  ExperimentConfig cfg = tiny();
  cfg.trials = 30;
  cfg.snr_db = {std::numeric_limits<double>::infinity()};
  cfg.out_dir = scratch("ber_clean");
  for (const auto& p : cmd_ber(cfg))
    if (p.scheme != "clipping") CHECK(p.errors == 0);

  cfg.schemes = {"zf"};
  cfg.trials = 320;  // 4 users x 82 bits x 320 trials > 1e5 bits per point
  cfg.snr_db = {-8, -6, -4, -2, 0};
  cfg.out_dir = scratch("ber");
  const auto pts = cmd_ber(cfg);
  REQUIRE(pts.size() == 5);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].ber() <= pts[i - 1].ber() * 1.05);
  CHECK(pts.front().ber() > 0.0);
  CHECK(first_line(cfg.out_dir / "ber.csv") == "snr_db,scheme,bits_simulated,bit_errors,ber");
}

TEST_CASE("snr at ber interpolation") {
  std::vector<BerPoint> pts{{0, "a", 1000, 100}, {2, "a", 1000, 10}, {4, "a", 1000, 1}};
  CHECK(*snr_at_ber(pts, "a", 0.01) == doctest::Approx(2.0));
  CHECK(*snr_at_ber(pts, "a", std::sqrt(0.1 * 0.01)) == doctest::Approx(1.0));
  CHECK_FALSE(snr_at_ber(pts, "a", 1e-5).has_value());
  CHECK_FALSE(snr_at_ber(pts, "b", 0.01).has_value());
}

TEST_CASE("demo signal") {
  ExperimentConfig cfg = tiny();
  cfg.admm.outer = 200;
  cfg.out_dir = scratch("demo");
  const auto sig = cmd_demo_signal(cfg);
  REQUIRE(sig.size() == 3);
  for (const auto& s : sig) {
    CHECK(s.time_magnitude.size() == 128);
    CHECK(s.freq_magnitude.size() == 32);
  }
  const ToneMap tones = cfg.system.tone_map();
  for (int g : tones.guard_tones()) {
    CHECK(sig[0].freq_magnitude[g] == 0.0);
    CHECK(sig[2].freq_magnitude[g] == 0.0);
  }
  CHECK(sig[1].guard_fraction > 0.0);
  CHECK(sig[2].papr_db < sig[0].papr_db);
  for (const char* f : {"signal_time.csv", "signal_freq.csv", "signal_summary.csv", "demo-signal.json"})
    CHECK(fs::exists(cfg.out_dir / f));
}

TEST_CASE("demo signal at full size sits near a ceiling") {
  ExperimentConfig cfg;
  cfg.schemes = {"proxinf-admm"};
  cfg.threads = 1;
  cfg.out_dir = scratch("demo_full");
  const auto sig = cmd_demo_signal(cfg);
  const auto& mag = sig.at(0).time_magnitude;
  REQUIRE(mag.size() == 512);
  const double peak = *std::max_element(mag.begin(), mag.end());
  int near = 0;
  for (double v : mag) near += 20 * std::log10(v / peak) >= -1.0;
  CHECK(near >= 256);  // at least half of the samples within 1 dB of the peak
}

TEST_CASE("unwritable output directory is reported") {
  ExperimentConfig cfg = tiny();
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  cfg.out_dir = file / "sub";
  CHECK_THROWS(cmd_ccdf(cfg));
  fs::remove(file);
}
