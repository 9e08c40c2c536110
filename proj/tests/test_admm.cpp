#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "nullpapr/admm.hpp"
#include "nullpapr/proximal.hpp"
#include "nullpapr/system.hpp"
#include "oracles.hpp"

using namespace nullpapr;

namespace {

TrialInput small_trial(std::uint64_t trial, int m = 16, int k = 4, int n = 32) {
  SystemConfig sys;
  sys.antennas = m;
  sys.users = k;
  sys.tones = n;
  sys.taps = 4;
  return make_trial(sys, sys.tone_map(), 5, trial);
}

AdmmParams quick_params(int outer = 30) {
  AdmmParams p;
  p.amplitude_unit = comm::kQamScale;
  p.outer = outer;
  return p;
}

double max_null_residual(const ChannelSet& ch, const ToneMap& tones, const SignalGrid& dx) {
  double worst = 0;
  for (int n : tones.data_tones())
    worst = std::max(worst, (ch.freq[n] * dx.data().row(n).transpose()).norm());
  return worst;
}

}  // namespace

TEST_CASE("outer clip") {
  std::mt19937_64 rng(1);
  const SignalGrid x(oracle::random_grid(8, 2, rng));
  const SignalGrid zero(8, 2);
  AdmmParams p;
  p.lambda = 0.0;  // outer_clip itself accepts lambda = 0
  CHECK(outer_clip(x, zero, p).data() == synthesize(x, 4).data());

  CMatrix imp = CMatrix::Zero(4, 1);
  imp(1, 0) = 2.0;
  p.lambda = 1.0;
  const TimeGrid y = outer_clip(SignalGrid(imp), SignalGrid(4, 1), p);
  const TimeGrid q = synthesize(SignalGrid(imp), 4);
  std::vector<cplx> col(q.data().data(), q.data().data() + 16);
  const auto expect = oracle::clamp(col, oracle::bisection_level(col, 1.0));
  for (int k = 0; k < 16; ++k) CHECK(std::abs(y.data()(k, 0) - expect[k]) < 1e-10);

  p.antenna_weights = {0.0, 1.0};
  const TimeGrid w = outer_clip(x, zero, p);
  const TimeGrid s = synthesize(x, 4);
  CHECK(w.data().col(0) == s.data().col(0));
  CHECK_FALSE(w.data().col(1) == s.data().col(1));
}

TEST_CASE("inner ADMM fixed points") {
  Rng crng = make_stream(3, 0);
  const ChannelSet ch = draw_channel(2, 6, 2, 8, crng);
  const ToneMap tones = default_tone_map(8);
  const ProjectorSet proj(ch, tones);
  AdmmParams p;
  p.inner = 50;
  const InnerState zero{SignalGrid(8, 6), SignalGrid(8, 6)};
  const InnerState out = inner_admm(TimeGrid(8, 6, 4), proj, tones, zero, p);
  CHECK(out.d.data().cwiseAbs().maxCoeff() == 0.0);

  // K = M: the null space is {0}
  Rng frng = make_stream(3, 1);
  const ChannelSet full = draw_channel(4, 4, 2, 8, frng);
  const ProjectorSet fproj(full, tones);
  std::mt19937_64 rng(3);
  const TimeGrid v(oracle::random_grid(32, 4, rng), 4);
  const InnerState z = inner_admm(v, fproj, tones, {SignalGrid(8, 4), SignalGrid(8, 4)}, p);
  CHECK(z.d.data().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("missing projector is a configuration error") {
  Rng crng = make_stream(3, 0);
  const ChannelSet ch = draw_channel(2, 6, 2, 8, crng);
  const ProjectorSet proj(ch, default_tone_map(8, 4));
  const ToneMap all = default_tone_map(8, 0);
  AdmmParams p;
  CHECK_THROWS_AS(
      inner_admm(TimeGrid(8, 6, 4), proj, all, {SignalGrid(8, 6), SignalGrid(8, 6)}, p),
      ConfigError);
}

TEST_CASE("inner ADMM reaches the projected-gradient optimum") {
  for (int l : {1, 2}) {
    Rng crng = make_stream(17, l);
    const ChannelSet ch = draw_channel(2, 4, 2, 4, crng);
    const ToneMap tones = default_tone_map(4, 1);
    const ProjectorSet proj(ch, tones);
    std::mt19937_64 rng(17 + l);
    const CMatrix v = oracle::random_grid(4 * l, 4, rng);
    AdmmParams p;
    p.oversample = l;
    p.inner = 500;
    const InnerState out =
        inner_admm(TimeGrid(v, l), proj, tones, {SignalGrid(4, 4), SignalGrid(4, 4)}, p);
    const CMatrix f = oracle::synthesis_matrix(4, l);
    const CMatrix d_ref = oracle::projected_gradient(v, ch, tones, l, 5000);
    const double ref = (v - f * d_ref).squaredNorm();
    const double got = (v - f * out.d.data()).squaredNorm();
    CHECK(std::abs(got - ref) <= 1e-4 * ref);
    CHECK(max_null_residual(ch, tones, out.d) < 1e-12);
  }
}

TEST_CASE("every outer iterate is feasible") {
  const TrialInput in = small_trial(0);
  const ToneMap tones = default_tone_map(32);
  AdmmParams p = quick_params(25);
  int calls = 0;
  const AdmmResult r = run_admm(in.x_zf, in.channels, tones, p,
                                [&](int t, const SignalGrid& dx) {
    ++calls;
    CHECK(t == calls);
    CHECK(max_null_residual(in.channels, tones, dx) <= 1e-9 * dx.data().norm());
    for (int g : tones.guard_tones()) CHECK(dx.data().row(g).cwiseAbs().maxCoeff() == 0.0);
  });
  CHECK(calls == 25);
  CHECK(r.iterations == 25);
  const SignalGrid xhat(in.x_zf.data() + r.perturbation.data());
  CHECK(mui_residual(in.channels, tones, xhat, in.frame.symbols) <= 1e-8);
  const double lhs = xhat.power() - in.x_zf.power() - r.perturbation.power();
  CHECK(std::abs(lhs) <= 1e-9 * in.x_zf.power());
  CHECK((r.transmit.data() - synthesize(xhat, 4).data()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace bookkeeping") {
  const TrialInput in = small_trial(1);
  const ToneMap tones = default_tone_map(32);
  AdmmParams p = quick_params(30);
  p.snapshots = {5, 30};
  const AdmmResult r = run_admm(in.x_zf, in.channels, tones, p);
  REQUIRE(r.trace.size() == 31);
  const auto zf = papr_db_per_antenna(synthesize(in.x_zf, 4));
  CHECK(r.trace[0].max_papr_db == *std::max_element(zf.begin(), zf.end()));
  CHECK(r.trace[0].perturbation_power == 0.0);
  CHECK(r.trace.back().max_papr_db < r.trace[0].max_papr_db - 2.0);
  CHECK(r.trace.back().perturbation_power == doctest::Approx(r.perturbation.power()));
  REQUIRE(r.snapshots.count(5) == 1);
  REQUIRE(r.snapshots.count(30) == 1);
  const auto last = papr_db_per_antenna(r.transmit);
  CHECK(r.snapshots.at(30).papr_db == last);
  CHECK(r.snapshots.at(30).grid_power ==
        doctest::Approx((in.x_zf.data() + r.perturbation.data()).squaredNorm()));
}

TEST_CASE("vanishing lambda leaves the ZF signal alone") {
  const TrialInput in = small_trial(2);
  const ToneMap tones = default_tone_map(32);
  AdmmParams p = quick_params(5);
  p.lambda = 1e-12;
  const AdmmResult r = run_admm(in.x_zf, in.channels, tones, p);
  CHECK(r.perturbation.data().norm() < 1e-9 * in.x_zf.data().norm());
  CHECK(r.trace.back().max_papr_db == doctest::Approx(r.trace[0].max_papr_db).epsilon(1e-6));
}

TEST_CASE("PAPR target stops early") {
  const TrialInput in = small_trial(3);
  const ToneMap tones = default_tone_map(32);
  AdmmParams p = quick_params(200);
  p.papr_target_db = 5.0;
  const AdmmResult r = run_admm(in.x_zf, in.channels, tones, p);
  CHECK(r.iterations < 200);
  CHECK(r.trace.back().max_papr_db <= 5.0);
  CHECK(r.trace[r.trace.size() - 2].max_papr_db > 5.0);
}

TEST_CASE("dense and factored projectors agree") {
  const TrialInput in = small_trial(4);
  const ToneMap tones = default_tone_map(32);
  AdmmParams p = quick_params(10);
  const AdmmResult a = run_admm(in.x_zf, in.channels, tones, p);
  p.storage = ProjectorStorage::dense;
  const AdmmResult b = run_admm(in.x_zf, in.channels, tones, p);
  CHECK((a.perturbation.data() - b.perturbation.data()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("objective decreases with accurate inner solves") {
  const TrialInput in = small_trial(5);
  const ToneMap tones = default_tone_map(32);
  AdmmParams p = quick_params(20);
  p.inner = 80;
  const AdmmResult r = run_admm(in.x_zf, in.channels, tones, p);
  for (std::size_t t = 2; t < r.trace.size(); ++t)
    CHECK(r.trace[t].objective <= r.trace[t - 1].objective * (1 + 1e-6));

  // Early-terminated inner loop: still decreasing over 10-iteration windows.
  p.inner = 2;
  p.outer = 60;
  const AdmmResult e = run_admm(in.x_zf, in.channels, tones, p);
  for (std::size_t t = 1; t + 10 < e.trace.size(); ++t)
    CHECK(e.trace[t + 10].objective <= e.trace[t].objective);
}

TEST_CASE("relaxed objective") {
  std::mt19937_64 rng(8);
  const SignalGrid x(oracle::random_grid(8, 2, rng));
  const SignalGrid dx(oracle::random_grid(8, 2, rng));
  const TimeGrid y(oracle::random_grid(32, 2, rng), 4);
  AdmmParams p;
  p.lambda = 2.0;
  const CMatrix q = oracle::direct_synthesize(x.data() + dx.data(), 4);
  const double expect = 2.0 * (y.data().col(0).cwiseAbs().maxCoeff() +
                               y.data().col(1).cwiseAbs().maxCoeff()) +
                        (y.data() - q).squaredNorm();
  CHECK(relaxed_objective(x, dx, y, p) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  AdmmParams p;
  CHECK_NOTHROW(p.validate());
  p.rho = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = AdmmParams{};
  p.outer = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = AdmmParams{};
  p.antenna_weights = {1.0, -1.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("trace csv") {
  const auto path = std::filesystem::temp_directory_path() / "nullpapr_trace_test.csv";
  write_trace_csv({{0, 9.5, 9.0, 3.0, 0.0}, {1, 7.25, 7.0, 2.5, 0.125}}, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "outer_iter,max_papr_db,objective,perturbation_power");
  CHECK(row == "0,9.5,3,0");
  std::filesystem::remove(path);
}

TEST_CASE("per-iteration cost grows linearly in M N") {
  const std::pair<int, int> sizes[4] = {{16, 32}, {32, 32}, {32, 64}, {64, 64}};
  std::vector<double> mn, secs;
  for (auto [m, n] : sizes) {
    SystemConfig sys;
    sys.antennas = m;
    sys.users = 4;
    sys.tones = n;
    const ToneMap tones = sys.tone_map();
    const TrialInput in = make_trial(sys, tones, 1, 0);
    const ProjectorSet proj(in.channels, tones);
    AdmmParams p = quick_params(40);
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      run_admm(in.x_zf, proj, tones, p);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    mn.push_back(double(m) * n);
    secs.push_back(best);
  }
  // least-squares line secs = a + b * MN and its R^2
  const double k = 4, sx = std::accumulate(mn.begin(), mn.end(), 0.0),
               sy = std::accumulate(secs.begin(), secs.end(), 0.0);
  double sxx = 0, sxy = 0;
  for (int i = 0; i < 4; ++i) sxx += mn[i] * mn[i], sxy += mn[i] * secs[i];
  const double b = (k * sxy - sx * sy) / (k * sxx - sx * sx), a = (sy - b * sx) / k;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < 4; ++i) {
    ss_res += std::pow(secs[i] - a - b * mn[i], 2);
    ss_tot += std::pow(secs[i] - sy / k, 2);
  }
  CHECK(1 - ss_res / ss_tot > 0.9);
}
