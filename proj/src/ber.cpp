#include "nullpapr/ber.hpp"

#include <cmath>

#include "nullpapr/csv.hpp"

namespace nullpapr {

namespace {
constexpr std::uint64_t kNoiseStreamBase = 1000;
}  // namespace

std::vector<BerPoint> simulate_ber(const BerSetup& setup) {
  setup.system.validate();
  const ToneMap tones = setup.system.tone_map();
  const std::size_t n_schemes = setup.schemes.size();
  const std::size_t n_snr = setup.snr_db.size();
  std::vector<std::vector<comm::ErrorCount>> per_trial(
      setup.trials, std::vector<comm::ErrorCount>(n_schemes * n_snr));

  parallel_for(static_cast<std::size_t>(setup.trials), setup.threads, [&](std::size_t t) {
    const TrialInput in = make_trial(setup.system, tones, setup.seed, t);
    for (std::size_t s = 0; s < n_schemes; ++s) {
      const SchemeOutput out =
          apply_scheme(setup.schemes[s], in.x_zf, in.channels, tones, setup.settings);
      for (std::size_t j = 0; j < n_snr; ++j) {
        Rng noise = make_stream(setup.seed, t, kNoiseStreamBase + j);
        const double n0 = comm::noise_variance(out.freq, setup.snr_db[j]);
        per_trial[t][s * n_snr + j] =
            comm::receive_frame(in.channels, tones, out.freq, in.frame, n0, noise, setup.soft);
      }
    }
  });

  std::vector<BerPoint> points;
  for (std::size_t s = 0; s < n_schemes; ++s)
    for (std::size_t j = 0; j < n_snr; ++j) {
      comm::ErrorCount total;
      for (const auto& trial : per_trial) total += trial[s * n_snr + j];
      points.push_back({setup.snr_db[j], std::string(scheme_name(setup.schemes[s])),
                        total.bits, total.errors});
    }
  return points;
}

void write_ber_csv(const std::filesystem::path& path, const std::vector<BerPoint>& points) {
  CsvWriter csv(path, {"snr_db", "scheme", "bits_simulated", "bit_errors", "ber"});
  for (const auto& p : points) {
    csv.cell(p.snr_db)
        .cell(p.scheme)
        .cell(static_cast<long long>(p.bits))
        .cell(static_cast<long long>(p.errors))
        .cell(p.ber());
    csv.end_row();
  }
}

std::optional<double> snr_at_ber(const std::vector<BerPoint>& points,
                                 const std::string& scheme, double target) {
  std::vector<const BerPoint*> curve;
  for (const auto& p : points)
    if (p.scheme == scheme && std::isfinite(p.snr_db)) curve.push_back(&p);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const double b0 = curve[i]->ber(), b1 = curve[i + 1]->ber();
    if (b0 >= target && b1 < target) {
      const double s0 = curve[i]->snr_db, s1 = curve[i + 1]->snr_db;
      if (b1 <= 0.0) {
        // No errors at the upper point: interpolate towards half an error.
        const double floor_ber = 0.5 / static_cast<double>(curve[i + 1]->bits);
        const double frac = (std::log10(b0) - std::log10(target)) /
                            (std::log10(b0) - std::log10(floor_ber));
        return s0 + std::min(frac, 1.0) * (s1 - s0);
      }
      const double frac =
          (std::log10(b0) - std::log10(target)) / (std::log10(b0) - std::log10(b1));
      return s0 + frac * (s1 - s0);
    }
  }
  return std::nullopt;
}

}  // namespace nullpapr
