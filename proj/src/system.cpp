#include "nullpapr/system.hpp"

#include <string>

namespace nullpapr {

namespace {
// Substream ids under (seed, trial).
constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kBitStream = 1;
constexpr std::uint64_t kPermStream = 2;
}  // namespace

void SystemConfig::validate() const {
  if (antennas < 1 || users < 1 || tones < 2 || taps < 1 || oversample < 1)
    throw ConfigError("system: M, K, D, L must be positive and N >= 2");
  if (users > antennas)
    throw ConfigError("system: K=" + std::to_string(users) + " exceeds M=" +
                      std::to_string(antennas));
}

ToneMap SystemConfig::tone_map() const {
  validate();
  if (guard_tones) return ToneMap::from_guards(tones, *guard_tones);
  return default_tone_map(tones);
}

TrialInput make_trial(const SystemConfig& system, const ToneMap& tones,
                      std::uint64_t seed, std::uint64_t trial) {
  Rng channel_rng = make_stream(seed, trial, kChannelStream);
  Rng bit_rng = make_stream(seed, trial, kBitStream);
  Rng perm_rng = make_stream(seed, trial, kPermStream);
  TrialInput in;
  in.channels = draw_channel(system.users, system.antennas, system.taps, system.tones,
                             channel_rng);
  in.frame = comm::make_frame(tones, system.users, bit_rng, perm_rng);
  in.x_zf = zf_precode(in.channels, tones, in.frame.symbols);
  return in;
}

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::zf: return "zf";
    case SchemeKind::clipping: return "clipping";
    case SchemeKind::proxinf_admm: return "proxinf-admm";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "zf") return SchemeKind::zf;
  if (name == "clipping") return SchemeKind::clipping;
  if (name == "proxinf-admm") return SchemeKind::proxinf_admm;
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected zf, clipping or proxinf-admm)");
}

SchemeOutput apply_scheme(SchemeKind kind, const SignalGrid& x_zf,
                          const ChannelSet& channels, const ToneMap& tones,
                          const SchemeSettings& settings,
                          const IterateObserver& observer) {
  const int l = settings.admm.oversample;
  SchemeOutput out;
  switch (kind) {
    case SchemeKind::zf:
      out.freq = x_zf;
      out.time = zf_transmit(x_zf, l);
      break;
    case SchemeKind::clipping: {
      auto clipped = clip_transmit(x_zf, l, settings.clip);
      out.freq = std::move(clipped.freq);
      out.time = std::move(clipped.time);
      break;
    }
    case SchemeKind::proxinf_admm: {
      out.admm = run_admm(x_zf, channels, tones, settings.admm, observer);
      out.freq = SignalGrid(x_zf.data() + out.admm.perturbation.data());
      out.time = out.admm.transmit;
      out.iterations = out.admm.iterations;
      break;
    }
  }
  return out;
}

double calibrate_clip(const SystemConfig& system, const ToneMap& tones,
                      std::uint64_t seed, int trials, double target_db) {
  std::vector<SignalGrid> grids;
  for (int t = 0; t < trials; ++t)
    grids.push_back(make_trial(system, tones, seed, static_cast<std::uint64_t>(t)).x_zf);
  return calibrate_clip_ratio(grids, system.oversample, target_db);
}

}  // namespace nullpapr
