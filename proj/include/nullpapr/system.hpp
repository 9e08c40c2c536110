#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nullpapr/admm.hpp"
#include "nullpapr/baselines.hpp"
#include "nullpapr/channel.hpp"
#include "nullpapr/commsim.hpp"

namespace nullpapr {

/// Array and waveform dimensions shared by every experiment.
struct SystemConfig {
  int antennas = 128;
  int users = 16;
  int tones = 128;
  int taps = 8;
  int oversample = 4;
  std::optional<std::vector<int>> guard_tones;  // overrides the default map

  void validate() const;
  ToneMap tone_map() const;
};

/// Channel, coded frame and ZF grid of one Monte-Carlo trial. A pure function
/// of (seed, trial): every scheme in the trial sees the same realization.
struct TrialInput {
  ChannelSet channels;
  comm::LinkFrame frame;
  SignalGrid x_zf;
};

TrialInput make_trial(const SystemConfig& system, const ToneMap& tones,
                      std::uint64_t seed, std::uint64_t trial);

enum class SchemeKind { zf, clipping, proxinf_admm };

std::string_view scheme_name(SchemeKind kind);
/// Accepts "zf", "clipping", "proxinf-admm". Throws ConfigError otherwise.
SchemeKind parse_scheme(std::string_view name);

struct SchemeSettings {
  AdmmParams admm;
  ClipConfig clip;
};

struct SchemeOutput {
  SignalGrid freq;  // transmitted frequency grid
  TimeGrid time;    // transmitted oversampled signal
  AdmmResult admm;  // populated for proxinf-admm only
  int iterations = 0;
};

SchemeOutput apply_scheme(SchemeKind kind, const SignalGrid& x_zf,
                          const ChannelSet& channels, const ToneMap& tones,
                          const SchemeSettings& settings,
                          const IterateObserver& observer = {});

/// Clip ratio whose median per-antenna PAPR over the ZF grids of the first
/// `trials` trials equals target_db.
double calibrate_clip(const SystemConfig& system, const ToneMap& tones,
                      std::uint64_t seed, int trials, double target_db);

/// Runs fn(i) for i in [0, n) on `threads` workers. The first exception thrown
/// by any task is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, threads > 0 ? threads : 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

inline int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace nullpapr
