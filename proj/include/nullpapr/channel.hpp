#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "nullpapr/types.hpp"

namespace nullpapr {

/// Partition of tones {0..N-1} into data tones and guard tones.
class ToneMap {
 public:
  ToneMap() = default;

  /// Builds the map from an explicit guard index list; every other tone
  /// carries data. Throws ConfigError on out-of-range or duplicate indices.
  static ToneMap from_guards(int n_tones, std::vector<int> guard_tones);

  int n_tones() const { return n_tones_; }
  const std::vector<int>& data_tones() const { return data_; }
  const std::vector<int>& guard_tones() const { return guard_; }
  bool is_data(int tone) const { return is_data_[tone]; }

 private:
  int n_tones_ = 0;
  std::vector<int> data_;
  std::vector<int> guard_;
  std::vector<bool> is_data_;
};

/// Guard band at both spectrum edges. With no explicit count, uses
/// ceil(14 N / 128) guards (114 data tones at N = 128); ceil(g/2) of them
/// occupy the top indices and the rest the bottom indices.
ToneMap default_tone_map(int n_tones, std::optional<int> guard_count = {});

/// Tap-delay-line channel and its per-tone responses.
/// freq[n] = sum_{d=1}^{D} taps[d-1] * exp(-j 2 pi d n / N).
struct ChannelSet {
  std::vector<CMatrix> taps;  // D matrices, K x M
  std::vector<CMatrix> freq;  // N matrices, K x M

  Index users() const { return taps.front().rows(); }
  Index antennas() const { return taps.front().cols(); }
  int n_taps() const { return static_cast<int>(taps.size()); }
  int n_tones() const { return static_cast<int>(freq.size()); }
};

/// Computes the per-tone responses of the given taps.
ChannelSet channel_from_taps(std::vector<CMatrix> taps, int n_tones);

/// Draws i.i.d. CN(0,1) taps. A draw with a rank-deficient H_n is rejected
/// and redrawn; the number of rejections goes to `redraws` when given.
ChannelSet draw_channel(int users, int antennas, int n_taps, int n_tones,
                        Rng& rng, int* redraws = nullptr);

/// True when every H_n has full row rank (Gram matrix is positive definite).
bool full_row_rank(const ChannelSet& channels);

/// JSON dump of the taps: {"users","antennas","taps","tones","data"} where
/// "data" holds each tap row-major as interleaved re/im doubles.
void save_channel(const ChannelSet& channels, const std::filesystem::path& path);
ChannelSet load_channel(const std::filesystem::path& path);

}  // namespace nullpapr
