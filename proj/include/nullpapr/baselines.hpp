#pragma once

#include <span>

#include "nullpapr/transforms.hpp"

namespace nullpapr {

/// Amplitude clipping: clip level per antenna is clip_ratio * RMS(column).
struct ClipConfig {
  double clip_ratio = 1.6;
};

struct ClipResult {
  TimeGrid time;    // clipped oversampled signal
  SignalGrid freq;  // analyze(time); generally leaks into guard tones
};

ClipResult clip_transmit(const SignalGrid& x, int oversample, const ClipConfig& cfg);

/// Plain synthesis of the precoded grid.
TimeGrid zf_transmit(const SignalGrid& x, int oversample);

/// Bisection on the clip ratio so that the median per-antenna PAPR of the
/// clipped signals, pooled over `grids`, equals `target_db`.
double calibrate_clip_ratio(std::span<const SignalGrid> grids, int oversample,
                            double target_db);

}  // namespace nullpapr
