#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nullpapr/system.hpp"

namespace nullpapr {

struct BerPoint {
  double snr_db = 0.0;
  std::string scheme;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;

  double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
};

struct BerSetup {
  SystemConfig system;
  SchemeSettings settings;
  std::vector<SchemeKind> schemes{SchemeKind::zf, SchemeKind::clipping,
                                  SchemeKind::proxinf_admm};
  std::vector<double> snr_db;  // +inf gives a noiseless link
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool soft = false;
};

/// Coded BER per (scheme, SNR). Each trial draws a fresh channel and frame,
/// runs every scheme once, then decodes at every SNR with noise drawn from
/// a (seed, trial, snr index) stream shared by all schemes. Rows are ordered
/// scheme-major in the order of setup.schemes.
std::vector<BerPoint> simulate_ber(const BerSetup& setup);

/// Columns snr_db,scheme,bits_simulated,bit_errors,ber.
void write_ber_csv(const std::filesystem::path& path, const std::vector<BerPoint>& points);

/// SNR (dB) where the BER curve of `scheme` crosses `target`, by linear
/// interpolation of log10(BER) between grid points. Empty when the curve
/// never crosses the target inside the grid.
std::optional<double> snr_at_ber(const std::vector<BerPoint>& points,
                                 const std::string& scheme, double target);

}  // namespace nullpapr
