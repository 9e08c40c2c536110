#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "nullpapr/channel.hpp"
#include "nullpapr/precoding.hpp"
#include "nullpapr/transforms.hpp"

namespace nullpapr::comm {

using Bits = std::vector<std::uint8_t>;

/// Rate-1/2, constraint length 3 code with generators (5, 7) octal.
/// Per input bit u with register (s1, s2): out1 = u ^ s2, out2 = u ^ s1 ^ s2.
inline constexpr int kMemory = 2;

/// Encodes `bits` from the zero state, two output bits per input bit. No
/// tail is appended; see terminate().
Bits conv_encode(std::span<const std::uint8_t> bits);

/// Appends kMemory zero bits so the encoder ends in the zero state.
Bits terminate(std::span<const std::uint8_t> info);

/// Hard-decision Viterbi (Hamming metric) over the 4-state trellis. Returns
/// one bit per coded pair. With `terminated`, the survivor ending in the
/// zero state is chosen. Throws FrameError on an odd length.
Bits viterbi_decode(std::span<const std::uint8_t> coded, bool terminated = true);

/// Soft-input variant; llr[i] > 0 favours coded bit 0. Metric is the
/// correlation sum(llr * (1 - 2b)).
Bits viterbi_decode_soft(std::span<const double> llr, bool terminated = true);

/// Per-axis Gray table, 3 bits (first bit most significant) to levels
/// {-7,...,+7}/sqrt(42): 000 -7, 001 -5, 011 -3, 010 -1, 110 +1, 111 +3,
/// 101 +5, 100 +7. The first three bits of a symbol pick I, the last three Q.
inline const double kQamScale = 1.0 / std::sqrt(42.0);

/// 6-bit label (b0 as MSB) to constellation point.
cplx qam64_point(unsigned label);

/// Throws FrameError when the bit count is not a multiple of 6.
std::vector<cplx> qam64_map(std::span<const std::uint8_t> bits);

/// Nearest-point hard decision, then inverse Gray.
Bits qam64_demap(std::span<const cplx> symbols);

/// Max-log bit LLRs (positive favours 0) for noise variance `n0`.
std::vector<double> qam64_llr(std::span<const cplx> symbols, double n0);

/// Uniform random permutation of a fixed block length.
class Interleaver {
 public:
  Interleaver() = default;
  Interleaver(std::size_t length, Rng& rng);

  std::size_t size() const { return perm_.size(); }

  /// out[i] = in[perm[i]].
  template <typename T>
  std::vector<T> interleave(std::span<const T> in) const {
    check(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = in[perm_[i]];
    return out;
  }

  template <typename T>
  std::vector<T> deinterleave(std::span<const T> in) const {
    check(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) out[perm_[i]] = in[i];
    return out;
  }

 private:
  void check(std::size_t n) const;
  std::vector<std::size_t> perm_;
};

/// One OFDM frame of coded traffic: each user's terminated codeword is
/// interleaved and mapped onto that user's data tones.
struct LinkFrame {
  std::vector<Bits> info;  // per user, information bits
  UserSymbols symbols;
  Interleaver interleaver;
};

/// Information bits per user for a frame with `data_tones` data tones.
std::size_t info_bits_per_user(std::size_t data_tones);

/// Draws bits from `bit_rng` and a permutation from `perm_rng`.
LinkFrame make_frame(const ToneMap& tones, int users, Rng& bit_rng, Rng& perm_rng);

/// N0 = mean squared row norm of the transmitted grid / SNR.
double noise_variance(const SignalGrid& transmitted, double snr_db);

struct ErrorCount {
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;

  ErrorCount& operator+=(const ErrorCount& o) {
    bits += o.bits;
    errors += o.errors;
    return *this;
  }
};

/// r_n = H_n x_n + e_n with e_n ~ CN(0, n0 I_K), then per-user demap,
/// deinterleave and Viterbi decode. n0 = 0 is the noiseless link.
ErrorCount receive_frame(const ChannelSet& channels, const ToneMap& tones,
                         const SignalGrid& transmitted, const LinkFrame& frame,
                         double n0, Rng& noise_rng, bool soft = false);

}  // namespace nullpapr::comm
