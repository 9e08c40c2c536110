#include "nullpapr/commsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace nullpapr::comm {
namespace {

// State packs the register as (s1 << 1) | s2, s1 being the newest bit.
struct Branch {
  std::uint8_t out1, out2;
};

constexpr Branch branch(int state, int u) {
  const int s1 = state >> 1, s2 = state & 1;
  return {static_cast<std::uint8_t>(u ^ s2), static_cast<std::uint8_t>(u ^ s1 ^ s2)};
}

template <typename Cost>
Bits viterbi(std::size_t steps, Cost cost, bool terminated) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::array<double, 4> metric{0.0, inf, inf, inf};
  std::vector<std::array<std::uint8_t, 4>> from(steps);

  for (std::size_t t = 0; t < steps; ++t) {
    std::array<double, 4> next{inf, inf, inf, inf};
    for (int ns = 0; ns < 4; ++ns) {
      const int u = ns >> 1;
      for (int s2 = 0; s2 < 2; ++s2) {
        const int prev = ((ns & 1) << 1) | s2;
        if (metric[prev] == inf) continue;
        const Branch b = branch(prev, u);
        const double m = metric[prev] + cost(t, b.out1, b.out2);
        if (m < next[ns]) {
          next[ns] = m;
          from[t][ns] = static_cast<std::uint8_t>(prev);
        }
      }
    }
    metric = next;
  }

  int state = 0;
  if (!terminated)
    state = static_cast<int>(std::min_element(metric.begin(), metric.end()) - metric.begin());
  Bits out(steps);
  for (std::size_t t = steps; t-- > 0;) {
    out[t] = static_cast<std::uint8_t>(state >> 1);
    state = from[t][state];
  }
  return out;
}

// Reflected Gray code of level index i (0 = -7 ... 7 = +7).
constexpr unsigned gray(unsigned i) { return i ^ (i >> 1); }

constexpr std::array<unsigned, 8> inverse_gray_table() {
  std::array<unsigned, 8> inv{};
  for (unsigned i = 0; i < 8; ++i) inv[gray(i)] = i;
  return inv;
}

constexpr auto kLevelOfLabel = inverse_gray_table();

double level_value(unsigned index) { return (2.0 * index - 7.0) * kQamScale; }

unsigned nearest_level(double v) {
  const double idx = std::round((v / kQamScale + 7.0) / 2.0);
  return static_cast<unsigned>(std::clamp(idx, 0.0, 7.0));
}

// Max-log LLRs of the three bits on one axis.
void axis_llr(double v, double n0, double* out) {
  for (int bit = 0; bit < 3; ++bit) {
    double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
    for (unsigned i = 0; i < 8; ++i) {
      const double d = (v - level_value(i)) * (v - level_value(i));
      double& best = ((gray(i) >> (2 - bit)) & 1) ? d1 : d0;
      best = std::min(best, d);
    }
    out[bit] = (d1 - d0) / n0;
  }
}

}  // namespace

Bits conv_encode(std::span<const std::uint8_t> bits) {
  Bits out;
  out.reserve(2 * bits.size());
  int state = 0;
  for (std::uint8_t bit : bits) {
    const int u = bit & 1;
    const Branch b = branch(state, u);
    out.push_back(b.out1);
    out.push_back(b.out2);
    state = (u << 1) | (state >> 1);
  }
  return out;
}

Bits terminate(std::span<const std::uint8_t> info) {
  Bits out(info.begin(), info.end());
  out.insert(out.end(), kMemory, 0);
  return out;
}

Bits viterbi_decode(std::span<const std::uint8_t> coded, bool terminated) {
  if (coded.size() % 2 != 0)
    throw FrameError("viterbi: coded length " + std::to_string(coded.size()) + " is odd");
  return viterbi(
      coded.size() / 2,
      [&](std::size_t t, int o1, int o2) {
        return static_cast<double>((coded[2 * t] != o1) + (coded[2 * t + 1] != o2));
      },
      terminated);
}

Bits viterbi_decode_soft(std::span<const double> llr, bool terminated) {
  if (llr.size() % 2 != 0)
    throw FrameError("viterbi: coded length " + std::to_string(llr.size()) + " is odd");
  return viterbi(
      llr.size() / 2,
      [&](std::size_t t, int o1, int o2) {
        return -(llr[2 * t] * (1 - 2 * o1) + llr[2 * t + 1] * (1 - 2 * o2));
      },
      terminated);
}

cplx qam64_point(unsigned label) {
  return {level_value(kLevelOfLabel[(label >> 3) & 7]), level_value(kLevelOfLabel[label & 7])};
}

std::vector<cplx> qam64_map(std::span<const std::uint8_t> bits) {
  if (bits.size() % 6 != 0)
    throw FrameError("qam64: bit count " + std::to_string(bits.size()) +
                     " is not a multiple of 6");
  std::vector<cplx> out(bits.size() / 6);
  for (std::size_t s = 0; s < out.size(); ++s) {
    unsigned label = 0;
    for (int b = 0; b < 6; ++b) label = (label << 1) | (bits[6 * s + b] & 1u);
    out[s] = qam64_point(label);
  }
  return out;
}

Bits qam64_demap(std::span<const cplx> symbols) {
  Bits out;
  out.reserve(6 * symbols.size());
  for (const cplx& v : symbols) {
    const unsigned label = (gray(nearest_level(v.real())) << 3) | gray(nearest_level(v.imag()));
    for (int b = 5; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((label >> b) & 1));
  }
  return out;
}

std::vector<double> qam64_llr(std::span<const cplx> symbols, double n0) {
  if (!(n0 > 0.0)) n0 = 1.0;  // noiseless: only the signs matter
  std::vector<double> out(6 * symbols.size());
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    axis_llr(symbols[s].real(), n0, &out[6 * s]);
    axis_llr(symbols[s].imag(), n0, &out[6 * s + 3]);
  }
  return out;
}

Interleaver::Interleaver(std::size_t length, Rng& rng) : perm_(length) {
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  std::shuffle(perm_.begin(), perm_.end(), rng);
}

void Interleaver::check(std::size_t n) const {
  if (n != perm_.size())
    throw FrameError("interleaver: block of " + std::to_string(n) + " bits, expected " +
                     std::to_string(perm_.size()));
}

std::size_t info_bits_per_user(std::size_t data_tones) {
  const std::size_t coded = 6 * data_tones;
  if (coded / 2 <= static_cast<std::size_t>(kMemory))
    throw ConfigError("frame: too few data tones for a terminated codeword");
  return coded / 2 - kMemory;
}

LinkFrame make_frame(const ToneMap& tones, int users, Rng& bit_rng, Rng& perm_rng) {
  const auto& data = tones.data_tones();
  const std::size_t info_len = info_bits_per_user(data.size());
  LinkFrame frame;
  frame.interleaver = Interleaver(6 * data.size(), perm_rng);
  frame.symbols.s = CMatrix::Zero(tones.n_tones(), users);
  frame.symbols.labels = Eigen::MatrixXi::Constant(tones.n_tones(), users, -1);
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < users; ++k) {
    Bits info(info_len);
    for (auto& b : info) b = coin(bit_rng) ? 1 : 0;
    const Bits coded = conv_encode(terminate(info));
    const Bits mixed = frame.interleaver.interleave<std::uint8_t>(coded);
    for (std::size_t i = 0; i < data.size(); ++i) {
      unsigned label = 0;
      for (int b = 0; b < 6; ++b) label = (label << 1) | mixed[6 * i + b];
      frame.symbols.s(data[i], k) = qam64_point(label);
      frame.symbols.labels(data[i], k) = static_cast<int>(label);
    }
    frame.info.push_back(std::move(info));
  }
  return frame;
}

double noise_variance(const SignalGrid& transmitted, double snr_db) {
  const double row_power = transmitted.power() / static_cast<double>(transmitted.n_tones());
  return row_power / std::pow(10.0, snr_db / 10.0);
}

ErrorCount receive_frame(const ChannelSet& channels, const ToneMap& tones,
                         const SignalGrid& transmitted, const LinkFrame& frame,
                         double n0, Rng& noise_rng, bool soft) {
  const auto& data = tones.data_tones();
  const Index users = channels.users();
  if (static_cast<Index>(frame.info.size()) != users)
    throw ShapeError("receive_frame: frame user count differs from channel");
  // rx(i, k): user k's received symbol on the i-th data tone.
  CMatrix rx(static_cast<Index>(data.size()), users);
  const double sigma = std::sqrt(n0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int tone = data[i];
    CVector r = channels.freq[tone] * transmitted.data().row(tone).transpose();
    if (n0 > 0.0)
      for (Index k = 0; k < users; ++k) r(k) += sigma * draw_cn(noise_rng);
    rx.row(static_cast<Index>(i)) = r.transpose();
  }

  ErrorCount count;
  for (Index k = 0; k < users; ++k) {
    std::span<const cplx> col(rx.col(k).data(), data.size());
    Bits decoded;
    if (soft) {
      const auto llr = qam64_llr(col, n0);
      decoded = viterbi_decode_soft(frame.interleaver.deinterleave<double>(llr));
    } else {
      const auto hard = qam64_demap(col);
      decoded = viterbi_decode(frame.interleaver.deinterleave<std::uint8_t>(hard));
    }
    const Bits& info = frame.info[k];
    count.bits += info.size();
    for (std::size_t i = 0; i < info.size(); ++i) count.errors += decoded[i] != info[i];
  }
  return count;
}

}  // namespace nullpapr::comm
