#include "nullpapr/precoding.hpp"

#include <algorithm>
#include <string>

namespace nullpapr {
namespace {

Eigen::LLT<CMatrix> gram_factor(const CMatrix& h, int tone) {
  Eigen::LLT<CMatrix> llt(h * h.adjoint());
  if (llt.info() != Eigen::Success)
    throw NumericalRankError(tone, "tone " + std::to_string(tone) +
                                       ": channel is not full row rank");
  return llt;
}

void check_tone_count(const ChannelSet& channels, const ToneMap& tones) {
  if (channels.n_tones() != tones.n_tones())
    throw ShapeError("channel has " + std::to_string(channels.n_tones()) +
                     " tones, tone map has " + std::to_string(tones.n_tones()));
}

}  // namespace

ProjectorSet::ProjectorSet(const ChannelSet& channels, const ToneMap& tones,
                           ProjectorStorage storage)
    : storage_(storage), antennas_(channels.antennas()) {
  check_tone_count(channels, tones);
  const int n = tones.n_tones();
  present_.assign(n, false);
  if (storage_ == ProjectorStorage::dense)
    dense_.resize(n);
  else {
    h_.resize(n);
    b_.resize(n);
  }
  for (int tone : tones.data_tones()) {
    const CMatrix& h = channels.freq[tone];
    const auto llt = gram_factor(h, tone);
    // B = H^H (H H^H)^{-1}, obtained as (Gram^{-1} H)^H since Gram is Hermitian.
    CMatrix b = llt.solve(h).adjoint();
    if (storage_ == ProjectorStorage::dense) {
      dense_[tone] = CMatrix::Identity(antennas_, antennas_) - b * h;
    } else {
      h_[tone] = h;
      b_[tone] = std::move(b);
    }
    present_[tone] = true;
  }
}

void ProjectorSet::apply(int tone, const CVector& v, CVector& out) const {
  if (!has(tone))
    throw ConfigError("no projector for tone " + std::to_string(tone));
  if (storage_ == ProjectorStorage::dense) {
    out.noalias() = dense_[tone] * v;
  } else {
    thread_local CVector hv;
    hv.noalias() = h_[tone] * v;
    out = v;
    out.noalias() -= b_[tone] * hv;
  }
}

CMatrix ProjectorSet::matrix(int tone) const {
  if (!has(tone))
    throw ConfigError("no projector for tone " + std::to_string(tone));
  if (storage_ == ProjectorStorage::dense) return dense_[tone];
  return CMatrix::Identity(antennas_, antennas_) - b_[tone] * h_[tone];
}

SignalGrid zf_precode(const ChannelSet& channels, const ToneMap& tones,
                      const UserSymbols& symbols) {
  check_tone_count(channels, tones);
  if (symbols.n_tones() != tones.n_tones() || symbols.users() != channels.users())
    throw ShapeError("zf_precode: symbol grid does not match channel");
  SignalGrid x(tones.n_tones(), channels.antennas());
  for (int tone : tones.data_tones()) {
    const CMatrix& h = channels.freq[tone];
    const auto llt = gram_factor(h, tone);
    const CVector s = symbols.s.row(tone).transpose();
    x.data().row(tone) = (h.adjoint() * llt.solve(s)).transpose();
  }
  return x;
}

double mui_residual(const ChannelSet& channels, const ToneMap& tones,
                    const SignalGrid& grid, const UserSymbols& symbols) {
  check_tone_count(channels, tones);
  if (grid.n_tones() != tones.n_tones() || grid.n_antennas() != channels.antennas() ||
      symbols.n_tones() != tones.n_tones() || symbols.users() != channels.users())
    throw ShapeError("mui_residual: shapes do not agree");
  double worst = 0.0;
  for (int tone : tones.data_tones()) {
    const CVector rx = channels.freq[tone] * grid.data().row(tone).transpose();
    worst = std::max(worst, (rx - symbols.s.row(tone).transpose()).norm());
  }
  return worst;
}

}  // namespace nullpapr
