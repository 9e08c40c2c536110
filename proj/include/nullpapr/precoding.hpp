#pragma once

#include <vector>

#include "nullpapr/channel.hpp"
#include "nullpapr/transforms.hpp"

namespace nullpapr {

/// Per-tone user symbols: row n holds s_n^T (K entries). Guard rows are zero.
struct UserSymbols {
  CMatrix s;                 // N x K
  Eigen::MatrixXi labels;    // N x K constellation indices, -1 on guard tones

  Index n_tones() const { return s.rows(); }
  Index users() const { return s.cols(); }
};

enum class ProjectorStorage {
  dense,     // explicit M x M matrix per data tone
  factored,  // G v = v - B (H v) with B = H^H (H H^H)^{-1}, 2KM per apply
};

/// Orthogonal projectors G_n = I - H_n^H (H_n H_n^H)^{-1} H_n onto the null
/// space of each data tone's channel.
class ProjectorSet {
 public:
  ProjectorSet() = default;
  ProjectorSet(const ChannelSet& channels, const ToneMap& tones,
               ProjectorStorage storage = ProjectorStorage::factored);

  Index antennas() const { return antennas_; }
  int n_tones() const { return static_cast<int>(present_.size()); }
  bool has(int tone) const { return tone >= 0 && tone < n_tones() && present_[tone]; }
  ProjectorStorage storage() const { return storage_; }

  /// out = G_n v for a length-M column vector. Equivalent to the row form
  /// d = v G_n^T on rows of a SignalGrid.
  void apply(int tone, const CVector& v, CVector& out) const;

  /// Explicit projector matrix (materialized for factored storage).
  CMatrix matrix(int tone) const;

 private:
  ProjectorStorage storage_ = ProjectorStorage::factored;
  Index antennas_ = 0;
  std::vector<bool> present_;
  std::vector<CMatrix> dense_;   // indexed by tone
  std::vector<CMatrix> h_;       // K x M
  std::vector<CMatrix> b_;       // M x K
};

/// ZF precoding: w_n = H_n^H (H_n H_n^H)^{-1} s_n on data tones, zero on
/// guard tones. Row n of the result is w_n^T.
SignalGrid zf_precode(const ChannelSet& channels, const ToneMap& tones,
                      const UserSymbols& symbols);

/// Largest deviation ||H_n x_n - s_n||_2 over data tones of the noiseless
/// received signal.
double mui_residual(const ChannelSet& channels, const ToneMap& tones,
                    const SignalGrid& grid, const UserSymbols& symbols);

}  // namespace nullpapr
