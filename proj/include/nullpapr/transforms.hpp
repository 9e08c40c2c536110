#pragma once

#include <span>
#include <vector>

#include "nullpapr/types.hpp"

namespace nullpapr {

/// Frequency-domain signal: one row per tone, one column per transmit antenna.
class SignalGrid {
 public:
  SignalGrid() = default;
  SignalGrid(Index n_tones, Index n_antennas);
  explicit SignalGrid(CMatrix data);

  Index n_tones() const { return data_.rows(); }
  Index n_antennas() const { return data_.cols(); }

  const CMatrix& data() const { return data_; }
  CMatrix& data() { return data_; }

  double power() const { return data_.squaredNorm(); }

 private:
  CMatrix data_;
};

/// Oversampled time-domain signal: L*N rows, one column per antenna.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(Index n_tones, Index n_antennas, int oversample);
  TimeGrid(CMatrix data, int oversample);

  int oversample() const { return oversample_; }
  Index n_samples() const { return data_.rows(); }
  Index n_tones() const { return data_.rows() / oversample_; }
  Index n_antennas() const { return data_.cols(); }

  const CMatrix& data() const { return data_; }
  CMatrix& data() { return data_; }

  std::span<const cplx> column(Index m) const {
    return {data_.col(m).data(), static_cast<std::size_t>(data_.rows())};
  }
  std::span<cplx> column(Index m) {
    return {data_.col(m).data(), static_cast<std::size_t>(data_.rows())};
  }

 private:
  CMatrix data_;
  int oversample_ = 1;
};

/// y_mk = N^{-1/2} sum_n x_mn exp(j 2 pi n k / (L N)), column by column.
/// Computed with a zero-padded length-LN inverse FFT.
TimeGrid synthesize(const SignalGrid& x, int oversample);

/// Left inverse of synthesize: (1/L) times the adjoint of the synthesis
/// operator, keeping the first N bins of a length-LN forward FFT.
SignalGrid analyze(const TimeGrid& y);

/// Discrete peak-to-average power ratio, len * max|y|^2 / ||y||^2.
/// Throws DomainError on an all-zero vector.
double papr(std::span<const cplx> y);
double papr_db(std::span<const cplx> y);

/// PAPR in dB of every antenna column.
std::vector<double> papr_db_per_antenna(const TimeGrid& y);

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace nullpapr
