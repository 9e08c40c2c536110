#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nullpapr {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Grid or vector dimensions do not conform.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parameters or configuration outside their admissible range.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside a function's mathematical domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A per-tone Gram matrix H_n H_n^H could not be factored.
struct NumericalRankError : std::runtime_error {
  NumericalRankError(Index tone, const std::string& what)
      : std::runtime_error(what), tone(tone) {}
  Index tone;
};

/// Bit or symbol stream with a length the codec cannot accept.
struct FrameError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

// SplitMix64 finalizer; decorrelates (seed, stream) pairs before seeding.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent generator for stream `stream` under `seed`. Streams are a pure
/// function of their coordinates, so any trial can be replayed in isolation.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t substream = 0) {
  return Rng(mix64(mix64(mix64(seed) ^ stream) ^ (substream * 0xd1b54a32d192ed03ULL)));
}

/// One draw of CN(0, 1): independent real and imaginary parts of variance 1/2.
inline cplx draw_cn(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

}  // namespace nullpapr
