#pragma once

#include <span>

#include "nullpapr/transforms.hpp"

namespace nullpapr {

struct ProxResult {
  CVector y;
  double clip_level = 0.0;
};

/// Clipping level A of the l-infinity proximal operator: 0 when
/// sum|q_k| <= lambda/2, otherwise the root of sum max(|q_k| - A, 0) = lambda/2.
/// Exact: sorts the moduli and solves the piecewise-linear equation on the
/// bracketing segment.
double proxinf_level(std::span<const cplx> q, double lambda);

/// argmin_y lambda ||y||_inf + ||y - q||_2^2, i.e. q clipped in modulus at
/// proxinf_level(q, lambda) with phases preserved.
ProxResult proxinf(std::span<const cplx> q, double lambda);

/// In-place variant; returns the clipping level.
double proxinf_inplace(std::span<cplx> q, double lambda);

/// Column-wise proxinf. Column m uses lambda * weights[m] when weights are
/// supplied (weight 0 leaves the column untouched).
TimeGrid proxinf_grid(const TimeGrid& q, double lambda,
                      std::span<const double> weights = {});

}  // namespace nullpapr
