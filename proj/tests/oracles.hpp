#pragma once
// Slow, independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nullpapr/channel.hpp"
#include "nullpapr/transforms.hpp"

namespace oracle {

using nullpapr::cplx;
using nullpapr::CMatrix;
using nullpapr::CVector;
using nullpapr::Index;

inline constexpr double kPi = std::numbers::pi;

// LN x N matrix with entries N^{-1/2} exp(j 2 pi n k / (LN)).
inline CMatrix synthesis_matrix(Index n, int l) {
  const Index ln = n * l;
  CMatrix f(ln, n);
  for (Index k = 0; k < ln; ++k)
    for (Index t = 0; t < n; ++t)
      f(k, t) = std::polar(1.0 / std::sqrt(double(n)),
                           2.0 * kPi * double((t * k) % ln) / double(ln));
  return f;
}

inline CMatrix direct_synthesize(const CMatrix& x, int l) {
  return synthesis_matrix(x.rows(), l) * x;
}

inline double direct_papr(const CVector& y) {
  return double(y.size()) * y.cwiseAbs2().maxCoeff() / y.squaredNorm();
}

// Root of sum max(|q_k| - A, 0) = lambda/2 by bisection; 0 when the l1 mass
// is below lambda/2.
inline double bisection_level(const std::vector<cplx>& q, double lambda) {
  double lo = 0.0, hi = 0.0, l1 = 0.0;
  for (auto v : q) {
    hi = std::max(hi, std::abs(v));
    l1 += std::abs(v);
  }
  if (lambda == 0.0) return hi;
  if (l1 <= lambda / 2) return 0.0;
  auto g = [&](double a) {
    double s = 0.0;
    for (auto v : q) s += std::max(std::abs(v) - a, 0.0);
    return s - lambda / 2;
  };
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<cplx> clamp(const std::vector<cplx>& q, double a) {
  std::vector<cplx> y(q);
  for (auto& v : y)
    if (std::abs(v) > a) v = std::polar(a, std::arg(v));
  return y;
}

inline double prox_objective(const std::vector<cplx>& y, const std::vector<cplx>& q,
                             double lambda) {
  double peak = 0.0, dist = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    peak = std::max(peak, std::abs(y[k]));
    dist += std::norm(y[k] - q[k]);
  }
  return lambda * peak + dist;
}

// Null-space projector from a full SVD, independent of the Cholesky path.
inline CMatrix svd_projector(const CMatrix& h) {
  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
  const Index m = h.cols(), r = svd.rank();
  const CMatrix vn = svd.matrixV().rightCols(m - r);
  return vn * vn.adjoint();
}

// Long-run projected gradient on min ||V - F D||_F^2 over D with data rows
// in ker(H_n) and zero guard rows. F is the dense synthesis matrix.
inline CMatrix projected_gradient(const CMatrix& v, const nullpapr::ChannelSet& ch,
                                  const nullpapr::ToneMap& tones, int l, int iters) {
  const Index n = tones.n_tones(), m = v.cols();
  const CMatrix f = synthesis_matrix(n, l);
  std::vector<CMatrix> p(n);
  for (int t : tones.data_tones()) p[t] = svd_projector(ch.freq[t]);
  // Lipschitz constant of the gradient is 2L; step well inside 1/(2L).
  const double step = 0.25 / l;
  CMatrix d = CMatrix::Zero(n, m);
  for (int it = 0; it < iters; ++it) {
    const CMatrix grad = 2.0 * f.adjoint() * (f * d - v);
    d -= step * grad;
    for (Index t = 0; t < n; ++t) {
      if (tones.is_data(int(t)))
        d.row(t) = (p[t] * d.row(t).transpose()).transpose();
      else
        d.row(t).setZero();
    }
  }
  return d;
}

inline CMatrix random_grid(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) x(i, j) = {nd(rng), nd(rng)};
  return x;
}

}  // namespace oracle
