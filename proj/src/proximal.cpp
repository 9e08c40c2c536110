#include "nullpapr/proximal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace nullpapr {
namespace {

// Clipping level from precomputed moduli. Only moduli above the lower bound
// (sum - lambda/2) / n can be clipped, so just those are sorted.
double level_from_moduli(const std::vector<double>& mod, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("proxinf: lambda must be non-negative");
  const double half = 0.5 * lambda;
  double total = 0.0;
  for (double m : mod) total += m;
  if (total <= half) return 0.0;

  // (S - lambda/2) / n over any superset of the clipped entries is a lower
  // bound on A, so entries at or below it are never clipped. Tightening the
  // bound on the surviving set leaves only the few largest moduli to sort.
  std::vector<double> cand(mod);
  double floor_level = (total - half) / static_cast<double>(cand.size());
  for (;;) {
    std::size_t kept = 0;
    double kept_sum = 0.0;
    for (double m : cand)
      if (m > floor_level) {
        cand[kept++] = m;
        kept_sum += m;
      }
    if (kept == cand.size() || kept == 0) {
      cand.resize(kept);
      break;
    }
    cand.resize(kept);
    floor_level = (kept_sum - half) / static_cast<double>(kept);
  }
  if (cand.empty()) return floor_level;  // all moduli equal
  std::sort(cand.begin(), cand.end(), std::greater<>());

  // With the k largest moduli clipped, A_k = (S_k - lambda/2) / k. The first
  // k with A_k >= m_{k+1} brackets the root; A_k <= m_k holds automatically
  // because the previous k failed.
  double prefix = 0.0;
  const std::size_t n = cand.size();
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += cand[k - 1];
    const double level = (prefix - half) / static_cast<double>(k);
    const double next = k < n ? cand[k] : 0.0;
    if (level >= next) return level;
  }
  return floor_level;  // unreachable: k = n always brackets
}

std::vector<double> moduli(std::span<const cplx> q) {
  std::vector<double> mod(q.size());
  std::transform(q.begin(), q.end(), mod.begin(),
                 [](const cplx& v) { return std::sqrt(std::norm(v)); });
  return mod;
}

}  // namespace

double proxinf_level(std::span<const cplx> q, double lambda) {
  return level_from_moduli(moduli(q), lambda);
}

double proxinf_inplace(std::span<cplx> q, double lambda) {
  const auto mod = moduli(q);
  const double level = level_from_moduli(mod, lambda);
  for (std::size_t k = 0; k < q.size(); ++k)
    if (mod[k] > level) q[k] = (level > 0.0) ? q[k] * (level / mod[k]) : cplx{};
  return level;
}

ProxResult proxinf(std::span<const cplx> q, double lambda) {
  ProxResult out;
  out.y = Eigen::Map<const CVector>(q.data(), static_cast<Index>(q.size()));
  out.clip_level = proxinf_inplace({out.y.data(), q.size()}, lambda);
  return out;
}

TimeGrid proxinf_grid(const TimeGrid& q, double lambda,
                      std::span<const double> weights) {
  if (!weights.empty() && static_cast<Index>(weights.size()) != q.n_antennas())
    throw ShapeError("proxinf_grid: one weight per antenna required");
  TimeGrid y = q;
  for (Index m = 0; m < y.n_antennas(); ++m) {
    const double w = weights.empty() ? 1.0 : weights[m];
    if (w < 0.0) throw DomainError("proxinf_grid: negative antenna weight");
    proxinf_inplace(y.column(m), lambda * w);
  }
  return y;
}

}  // namespace nullpapr
