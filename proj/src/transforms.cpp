#include "nullpapr/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace nullpapr {
namespace {

bool all_finite(const CMatrix& m) {
  return m.array().real().isFinite().all() && m.array().imag().isFinite().all();
}

// FFTW planning is not thread-safe; execution through the new-array interface
// is. Plans are created once per (length, direction) and shared.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

void execute(fftw_plan plan, cplx* in, cplx* out) {
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

SignalGrid::SignalGrid(Index n_tones, Index n_antennas)
    : data_(CMatrix::Zero(n_tones, n_antennas)) {
  if (n_tones <= 0 || n_antennas <= 0)
    throw ShapeError("SignalGrid: dimensions must be positive");
}

SignalGrid::SignalGrid(CMatrix data) : data_(std::move(data)) {
  if (data_.rows() <= 0 || data_.cols() <= 0)
    throw ShapeError("SignalGrid: dimensions must be positive");
  if (!all_finite(data_)) throw DomainError("SignalGrid: non-finite entry");
}

TimeGrid::TimeGrid(Index n_tones, Index n_antennas, int oversample)
    : data_(CMatrix::Zero(n_tones * oversample, n_antennas)),
      oversample_(oversample) {
  if (oversample < 1) throw ShapeError("TimeGrid: oversample must be >= 1");
  if (n_tones <= 0 || n_antennas <= 0)
    throw ShapeError("TimeGrid: dimensions must be positive");
}

TimeGrid::TimeGrid(CMatrix data, int oversample)
    : data_(std::move(data)), oversample_(oversample) {
  if (oversample < 1) throw ShapeError("TimeGrid: oversample must be >= 1");
  if (data_.rows() <= 0 || data_.cols() <= 0 || data_.rows() % oversample != 0)
    throw ShapeError("TimeGrid: row count " + std::to_string(data_.rows()) +
                     " is not a positive multiple of L=" +
                     std::to_string(oversample));
  if (!all_finite(data_)) throw DomainError("TimeGrid: non-finite entry");
}

TimeGrid synthesize(const SignalGrid& x, int oversample) {
  if (oversample < 1) throw ShapeError("synthesize: oversample must be >= 1");
  const Index n = x.n_tones();
  const Index len = n * oversample;
  TimeGrid y(n, x.n_antennas(), oversample);
  fftw_plan plan = PlanCache::instance().get(static_cast<int>(len), FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> buf(len);
  for (Index m = 0; m < x.n_antennas(); ++m) {
    std::fill(buf.begin(), buf.end(), cplx{});
    for (Index k = 0; k < n; ++k) buf[k] = x.data()(k, m);
    execute(plan, buf.data(), y.data().col(m).data());
    y.data().col(m) *= scale;
  }
  return y;
}

SignalGrid analyze(const TimeGrid& y) {
  const Index n = y.n_tones();
  const Index len = y.n_samples();
  if (len != n * y.oversample() || n <= 0)
    throw ShapeError("analyze: row count not divisible by oversample");
  SignalGrid x(n, y.n_antennas());
  fftw_plan plan = PlanCache::instance().get(static_cast<int>(len), FFTW_FORWARD);
  const double scale =
      1.0 / (y.oversample() * std::sqrt(static_cast<double>(n)));
  std::vector<cplx> in(len), out(len);
  for (Index m = 0; m < y.n_antennas(); ++m) {
    std::copy_n(y.data().col(m).data(), len, in.begin());
    execute(plan, in.data(), out.data());
    for (Index k = 0; k < n; ++k) x.data()(k, m) = out[k] * scale;
  }
  return x;
}

double papr(std::span<const cplx> y) {
  double peak = 0.0;
  double energy = 0.0;
  for (const cplx& v : y) {
    const double p = std::norm(v);
    peak = std::max(peak, p);
    energy += p;
  }
  if (energy <= 0.0) throw DomainError("papr: undefined for an all-zero signal");
  return static_cast<double>(y.size()) * peak / energy;
}

double papr_db(std::span<const cplx> y) { return to_db(papr(y)); }

std::vector<double> papr_db_per_antenna(const TimeGrid& y) {
  std::vector<double> out(y.n_antennas());
  for (Index m = 0; m < y.n_antennas(); ++m) out[m] = papr_db(y.column(m));
  return out;
}

}  // namespace nullpapr
