#include "nullpapr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

namespace nullpapr {

ToneMap ToneMap::from_guards(int n_tones, std::vector<int> guard_tones) {
  if (n_tones < 1) throw ConfigError("tone map: N must be positive");
  ToneMap map;
  map.n_tones_ = n_tones;
  map.is_data_.assign(n_tones, true);
  for (int g : guard_tones) {
    if (g < 0 || g >= n_tones)
      throw ConfigError("tone map: guard index " + std::to_string(g) +
                        " outside [0, " + std::to_string(n_tones) + ")");
    if (!map.is_data_[g])
      throw ConfigError("tone map: duplicate guard index " + std::to_string(g));
    map.is_data_[g] = false;
  }
  for (int n = 0; n < n_tones; ++n)
    (map.is_data_[n] ? map.data_ : map.guard_).push_back(n);
  return map;
}

ToneMap default_tone_map(int n_tones, std::optional<int> guard_count) {
  if (n_tones < 2) throw ConfigError("tone map: N must be at least 2");
  const int guards = guard_count.value_or((n_tones * 14 + 127) / 128);
  if (guards < 0 || guards >= n_tones)
    throw ConfigError("tone map: " + std::to_string(guards) +
                      " guard tones leave no data tones for N=" +
                      std::to_string(n_tones));
  const int top = (guards + 1) / 2;
  const int bottom = guards - top;
  std::vector<int> list;
  for (int n = 0; n < bottom; ++n) list.push_back(n);
  for (int n = n_tones - top; n < n_tones; ++n) list.push_back(n);
  return ToneMap::from_guards(n_tones, std::move(list));
}

ChannelSet channel_from_taps(std::vector<CMatrix> taps, int n_tones) {
  if (taps.empty()) throw ConfigError("channel: at least one tap required");
  if (n_tones < 1) throw ConfigError("channel: N must be positive");
  for (const auto& t : taps)
    if (t.rows() != taps.front().rows() || t.cols() != taps.front().cols())
      throw ShapeError("channel: taps have inconsistent shapes");
  ChannelSet ch;
  ch.taps = std::move(taps);
  ch.freq.assign(n_tones, CMatrix::Zero(ch.users(), ch.antennas()));
  for (int n = 0; n < n_tones; ++n) {
    for (int d = 1; d <= ch.n_taps(); ++d) {
      // Reduce d*n mod N before scaling so the phase stays exact for large n.
      const double phase = -2.0 * std::numbers::pi *
                           static_cast<double>((static_cast<long>(d) * n) % n_tones) /
                           n_tones;
      ch.freq[n] += ch.taps[d - 1] * std::polar(1.0, phase);
    }
  }
  return ch;
}

bool full_row_rank(const ChannelSet& channels) {
  for (const auto& h : channels.freq) {
    Eigen::LLT<CMatrix> llt(h * h.adjoint());
    if (llt.info() != Eigen::Success) return false;
  }
  return true;
}

ChannelSet draw_channel(int users, int antennas, int n_taps, int n_tones,
                        Rng& rng, int* redraws) {
  if (users < 1 || antennas < 1 || n_taps < 1 || n_tones < 1)
    throw ConfigError("channel: K, M, D and N must be positive");
  if (users > antennas)
    throw ConfigError("channel: K=" + std::to_string(users) + " exceeds M=" +
                      std::to_string(antennas) + "; zero forcing infeasible");
  int rejected = 0;
  for (;;) {
    std::vector<CMatrix> taps(n_taps, CMatrix(users, antennas));
    for (auto& t : taps)
      for (Index j = 0; j < t.cols(); ++j)
        for (Index i = 0; i < t.rows(); ++i) t(i, j) = draw_cn(rng);
    ChannelSet ch = channel_from_taps(std::move(taps), n_tones);
    if (full_row_rank(ch)) {
      if (redraws) *redraws = rejected;
      return ch;
    }
    ++rejected;
  }
}

void save_channel(const ChannelSet& channels, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["users"] = channels.users();
  doc["antennas"] = channels.antennas();
  doc["taps"] = channels.n_taps();
  doc["tones"] = channels.n_tones();
  auto& data = doc["data"] = nlohmann::json::array();
  for (const auto& t : channels.taps) {
    std::vector<double> flat;
    flat.reserve(2 * t.size());
    for (Index i = 0; i < t.rows(); ++i)
      for (Index j = 0; j < t.cols(); ++j) {
        flat.push_back(t(i, j).real());
        flat.push_back(t(i, j).imag());
      }
    data.push_back(std::move(flat));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump() << '\n';
}

ChannelSet load_channel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto doc = nlohmann::json::parse(in);
  const Index k = doc.at("users").get<Index>();
  const Index m = doc.at("antennas").get<Index>();
  const int d = doc.at("taps").get<int>();
  const int n = doc.at("tones").get<int>();
  const auto& data = doc.at("data");
  if (static_cast<int>(data.size()) != d)
    throw ShapeError("channel file: tap count mismatch");
  std::vector<CMatrix> taps;
  for (const auto& flat_json : data) {
    const auto flat = flat_json.get<std::vector<double>>();
    if (static_cast<Index>(flat.size()) != 2 * k * m)
      throw ShapeError("channel file: tap size mismatch");
    CMatrix t(k, m);
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < m; ++j) {
        const auto at = 2 * (i * m + j);
        t(i, j) = cplx(flat[at], flat[at + 1]);
      }
    taps.push_back(std::move(t));
  }
  return channel_from_taps(std::move(taps), n);
}

}  // namespace nullpapr
