#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oracle {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> reference_features(std::string_view text) {
  std::string norm;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') {
      norm += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      norm += c;
    } else {
      norm += ' ';
    }
  }
  std::vector<std::string> words;
  std::istringstream in(norm);
  for (std::string w; in >> w;) words.push_back(w);
  std::vector<std::string> out = words;
  for (const auto& w : words) {
    const std::string padded = "#" + w + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) out.push_back(padded.substr(i, 3));
  }
  return out;
}

std::vector<double> reference_embedding(std::string_view text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& f : reference_features(text)) {
    const auto h = fnv1a(f);
    v[h % dim] += (h >> 63) == 0 ? 1.0 : -1.0;
  }
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n == 0.0) return {};
  for (double& x : v) x /= n;
  return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double route_score(const std::vector<double>& query, const std::vector<std::vector<double>>& utterances,
                   std::size_t k) {
  std::vector<double> sims;
  for (const auto& u : utterances) sims.push_back(cosine(query, u));
  std::sort(sims.rbegin(), sims.rend());
  const std::size_t n = std::min(k, sims.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += sims[i];
  return std::clamp(sum / static_cast<double>(n), 0.0, 1.0);
}

int select(const std::vector<double>& scores, const std::vector<double>& thresholds) {
  int best = -1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] < thresholds[i]) continue;
    if (best < 0 || scores[i] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

std::size_t best_two_route_hits(const std::vector<std::vector<double>>& scores, const std::vector<int>& truth,
                                const std::vector<double>& cand0, const std::vector<double>& cand1) {
  std::size_t best = 0;
  for (double t0 : cand0) {
    for (double t1 : cand1) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < scores.size(); ++r) {
        if (select(scores[r], {t0, t1}) == truth[r]) ++hits;
      }
      best = std::max(best, hits);
    }
  }
  return best;
}

std::vector<double> threshold_candidates(std::vector<double> observed, double step, double extra) {
  std::vector<double> c;
  for (int i = 0; static_cast<double>(i) * step <= 1.0 + 1e-9; ++i) c.push_back(std::min(1.0, i * step));
  c.push_back(1.0);
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  for (std::size_t i = 1; i < observed.size(); ++i) c.push_back((observed[i - 1] + observed[i]) / 2.0);
  c.push_back(extra);
  return c;
}

}  // namespace oracle
