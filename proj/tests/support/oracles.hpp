#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Independent re-implementations used as test oracles. They share no code
// with the library.
namespace oracle {

std::uint64_t fnv1a(std::string_view s);

// Feature list of the reference encoder: words, then '#'-padded trigrams per word.
std::vector<std::string> reference_features(std::string_view text);

// Unit-norm reference embedding, computed in double.
std::vector<double> reference_embedding(std::string_view text, std::size_t dim);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Mean of the k largest cosines between query and utterances, clamped to [0, 1].
double route_score(const std::vector<double>& query, const std::vector<std::vector<double>>& utterances,
                   std::size_t k);

// -1 for NONE; highest qualifying score, first route on ties.
int select(const std::vector<double>& scores, const std::vector<double>& thresholds);

// Best number of correct rows over every threshold pair in cand0 x cand1.
std::size_t best_two_route_hits(const std::vector<std::vector<double>>& scores, const std::vector<int>& truth,
                                const std::vector<double>& cand0, const std::vector<double>& cand1);

// Grid {0, step, ..., 1} plus midpoints of consecutive distinct values plus extra.
std::vector<double> threshold_candidates(std::vector<double> observed, double step, double extra);

}  // namespace oracle
