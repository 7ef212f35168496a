#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sccs::metrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Candidate ids are positions in `scores`.
struct RankedCandidates {
  std::vector<double> scores;
  std::vector<std::size_t> positives;
};

/// Lowercased runs of ASCII letters and digits; everything else separates.
std::vector<std::string> tokenize(std::string_view text);

/// Clipped n-gram overlap, n in {1, 2}.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);

RougeScore rouge_l(std::string_view candidate, std::string_view reference);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Ids ordered by descending score, ties by ascending id.
std::vector<std::size_t> ranking_order(const RankedCandidates& r);

double average_precision(const RankedCandidates& r);

/// Mean of average_precision over several queries.
double mean_average_precision(std::span<const RankedCandidates> queries);

/// Fraction of positives ranked in the top k of n candidates (n must equal
/// the candidate count).
double recall_at_k(const RankedCandidates& r, std::size_t n, std::size_t k);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace sccs::metrics
