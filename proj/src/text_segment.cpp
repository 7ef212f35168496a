#include "sccs/text_segment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "vector_ops.hpp"

namespace sccs::text {

namespace {

constexpr std::size_t kGapWindow = 2;
// Depth spreads at or below this are rounding noise on a uniform document.
constexpr double kZeroSpread = 1e-12;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

SentenceSet::SentenceSet(std::vector<std::string> t, EmbeddingMatrix e)
    : texts(std::move(t)), embeddings(std::move(e)) {
  if (texts.size() != embeddings.rows()) {
    throw Error(ErrorCode::RowCountMismatch, std::to_string(texts.size()) + " sentences vs " +
                                                 std::to_string(embeddings.rows()) + " embedding rows");
  }
}

std::vector<std::string> split_sentences(std::string_view document) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < document.size(); ++i) {
    const char c = document[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (c == '.' && i > 0 && i + 1 < document.size() && is_digit(document[i - 1]) &&
        is_digit(document[i + 1])) {
      continue;
    }
    if (i + 1 < document.size() && !is_space(document[i + 1])) continue;
    auto piece = trim(document.substr(start, i + 1 - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    start = i + 1;
  }
  auto tail = trim(document.substr(std::min(start, document.size())));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

std::vector<double> gap_similarities(const SentenceSet& s) {
  const std::size_t n = s.size();
  if (n < 2) throw Error(ErrorCode::TooFewSentences, "need at least 2 sentences, got " + std::to_string(n));
  std::vector<double> sims(n - 1);
  for (std::size_t gap = 0; gap + 1 < n; ++gap) {
    const std::size_t left_begin = gap + 1 >= kGapWindow ? gap + 1 - kGapWindow : 0;
    const std::size_t right_end = std::min(n, gap + 1 + kGapWindow);
    const auto left = detail::mean_rows(s.embeddings, left_begin, gap + 1);
    const auto right = detail::mean_rows(s.embeddings, gap + 1, right_end);
    sims[gap] = detail::cosine(std::span<const double>(left), std::span<const double>(right));
  }
  return sims;
}

std::vector<double> depth_scores(const SentenceSet& s) {
  const auto sims = gap_similarities(s);
  const std::size_t gaps = sims.size();
  std::vector<double> depths(gaps);
  for (std::size_t i = 0; i < gaps; ++i) {
    // Climb outward while similarity keeps rising; stop at the first dip.
    double left = sims[i];
    for (std::size_t j = i; j-- > 0 && sims[j] >= left;) left = sims[j];
    double right = sims[i];
    for (std::size_t j = i + 1; j < gaps && sims[j] >= right; ++j) right = sims[j];
    depths[i] = std::max(0.0, left - sims[i]) + std::max(0.0, right - sims[i]);
  }
  return depths;
}

SegmentPartition segment_text(const SentenceSet& s, double threshold_multiplier) {
  const std::size_t n = s.size();
  if (n == 0) throw Error(ErrorCode::TooFewSentences, "empty sentence set");
  if (n == 1) return SegmentPartition::from_cuts(1, {});

  const auto depths = depth_scores(s);
  double mean = 0.0;
  for (double d : depths) mean += d;
  mean /= static_cast<double>(depths.size());
  double var = 0.0;
  for (double d : depths) var += (d - mean) * (d - mean);
  const double stddev = std::sqrt(var / static_cast<double>(depths.size()));

  std::vector<std::size_t> cuts;
  if (stddev > kZeroSpread) {
    const double threshold = mean + threshold_multiplier * stddev;
    for (std::size_t i = 0; i < depths.size(); ++i) {
      if (depths[i] > threshold) cuts.push_back(i + 1);
    }
  }
  return SegmentPartition::from_cuts(n, cuts);
}

}  // namespace sccs::text
