#include "sccs/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

#include "sccs/error.hpp"

namespace sccs::metrics {

namespace {

RougeScore make_score(double overlap, std::size_t cand, std::size_t ref) {
  RougeScore s;
  s.precision = cand == 0 ? 0.0 : overlap / static_cast<double>(cand);
  s.recall = ref == 0 ? 0.0 : overlap / static_cast<double>(ref);
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

void validate_ranking(const RankedCandidates& r) {
  if (r.scores.empty()) throw Error(ErrorCode::ZeroSize, "no candidates");
  if (r.positives.empty()) throw Error(ErrorCode::NoPositives, "ranking has no positive ids");
  for (std::size_t p : r.positives) {
    if (p >= r.scores.size()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "positive id " + std::to_string(p) + " with " + std::to_string(r.scores.size()) + " candidates");
    }
  }
  for (double s : r.scores) {
    if (std::isnan(s)) throw Error(ErrorCode::NonFiniteValue, "NaN score");
  }
}

std::vector<char> positive_mask(const RankedCandidates& r) {
  std::vector<char> mask(r.scores.size(), 0);
  for (std::size_t p : r.positives) mask[p] = 1;
  return mask;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidConfig, "rouge n must be 1 or 2, got " + std::to_string(n));
  const auto cand = ngram_counts(tokenize(candidate), static_cast<std::size_t>(n));
  const auto ref = ngram_counts(tokenize(reference), static_cast<std::size_t>(n));
  std::size_t overlap = 0, cand_total = 0, ref_total = 0;
  for (const auto& [gram, count] : cand) {
    cand_total += count;
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  for (const auto& [gram, count] : ref) ref_total += count;
  return make_score(static_cast<double>(overlap), cand_total, ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  return make_score(static_cast<double>(lcs_length(cand, ref)), cand.size(), ref.size());
}

std::vector<std::size_t> ranking_order(const RankedCandidates& r) {
  std::vector<std::size_t> order(r.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  return order;
}

double average_precision(const RankedCandidates& r) {
  validate_ranking(r);
  const auto mask = positive_mask(r);
  const auto total = static_cast<double>(std::count(mask.begin(), mask.end(), 1));
  const auto order = ranking_order(r);
  double hits = 0.0, sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!mask[order[rank]]) continue;
    hits += 1.0;
    sum += hits / static_cast<double>(rank + 1);
  }
  return sum / total;
}

double mean_average_precision(std::span<const RankedCandidates> queries) {
  if (queries.empty()) throw Error(ErrorCode::ZeroSize, "no rankings");
  double sum = 0.0;
  for (const auto& q : queries) sum += average_precision(q);
  return sum / static_cast<double>(queries.size());
}

double recall_at_k(const RankedCandidates& r, std::size_t n, std::size_t k) {
  validate_ranking(r);
  if (n != r.scores.size() || k == 0 || k > n) {
    throw Error(ErrorCode::BadK, "k = " + std::to_string(k) + ", n = " + std::to_string(n) + " with " +
                                     std::to_string(r.scores.size()) + " candidates");
  }
  const auto mask = positive_mask(r);
  const auto total = static_cast<double>(std::count(mask.begin(), mask.end(), 1));
  const auto order = ranking_order(r);
  double hits = 0.0;
  for (std::size_t rank = 0; rank < k; ++rank) hits += mask[order[rank]];
  return hits / total;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroNorm, "zero-norm vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace sccs::metrics
