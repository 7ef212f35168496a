#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sccs/core_model.hpp"

namespace sccs::text {

/// Sentences with one embedding row each.
struct SentenceSet {
  std::vector<std::string> texts;
  EmbeddingMatrix embeddings;

  SentenceSet(std::vector<std::string> texts, EmbeddingMatrix embeddings);

  std::size_t size() const { return texts.size(); }
};

/// Splits on '.', '!' or '?' followed by whitespace or end of input. A '.'
/// between two digits never ends a sentence. Pieces are trimmed and empty
/// pieces dropped.
std::vector<std::string> split_sentences(std::string_view document);

/// Cosine similarity across each gap i (between sentences i and i + 1) of
/// the mean embeddings of up to two sentences on either side.
std::vector<double> gap_similarities(const SentenceSet& s);

/// Depth of each gap: how far its similarity dips below the nearest peak on
/// each side, found by moving outward while similarity keeps rising.
/// Length n - 1; needs n >= 2.
std::vector<double> depth_scores(const SentenceSet& s);

/// Cuts at gaps whose depth exceeds mean + multiplier * stddev (population)
/// of all depths. A single sentence, or depths with zero spread, give one
/// segment.
SegmentPartition segment_text(const SentenceSet& s, double threshold_multiplier);

}  // namespace sccs::text
