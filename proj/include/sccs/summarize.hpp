#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sccs/core_model.hpp"
#include "sccs/text_segment.hpp"

namespace sccs::summarize {

/// Parameters of the bilinear relevance score beta_i = e_i^T W_a s_prev.
struct AttentionParams {
  Matrix w_a;                         // d x d
  std::vector<double> initial_state;  // length d; empty means "mean frame"
};

/// Softmax attention over the rows of `encodings`:
///   beta_i  = e_i^T W_a s_prev
///   alpha_i = exp(beta_i) / sum_j exp(beta_j)
std::vector<double> attention_weights(const EmbeddingMatrix& encodings, std::span<const double> s_prev,
                                      const Matrix& w_a);

/// Convex combination sum_i alpha_i e_i. alpha must sum to 1 within 1e-9.
std::vector<double> attention_context(const EmbeddingMatrix& encodings, std::span<const double> alpha);

/// Top-k frames by attention weight, descending, ties to the lower index.
std::vector<std::size_t> select_keyframes_attention(const EmbeddingMatrix& segment_frames,
                                                    const AttentionParams& params, std::size_t top_k);

/// Pixel counts per equal-width intensity bin; `bins` must divide 256.
std::vector<std::size_t> grayscale_histogram(const FrameBuffer& frame, std::size_t bins);

/// Population variance of the 4-neighbour Laplacian over interior pixels.
double laplacian_variance(const FrameBuffer& frame);

struct KMeansResult {
  Matrix centroids;                      // k x dims
  std::vector<std::size_t> assignments;  // point -> cluster
  double objective = 0.0;                // sum of squared distances to the assigned centroid
  std::size_t iterations = 0;
  std::vector<double> objective_history;  // objective after each assignment step
};

/// Lloyd's algorithm from k-means++ seeding. The seeding is a deterministic
/// function of `seed`. Stops at an assignment fixpoint or after max_iters
/// assignment steps; the final assignment is always nearest-centroid
/// (ties to the lower cluster index).
KMeansResult kmeans(const EmbeddingMatrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iters);

inline constexpr std::size_t kHistogramBins = 16;
inline constexpr std::size_t kDefaultKMeansIters = 100;

/// Clusters frames on normalized 16-bin histograms and keeps, per cluster,
/// the sharpest frame (largest Laplacian variance, ties to the lower index).
/// Returned indices are ascending.
std::vector<std::size_t> select_keyframes_unsupervised(const std::vector<FrameBuffer>& frames, std::size_t k,
                                                       std::uint64_t seed);

/// Per text segment: k-means with k = min(per_k, segment size) on the
/// segment's sentence embeddings, then for each cluster the sentence nearest
/// its centroid (ties to the lower index). Indices are global and ascending
/// within each segment.
std::vector<std::vector<std::size_t>> select_sentences_centroid(const text::SentenceSet& s,
                                                                const SegmentPartition& per_segment,
                                                                std::size_t per_k, std::uint64_t seed = 0);

}  // namespace sccs::summarize
