#include "sccs/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vector_ops.hpp"

namespace sccs::summarize {

std::vector<double> attention_weights(const EmbeddingMatrix& encodings, std::span<const double> s_prev,
                                      const Matrix& w_a) {
  const std::size_t d = encodings.dims();
  if (w_a.rows() != d || w_a.cols() != d || s_prev.size() != d) {
    throw Error(ErrorCode::DimMismatch, "encodings have dims " + std::to_string(d) + ", W_a is " +
                                            std::to_string(w_a.rows()) + "x" + std::to_string(w_a.cols()) +
                                            ", state has " + std::to_string(s_prev.size()));
  }
  std::vector<double> projected(d, 0.0);  // W_a s_prev
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) projected[r] += w_a(r, c) * s_prev[c];

  std::vector<double> beta(encodings.rows());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const auto e = encodings.row(i);
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += static_cast<double>(e[c]) * projected[c];
    beta[i] = s;
  }
  const double mx = *std::max_element(beta.begin(), beta.end());
  double total = 0.0;
  for (double& b : beta) total += (b = std::exp(b - mx));
  for (double& b : beta) b /= total;
  return beta;
}

std::vector<double> attention_context(const EmbeddingMatrix& encodings, std::span<const double> alpha) {
  if (alpha.size() != encodings.rows()) {
    throw Error(ErrorCode::DimMismatch, std::to_string(alpha.size()) + " weights for " +
                                            std::to_string(encodings.rows()) + " rows");
  }
  const double sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::WeightSumViolation, "weights sum to " + std::to_string(sum));
  }
  std::vector<double> out(encodings.dims(), 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const auto e = encodings.row(i);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += alpha[i] * static_cast<double>(e[c]);
  }
  return out;
}

std::vector<std::size_t> select_keyframes_attention(const EmbeddingMatrix& segment_frames,
                                                    const AttentionParams& params, std::size_t top_k) {
  if (top_k > segment_frames.rows()) {
    throw Error(ErrorCode::TopKTooLarge, "top_k " + std::to_string(top_k) + " > " +
                                             std::to_string(segment_frames.rows()) + " frames");
  }
  const std::vector<double> state = params.initial_state.empty()
                                        ? detail::mean_rows(segment_frames, 0, segment_frames.rows())
                                        : params.initial_state;
  const auto alpha = attention_weights(segment_frames, state, params.w_a);
  std::vector<std::size_t> order(alpha.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return alpha[a] > alpha[b]; });
  order.resize(top_k);
  return order;
}

std::vector<std::size_t> grayscale_histogram(const FrameBuffer& frame, std::size_t bins) {
  if (bins == 0 || bins > 256 || 256 % bins != 0) {
    throw Error(ErrorCode::BadBinCount, std::to_string(bins) + " does not divide 256");
  }
  const std::size_t width = 256 / bins;
  std::vector<std::size_t> counts(bins, 0);
  for (std::uint8_t p : frame.pixels) ++counts[p / width];
  return counts;
}

double laplacian_variance(const FrameBuffer& frame) {
  if (frame.width < 3 || frame.height < 3) {
    throw Error(ErrorCode::FrameTooSmall, std::to_string(frame.width) + "x" + std::to_string(frame.height));
  }
  std::vector<double> responses;
  responses.reserve((frame.width - 2) * (frame.height - 2));
  for (std::size_t y = 1; y + 1 < frame.height; ++y) {
    for (std::size_t x = 1; x + 1 < frame.width; ++x) {
      const int r = frame.at(x, y - 1) + frame.at(x - 1, y) + frame.at(x + 1, y) + frame.at(x, y + 1) -
                    4 * frame.at(x, y);
      responses.push_back(r);
    }
  }
  const double n = static_cast<double>(responses.size());
  const double mean = std::accumulate(responses.begin(), responses.end(), 0.0) / n;
  double var = 0.0;
  for (double r : responses) var += (r - mean) * (r - mean);
  return var / n;
}

std::vector<std::size_t> select_keyframes_unsupervised(const std::vector<FrameBuffer>& frames, std::size_t k,
                                                       std::uint64_t seed) {
  if (frames.empty()) throw Error(ErrorCode::KTooLarge, "no frames to select from");
  std::vector<float> features;
  features.reserve(frames.size() * kHistogramBins);
  for (const auto& f : frames) {
    const double pixels = static_cast<double>(f.pixels.size());
    for (std::size_t c : grayscale_histogram(f, kHistogramBins)) {
      features.push_back(static_cast<float>(static_cast<double>(c) / pixels));
    }
  }
  const EmbeddingMatrix histograms(frames.size(), kHistogramBins, std::move(features));
  const auto clusters = kmeans(histograms, k, seed, kDefaultKMeansIters);

  std::vector<double> sharpness(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) sharpness[i] = laplacian_variance(frames[i]);

  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(k, none);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto& b = best[clusters.assignments[i]];
    if (b == none || sharpness[i] > sharpness[b]) b = i;
  }
  std::vector<std::size_t> out;
  for (std::size_t b : best)
    if (b != none) out.push_back(b);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::size_t>> select_sentences_centroid(const text::SentenceSet& s,
                                                                const SegmentPartition& per_segment,
                                                                std::size_t per_k, std::uint64_t seed) {
  if (per_k == 0) throw Error(ErrorCode::InvalidConfig, "sentences per segment must be >= 1");
  validate_partition(per_segment, s.size());
  std::vector<std::vector<std::size_t>> out;
  for (const auto& range : per_segment.ranges) {
    const auto points = s.embeddings.slice(range.start, range.end);
    const std::size_t k = std::min(per_k, range.size());
    const auto clusters = kmeans(points, k, seed, kDefaultKMeansIters);
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t best = points.rows();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < points.rows(); ++i) {
        if (clusters.assignments[i] != c) continue;
        const double d = detail::squared_distance(points.row(i), clusters.centroids.row(c));
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      if (best != points.rows()) chosen.push_back(range.start + best);
    }
    std::sort(chosen.begin(), chosen.end());
    out.push_back(std::move(chosen));
  }
  return out;
}

}  // namespace sccs::summarize
