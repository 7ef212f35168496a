#include "sccs/media_segment.hpp"

#include <algorithm>
#include <cmath>

#include "vector_ops.hpp"

namespace sccs::media {

namespace {

using detail::cosine;
using detail::mean_rows;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void validate_config(const VtsConfig& cfg) {
  if (cfg.omega_b < 1) throw Error(ErrorCode::InvalidConfig, "omega_b must be >= 1");
  if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) throw Error(ErrorCode::InvalidConfig, "tau must lie in (0, 1)");
  if (cfg.smooth_window == 0 || cfg.smooth_window % 2 == 0) {
    throw Error(ErrorCode::InvalidConfig, "smooth_window must be odd");
  }
  if (!std::isfinite(cfg.diff_weight) || !std::isfinite(cfg.rel_weight)) {
    throw Error(ErrorCode::InvalidConfig, "combination weights must be finite");
  }
}

ShotSequence detect_shots(const EmbeddingMatrix& frames, double cut_threshold) {
  if (!(cut_threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "cut_threshold must be > 0");
  for (std::size_t r = 0; r < frames.rows(); ++r) {
    if (detail::norm(frames.row(r)) == 0.0) throw Error(ErrorCode::ZeroNormRow, "frame " + std::to_string(r));
  }
  std::vector<std::size_t> cuts;
  for (std::size_t r = 1; r < frames.rows(); ++r) {
    if (1.0 - cosine(frames.row(r - 1), frames.row(r)) > cut_threshold) cuts.push_back(r);
  }
  auto shots = SegmentPartition::from_cuts(frames.rows(), cuts);

  std::vector<float> features;
  features.reserve(shots.size() * frames.dims());
  for (std::size_t s = 0; s < shots.size(); ++s) {
    const auto& range = shots.ranges[s];
    auto mean = mean_rows(frames, range.start, range.end);
    const double n = detail::norm(std::span<const double>(mean));
    if (n == 0.0) throw Error(ErrorCode::ZeroNormRow, "shot " + std::to_string(s) + " has a zero mean feature");
    for (double v : mean) features.push_back(static_cast<float>(v / n));
  }
  const std::size_t count = shots.size();
  return {std::move(shots), EmbeddingMatrix(count, frames.dims(), std::move(features))};
}

BoundaryScore boundary_representation(const ShotSequence& shots, std::size_t i, const VtsConfig& cfg) {
  validate_config(cfg);
  const std::size_t n = shots.shot_features.rows();
  if (n < 2 || i + 1 >= n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "boundary " + std::to_string(i) + " with " + std::to_string(n) + " shots");
  }
  const std::size_t lo = i + 1 >= cfg.omega_b ? i + 1 - cfg.omega_b : 0;
  const std::size_t hi = std::min(n - 1, i + cfg.omega_b);  // inclusive

  const auto& features = shots.shot_features;
  const auto before = mean_rows(features, lo, i + 1);
  const auto after = mean_rows(features, i + 1, hi + 1);

  BoundaryScore out;
  out.index = i;
  out.diff_score = 1.0 - cosine(std::span<const double>(before), std::span<const double>(after));
  out.rel_score = -1.0;
  for (std::size_t j = lo; j < hi; ++j) {
    out.rel_score = std::max(out.rel_score, cosine(features.row(j), features.row(j + 1)));
  }
  out.logit = cfg.diff_weight * (2.0 * out.diff_score - 1.0) + cfg.rel_weight * (1.0 - out.rel_score);
  out.s = sigmoid(out.logit);
  return out;
}

std::vector<double> smoothed_boundary_scores(const ShotSequence& shots, const VtsConfig& cfg) {
  validate_config(cfg);
  const std::size_t n = shots.shot_features.rows();
  if (n < 2) return {};
  std::vector<double> logits(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) logits[i] = boundary_representation(shots, i, cfg).logit;
  const std::size_t half = cfg.smooth_window / 2;
  std::vector<double> smoothed(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(logits.size() - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += logits[j];
    smoothed[i] = sigmoid(sum / static_cast<double>(hi - lo + 1));
  }
  return smoothed;
}

SegmentPartition segment_scenes(const ShotSequence& shots, const VtsConfig& cfg) {
  const std::size_t n = shots.shot_features.rows();
  if (n == 0) throw Error(ErrorCode::InvalidMatrix, "no shots");
  const auto scores = smoothed_boundary_scores(shots, cfg);
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > cfg.tau) cuts.push_back(i + 1);
  }
  return SegmentPartition::from_cuts(n, cuts);
}

SegmentPartition scenes_to_frames(const ShotSequence& shots, const SegmentPartition& scenes) {
  validate_partition(scenes, shots.shots.size());
  SegmentPartition frames;
  for (const auto& scene : scenes.ranges) {
    frames.ranges.push_back({shots.shots.ranges[scene.start].start, shots.shots.ranges[scene.end - 1].end});
  }
  return frames;
}

}  // namespace sccs::media
