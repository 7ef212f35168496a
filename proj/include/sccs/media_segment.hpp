#pragma once

#include <cstddef>
#include <vector>

#include "sccs/core_model.hpp"

namespace sccs::media {

struct ShotSequence {
  SegmentPartition shots;         // ranges over frames
  EmbeddingMatrix shot_features;  // one unit-norm row per shot
};

/// Scores for the boundary between shot `index` and shot `index + 1`.
struct BoundaryScore {
  std::size_t index = 0;
  double diff_score = 0.0;  // 1 - cos(mean before, mean after)
  double rel_score = 0.0;   // max consecutive-shot cosine similarity in the window
  double logit = 0.0;       // pre-sigmoid combination
  double s = 0.0;           // sigmoid(logit), in [0, 1]
};

struct VtsConfig {
  std::size_t omega_b = 2;        // shots per side of a boundary
  double tau = 0.5;               // scene boundary where smoothed score > tau
  std::size_t smooth_window = 3;  // odd width of the centered smoother
  double diff_weight = 4.0;       // a
  double rel_weight = 4.0;        // b
};

void validate_config(const VtsConfig& cfg);

/// Cuts between consecutive frames whose cosine distance exceeds
/// `cut_threshold`; each shot's feature is its mean frame, renormalized.
ShotSequence detect_shots(const EmbeddingMatrix& frames, double cut_threshold);

/// Boundary `i` looks at shots [i - omega_b + 1, i] before and
/// [i + 1, i + omega_b] after, both clamped to the sequence.
///
///   diff  = 1 - cos(mean(before), mean(after))
///   rel   = max cos(shot_j, shot_j+1) over consecutive pairs in the window
///   logit = a * (2 * diff - 1) + b * (1 - rel)
///   s     = sigmoid(logit)
///
/// so identical content scores sigmoid(-a) and a clean orthogonal cut
/// scores sigmoid(a).
BoundaryScore boundary_representation(const ShotSequence& shots, std::size_t i, const VtsConfig& cfg);

/// Coarse scores for every boundary, then a centered moving average of width
/// smooth_window taken over their log-odds (window clamped at the ends).
/// Returns the smoothed probabilities, one per boundary.
std::vector<double> smoothed_boundary_scores(const ShotSequence& shots, const VtsConfig& cfg);

/// Partition of the shots into scenes, cut wherever the smoothed score
/// exceeds tau.
SegmentPartition segment_scenes(const ShotSequence& shots, const VtsConfig& cfg);

/// Maps a partition over shots back onto frame indices.
SegmentPartition scenes_to_frames(const ShotSequence& shots, const SegmentPartition& scenes);

}  // namespace sccs::media
