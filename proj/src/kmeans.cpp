#include <limits>
#include <random>

#include "sccs/summarize.hpp"
#include "vector_ops.hpp"

namespace sccs::summarize {

namespace {

// Uniform double in [0, 1) from the raw engine output, so results do not
// depend on the standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Assignment {
  std::vector<std::size_t> labels;
  double objective = 0.0;
};

Assignment assign(const EmbeddingMatrix& points, const Matrix& centroids) {
  Assignment out;
  out.labels.resize(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = detail::squared_distance(points.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        out.labels[i] = c;
      }
    }
    out.objective += best;
  }
  return out;
}

Matrix seed_centroids(const EmbeddingMatrix& points, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = points.rows();
  std::vector<std::size_t> chosen;
  std::vector<char> taken(n, 0);
  chosen.push_back(std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n))));
  taken[chosen.back()] = 1;

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    std::vector<double> last(points.row(chosen.back()).begin(), points.row(chosen.back()).end());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], detail::squared_distance(points.row(i), last));
      total += nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit_uniform(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        acc += nearest[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == n || taken[pick]) {
      // Every remaining point coincides with a chosen centre.
      pick = 0;
      while (taken[pick]) ++pick;
    }
    chosen.push_back(pick);
    taken[pick] = 1;
  }

  Matrix centroids(k, points.dims());
  for (std::size_t c = 0; c < k; ++c) {
    const auto row = points.row(chosen[c]);
    for (std::size_t d = 0; d < points.dims(); ++d) centroids(c, d) = row[d];
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const EmbeddingMatrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
  if (k == 0 || k > points.rows()) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " for " + std::to_string(points.rows()) + " points");
  }
  if (max_iters == 0) throw Error(ErrorCode::InvalidConfig, "max_iters must be >= 1");

  KMeansResult result;
  result.centroids = seed_centroids(points, k, seed);
  bool converged = false;
  while (result.iterations < max_iters) {
    auto step = assign(points, result.centroids);
    ++result.iterations;
    result.objective_history.push_back(step.objective);
    const bool unchanged = step.labels == result.assignments;
    result.assignments = std::move(step.labels);
    result.objective = step.objective;
    if (unchanged) {
      converged = true;
      break;
    }
    // Mean update; an empty cluster keeps its previous centre.
    Matrix sums(k, points.dims());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
      const std::size_t c = result.assignments[i];
      ++counts[c];
      const auto row = points.row(i);
      for (std::size_t d = 0; d < points.dims(); ++d) sums(c, d) += row[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t d = 0; d < points.dims(); ++d) {
        result.centroids(c, d) = sums(c, d) / static_cast<double>(counts[c]);
      }
    }
  }
  if (!converged) {
    // Centres moved after the last assignment; re-assign so every point sits
    // with its nearest centre.
    auto step = assign(points, result.centroids);
    result.assignments = std::move(step.labels);
    result.objective = step.objective;
    result.objective_history.push_back(step.objective);
  }
  return result;
}

}  // namespace sccs::summarize
