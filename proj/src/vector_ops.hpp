#pragma once

// Small dense-vector helpers shared by the segmentation and summarization
// modules. Accumulation is always in double.

#include <cmath>
#include <span>
#include <vector>

#include "sccs/core_model.hpp"

namespace sccs::detail {

template <typename T>
double dot(std::span<const T> a, std::span<const T> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

template <typename T>
double norm(std::span<const T> a) {
  return std::sqrt(dot(a, a));
}

// Cosine similarity; 0 when either vector is zero.
template <typename T>
double cosine(std::span<const T> a, std::span<const T> b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

inline std::vector<double> mean_rows(const EmbeddingMatrix& m, std::size_t begin, std::size_t end) {
  std::vector<double> mean(m.dims(), 0.0);
  for (std::size_t r = begin; r < end; ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  const double count = static_cast<double>(end - begin);
  for (double& v : mean) v /= count;
  return mean;
}

inline double squared_distance(std::span<const float> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace sccs::detail
