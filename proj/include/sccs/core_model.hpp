#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sccs/error.hpp"

namespace sccs {

/// Dense row-major matrix of doubles. Used for cost matrices and transport
/// plans; unlike EmbeddingMatrix it carries no finiteness invariant.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A rows x dims sequence of feature vectors (frames, shots, tokens or
/// sentences). Values are stored as 32-bit floats, the precision of the
/// on-disk format, so a write/read cycle is lossless.
///
/// Invariants: rows >= 1, dims >= 1, every value finite. Construction
/// throws InvalidMatrix / NonFiniteValue otherwise.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data);

  static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t dims() const { return dims_; }

  float operator()(std::size_t r, std::size_t c) const { return data_[r * dims_ + c]; }
  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * dims_, dims_};
  }
  const std::vector<float>& data() const { return data_; }

  /// Rows [begin, end) as a new matrix.
  EmbeddingMatrix slice(std::size_t begin, std::size_t end) const;
  /// The listed rows, in the given order.
  EmbeddingMatrix select(std::span<const std::size_t> indices) const;

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t dims_;
  std::vector<float> data_;
};

/// 8-bit grayscale frame.
struct FrameBuffer {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

/// Half-open index range [start, end).
struct IndexRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const IndexRange&) const = default;
};

/// Ordered, contiguous, non-overlapping ranges covering [0, n).
struct SegmentPartition {
  std::vector<IndexRange> ranges;

  std::size_t size() const { return ranges.size(); }
  bool operator==(const SegmentPartition&) const = default;

  /// Partition of [0, n) cut before every index listed in `cuts`
  /// (cuts strictly increasing, each in (0, n)).
  static SegmentPartition from_cuts(std::size_t n, const std::vector<std::size_t>& cuts);
};

/// Throws GapDetected / OverlapDetected / EmptySegment unless the ranges,
/// sorted by start, tile [0, n) exactly.
void validate_partition(const SegmentPartition& partition, std::size_t n);

/// Optional overrides carried by a manifest. Unset fields fall back to the
/// built-in defaults; command-line flags take precedence over both.
struct ConfigOverrides {
  std::optional<double> lambda;
  std::optional<double> beta;
  std::optional<double> tau;
  std::optional<std::size_t> omega_b;
  std::optional<std::size_t> keyframes_k;
  std::optional<std::size_t> sentences_k;
  std::optional<std::size_t> outer_iters;
  std::optional<std::size_t> inner_iters;
  std::optional<double> tol;
  std::optional<double> cut_threshold;
  std::optional<std::size_t> smooth_window;
  std::optional<double> threshold_multiplier;
  std::optional<std::uint64_t> seed;
};

struct Manifest {
  std::filesystem::path frame_embeddings_path;
  std::optional<std::filesystem::path> raw_frames_path;
  std::filesystem::path sentence_texts_path;
  std::filesystem::path sentence_embeddings_path;
  ConfigOverrides config;
};

/// Parses a JSON manifest. Relative paths are resolved against the manifest's
/// directory. Throws ManifestInvalid naming the offending field.
Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
Manifest read_manifest(const std::filesystem::path& path);

/// One keyframe-candidate set paired with one sentence-candidate set.
struct CandidatePair {
  EmbeddingMatrix visual_candidate;
  EmbeddingMatrix textual_candidate;
  std::size_t visual_segment_id = 0;
  std::size_t textual_segment_id = 0;
  std::optional<double> distance;
};

// SCCSEMB1 file format: 8-byte magic, rows (u32 LE), dims (u32 LE), then
// rows*dims IEEE-754 binary32 LE values in row-major order.
inline constexpr char kEmbeddingMagic[8] = {'S', 'C', 'C', 'S', 'E', 'M', 'B', '1'};
inline constexpr std::size_t kEmbeddingHeaderBytes = 16;

EmbeddingMatrix decode_embeddings(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_embeddings(const EmbeddingMatrix& m);

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);

/// Whole-file helpers shared by the readers.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Lines of a UTF-8 text file, one sentence per line. A trailing newline does
/// not produce an extra empty line; '\r' line endings are stripped.
std::vector<std::string> read_sentence_lines(const std::filesystem::path& path);

}  // namespace sccs
