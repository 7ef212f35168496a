#include "sccs/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace sccs {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::GapDetected: return "GapDetected";
    case ErrorCode::OverlapDetected: return "OverlapDetected";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::ManifestInvalid: return "ManifestInvalid";
    case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::ZeroSize: return "ZeroSize";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidMarginals: return "InvalidMarginals";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::DivisionUnderflow: return "DivisionUnderflow";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooFewSentences: return "TooFewSentences";
    case ErrorCode::WeightSumViolation: return "WeightSumViolation";
    case ErrorCode::TopKTooLarge: return "TopKTooLarge";
    case ErrorCode::BadBinCount: return "BadBinCount";
    case ErrorCode::FrameTooSmall: return "FrameTooSmall";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::DepthUnsupported: return "DepthUnsupported";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::InvalidMatrix, "data size " + std::to_string(data_.size()) +
                                              " != " + std::to_string(rows_) + "x" +
                                              std::to_string(cols_));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorCode::InvalidMatrix, "ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

// ---------------------------------------------------------------------------
// EmbeddingMatrix

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data)
    : rows_(rows), dims_(dims), data_(std::move(data)) {
  if (rows_ == 0 || dims_ == 0) {
    throw Error(ErrorCode::InvalidMatrix, "embedding matrix must have rows >= 1 and dims >= 1");
  }
  if (data_.size() != rows_ * dims_) {
    throw Error(ErrorCode::InvalidMatrix, "data size " + std::to_string(data_.size()) +
                                              " != " + std::to_string(rows_) + "x" +
                                              std::to_string(dims_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorCode::NonFiniteValue,
                  "row " + std::to_string(i / dims_) + " col " + std::to_string(i % dims_));
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t dims = rows.empty() ? 0 : rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * dims);
  for (const auto& r : rows) {
    if (r.size() != dims) throw Error(ErrorCode::InvalidMatrix, "ragged rows");
    for (double v : r) data.push_back(static_cast<float>(v));
  }
  return EmbeddingMatrix(rows.size(), dims, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > rows_) {
    throw Error(ErrorCode::IndexOutOfRange, "slice [" + std::to_string(begin) + ", " +
                                                std::to_string(end) + ") of " +
                                                std::to_string(rows_) + " rows");
  }
  std::vector<float> data(data_.begin() + static_cast<std::ptrdiff_t>(begin * dims_),
                          data_.begin() + static_cast<std::ptrdiff_t>(end * dims_));
  return EmbeddingMatrix(end - begin, dims_, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::size_t> indices) const {
  std::vector<float> data;
  data.reserve(indices.size() * dims_);
  for (std::size_t i : indices) {
    if (i >= rows_) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "row " + std::to_string(i) + " of " + std::to_string(rows_));
    }
    auto r = row(i);
    data.insert(data.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(indices.size(), dims_, std::move(data));
}

// ---------------------------------------------------------------------------
// SegmentPartition

SegmentPartition SegmentPartition::from_cuts(std::size_t n, const std::vector<std::size_t>& cuts) {
  SegmentPartition p;
  std::size_t start = 0;
  for (std::size_t cut : cuts) {
    p.ranges.push_back({start, cut});
    start = cut;
  }
  p.ranges.push_back({start, n});
  validate_partition(p, n);
  return p;
}

void validate_partition(const SegmentPartition& partition, std::size_t n) {
  std::vector<IndexRange> sorted = partition.ranges;
  for (const auto& r : sorted) {
    if (r.end <= r.start) {
      throw Error(ErrorCode::EmptySegment,
                  "[" + std::to_string(r.start) + ", " + std::to_string(r.end) + ")");
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const IndexRange& a, const IndexRange& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  std::size_t cursor = 0;
  for (const auto& r : sorted) {
    if (r.start > cursor) {
      throw Error(ErrorCode::GapDetected,
                  "indices [" + std::to_string(cursor) + ", " + std::to_string(r.start) +
                      ") not covered");
    }
    if (r.start < cursor) {
      throw Error(ErrorCode::OverlapDetected,
                  "range starting at " + std::to_string(r.start) +
                      " overlaps a range ending at " + std::to_string(cursor));
    }
    cursor = r.end;
  }
  if (cursor > n) {
    throw Error(ErrorCode::OverlapDetected,
                "ranges extend to " + std::to_string(cursor) + " beyond n = " + std::to_string(n));
  }
  if (cursor < n) {
    throw Error(ErrorCode::GapDetected,
                "indices [" + std::to_string(cursor) + ", " + std::to_string(n) + ") not covered");
  }
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string required_string(const json& j, const char* field) {
  if (!j.contains(field)) throw Error(ErrorCode::ManifestInvalid, std::string("missing field '") + field + "'");
  if (!j.at(field).is_string()) throw Error(ErrorCode::ManifestInvalid, std::string("field '") + field + "' must be a string");
  return j.at(field).get<std::string>();
}

template <typename T>
void read_override(const json& cfg, const char* field, std::optional<T>& out) {
  if (!cfg.contains(field)) return;
  const json& v = cfg.at(field);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw Error(ErrorCode::ManifestInvalid, std::string("config.") + field + " must be a number");
  } else {
    if (!v.is_number_unsigned()) {
      throw Error(ErrorCode::ManifestInvalid, std::string("config.") + field + " must be a non-negative integer");
    }
  }
  out = v.get<T>();
}

}  // namespace

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ManifestInvalid, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ManifestInvalid, "top level must be an object");

  Manifest m;
  m.frame_embeddings_path = resolve(base_dir, required_string(j, "frame_embeddings_path"));
  m.sentence_texts_path = resolve(base_dir, required_string(j, "sentence_texts_path"));
  m.sentence_embeddings_path = resolve(base_dir, required_string(j, "sentence_embeddings_path"));
  if (j.contains("raw_frames_path") && !j.at("raw_frames_path").is_null()) {
    m.raw_frames_path = resolve(base_dir, required_string(j, "raw_frames_path"));
  }
  if (j.contains("config")) {
    const json& cfg = j.at("config");
    if (!cfg.is_object()) throw Error(ErrorCode::ManifestInvalid, "field 'config' must be an object");
    read_override(cfg, "lambda", m.config.lambda);
    read_override(cfg, "beta", m.config.beta);
    read_override(cfg, "tau", m.config.tau);
    read_override(cfg, "omega_b", m.config.omega_b);
    // "k" sets both candidate counts; the specific keys win over it.
    std::optional<std::size_t> k;
    read_override(cfg, "k", k);
    m.config.keyframes_k = k;
    m.config.sentences_k = k;
    read_override(cfg, "keyframes_k", m.config.keyframes_k);
    read_override(cfg, "sentences_k", m.config.sentences_k);
    read_override(cfg, "outer_iters", m.config.outer_iters);
    read_override(cfg, "inner_iters", m.config.inner_iters);
    read_override(cfg, "tol", m.config.tol);
    read_override(cfg, "cut_threshold", m.config.cut_threshold);
    read_override(cfg, "smooth_window", m.config.smooth_window);
    read_override(cfg, "threshold_multiplier", m.config.threshold_multiplier);
    read_override(cfg, "seed", m.config.seed);
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// SCCSEMB1 encoding

namespace {

std::uint32_t load_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

}  // namespace

EmbeddingMatrix decode_embeddings(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = sizeof(kEmbeddingMagic);
  const std::size_t probe = std::min(bytes.size(), magic_len);
  for (std::size_t i = 0; i < probe; ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kEmbeddingMagic[i])) {
      throw Error(ErrorCode::BadMagic, "unexpected byte at offset " + std::to_string(i));
    }
  }
  if (bytes.size() < kEmbeddingHeaderBytes) {
    throw Error(ErrorCode::TruncatedFile, "header ends at offset " + std::to_string(bytes.size()) +
                                              ", expected " +
                                              std::to_string(kEmbeddingHeaderBytes) + " bytes");
  }
  const std::uint32_t rows = load_u32_le(bytes.data() + 8);
  const std::uint32_t dims = load_u32_le(bytes.data() + 12);
  if (rows == 0 || dims == 0) {
    throw Error(ErrorCode::InvalidMatrix, "header at offset 8 declares rows=" + std::to_string(rows) +
                                              " dims=" + std::to_string(dims));
  }
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * dims;
  const std::uint64_t expected = kEmbeddingHeaderBytes + count * 4;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedFile, "payload ends at offset " + std::to_string(bytes.size()) +
                                              ", expected " + std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::TrailingData, "unexpected bytes from offset " + std::to_string(expected));
  }
  std::vector<float> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t offset = kEmbeddingHeaderBytes + i * 4;
    const float v = std::bit_cast<float>(load_u32_le(bytes.data() + offset));
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "value at offset " + std::to_string(offset));
    }
    data[i] = v;
  }
  return EmbeddingMatrix(rows, dims, std::move(data));
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingMatrix& m) {
  if (m.rows() > UINT32_MAX || m.dims() > UINT32_MAX) {
    throw Error(ErrorCode::InvalidMatrix, "matrix too large for the 32-bit header");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kEmbeddingHeaderBytes + m.data().size() * 4);
  for (auto c : kEmbeddingMagic) out.push_back(static_cast<std::uint8_t>(c));
  store_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  store_u32_le(out, static_cast<std::uint32_t>(m.dims()));
  for (float v : m.data()) store_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_embeddings(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  write_file_bytes(path, encode_embeddings(m));
}

// ---------------------------------------------------------------------------
// File helpers

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());
  return bytes;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::vector<std::string> read_sentence_lines(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

}  // namespace sccs
