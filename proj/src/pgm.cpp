#include <cctype>
#include <cmath>
#include <cstdio>

#include "sccs/cli_io.hpp"

namespace sccs::cli {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void expect_magic() {
    if (pos_ + 2 > bytes_.size() || bytes_[pos_] != 'P' || bytes_[pos_ + 1] != '5') {
      throw Error(ErrorCode::BadHeader, "expected P5 at offset " + std::to_string(pos_));
    }
    pos_ += 2;
  }

  std::uint64_t number(const char* field) {
    const std::size_t start = pos_;
    // Fields must be separated from what precedes them.
    if (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      throw Error(ErrorCode::BadHeader, std::string("expected whitespace before ") + field + " at offset " +
                                            std::to_string(pos_));
    }
    skip_space_and_comments();
    std::uint64_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFull) throw Error(ErrorCode::BadHeader, std::string(field) + " too large at offset " + std::to_string(start));
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      throw Error(ErrorCode::BadHeader, std::string("expected ") + field + " at offset " + std::to_string(pos_));
    }
    return value;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::BadHeader, "expected whitespace after maxval at offset " + std::to_string(pos_));
    }
    ++pos_;
  }

  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<FrameBuffer> decode_pgm_frames(std::span<const std::uint8_t> bytes) {
  std::vector<FrameBuffer> frames;
  HeaderReader r(bytes);
  while (true) {
    r.skip_space_and_comments();
    if (r.at_end()) break;
    const std::size_t image_start = r.pos();
    r.expect_magic();
    const auto width = r.number("width");
    const auto height = r.number("height");
    const std::size_t maxval_at = r.pos();
    const auto maxval = r.number("maxval");
    if (width == 0 || height == 0) {
      throw Error(ErrorCode::BadHeader, "zero image size in header at offset " + std::to_string(image_start));
    }
    if (maxval == 0 || maxval > 65535) {
      throw Error(ErrorCode::BadHeader, "maxval " + std::to_string(maxval) + " at offset " + std::to_string(maxval_at));
    }
    if (maxval > 255) {
      throw Error(ErrorCode::DepthUnsupported, "maxval " + std::to_string(maxval) + " at offset " +
                                                   std::to_string(maxval_at) + " (16-bit samples)");
    }
    r.single_whitespace();
    const std::size_t count = width * height;
    if (bytes.size() - r.pos() < count) {
      throw Error(ErrorCode::TruncatedFile, "image at offset " + std::to_string(image_start) + " needs " +
                                                std::to_string(count) + " pixel bytes from offset " +
                                                std::to_string(r.pos()) + ", file has " +
                                                std::to_string(bytes.size() - r.pos()));
    }
    FrameBuffer f{width, height, std::vector<std::uint8_t>(bytes.begin() + r.pos(), bytes.begin() + r.pos() + count)};
    if (maxval < 255) {
      for (auto p : f.pixels) {
        if (p > maxval) {
          throw Error(ErrorCode::BadHeader, "pixel exceeds maxval in image at offset " + std::to_string(image_start));
        }
      }
    }
    frames.push_back(std::move(f));
    r.advance(count);
  }
  return frames;
}

std::vector<FrameBuffer> read_pgm_frames(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_pgm_frames(bytes);
}

std::vector<std::uint8_t> encode_plan_pgm(const Matrix& plan) {
  const std::string header = "P5\n" + std::to_string(plan.cols()) + " " + std::to_string(plan.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  double mx = 0.0;
  for (std::size_t r = 0; r < plan.rows(); ++r)
    for (double v : plan.row(r)) mx = std::max(mx, v);
  for (std::size_t r = 0; r < plan.rows(); ++r) {
    for (double v : plan.row(r)) {
      const double scaled = mx > 0.0 ? 255.0 * std::max(v, 0.0) / mx : 0.0;
      out.push_back(static_cast<std::uint8_t>(std::min(255L, std::lround(scaled))));
    }
  }
  return out;
}

std::string encode_plan_csv(const Matrix& plan) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < plan.rows(); ++r) {
    for (std::size_t c = 0; c < plan.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", plan(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void export_plan_heatmap(const Matrix& plan, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm") {
    write_file_bytes(path, encode_plan_pgm(plan));
  } else if (ext == ".csv") {
    const auto text = encode_plan_csv(plan);
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } else {
    throw Error(ErrorCode::IoFailure, "plan output must end in .pgm or .csv: " + path.string());
  }
}

}  // namespace sccs::cli
