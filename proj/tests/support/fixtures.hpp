#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "sccs/core_model.hpp"
#include "support/oracles.hpp"

namespace sccs::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "sccs-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct PlantedFixture {
  std::string manifest;
  std::size_t visual_segment = 0;   // the block whose keyframes match
  std::size_t textual_segment = 0;  // the block whose sentences match
};

// Two video blocks and two text blocks over random orthonormal directions.
// Exactly one (video block, text block) pair shares a direction; every other
// combination is orthogonal. Which pair is planted depends on the seed.
inline PlantedFixture write_planted_fixture(const TempDir& dir, std::uint64_t seed, double noise = 0.02,
                                            std::size_t frames_per_block = 6, std::size_t sentences_per_block = 4,
                                            const std::string& extra_config = "") {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t dims = 8;
  const auto basis = random_rotation(rng, dims);  // rows are orthonormal directions

  PlantedFixture f;
  f.visual_segment = seed % 2;
  f.textual_segment = (seed / 2) % 2;
  const std::size_t shared = 0;
  const std::size_t video_dirs[2] = {f.visual_segment == 0 ? shared : 1, f.visual_segment == 1 ? shared : 1};
  const std::size_t text_dirs[2] = {f.textual_segment == 0 ? shared : 2, f.textual_segment == 1 ? shared : 2};

  auto noisy = [&](std::size_t axis) {
    std::vector<double> v = basis[axis];
    for (double& x : v) x += noise * gauss(rng);
    return v;
  };
  std::vector<std::vector<double>> frames, sentences;
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t i = 0; i < frames_per_block; ++i) frames.push_back(noisy(video_dirs[b]));
  std::string texts;
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < sentences_per_block; ++i) {
      sentences.push_back(noisy(text_dirs[b]));
      texts += "Block " + std::to_string(b) + " sentence " + std::to_string(i) + ".\n";
    }
  }
  write_embeddings(EmbeddingMatrix::from_rows(frames), dir.file("frames.emb"));
  write_embeddings(EmbeddingMatrix::from_rows(sentences), dir.file("sentences.emb"));
  write_text(dir.file("sentences.txt"), texts);
  f.manifest = dir.file("manifest.json");
  write_text(f.manifest, R"({"frame_embeddings_path": "frames.emb", "sentence_texts_path": "sentences.txt",)"
                         R"( "sentence_embeddings_path": "sentences.emb", "config": {)" +
                             extra_config + "}}");
  return f;
}

}  // namespace sccs::testing
