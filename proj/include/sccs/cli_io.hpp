#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sccs/core_model.hpp"

namespace sccs::cli {

/// Concatenated binary PGM (P5) images with maxval <= 255. Header comments
/// ('#' to end of line) are skipped; whitespace between images is allowed.
std::vector<FrameBuffer> decode_pgm_frames(std::span<const std::uint8_t> bytes);
std::vector<FrameBuffer> read_pgm_frames(const std::filesystem::path& path);

/// "P5\n<cols> <rows>\n255\n" followed by round(255 * T / max(T)) per entry,
/// row-major. An all-zero plan gives all-zero bytes.
std::vector<std::uint8_t> encode_plan_pgm(const Matrix& plan);

/// One line per row, comma-separated, %.17g.
std::string encode_plan_csv(const Matrix& plan);

/// Picks the encoding from the extension (.pgm or .csv).
void export_plan_heatmap(const Matrix& plan, const std::filesystem::path& path);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitEmptyResult = 3;

/// Entry point for the `sccs` command. Output that would go to a file when
/// no --out is given is written to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sccs::cli
