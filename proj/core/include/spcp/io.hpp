#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "spcp/model.hpp"

namespace spcp {

enum class MatrixFormat { Csv, Bin };

/// Bin layout: 4-byte magic "SPCP", uint32 LE rows, uint32 LE cols, then
/// rows*cols IEEE-754 doubles, little endian, column major. Platform
/// independent and bit exact across round trips.
struct MatrixFile {
  MatrixFormat format = MatrixFormat::Bin;
  std::filesystem::path path;
};

/// Csv for .csv, Bin otherwise.
MatrixFormat format_from_extension(const std::filesystem::path& path);

Matrix read_matrix(const MatrixFile& f);
void write_matrix(const Matrix& m, const MatrixFile& f);

/// One grayscale frame, 8-bit samples, row i / column j indexing.
using Frame = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct FrameSequence {
  std::vector<Frame> frames;  // all h x w, at least one
};

/// (h*w) x T matrix; column i is the column-major stacking of frame i, with
/// samples mapped to reals in [0, 255].
Matrix frames_to_matrix(const FrameSequence& fs);

/// Inverse of frames_to_matrix: values clamped to [0, 255] and rounded.
FrameSequence matrix_to_frames(const Matrix& m, Index height, Index width);

/// Binary PGM (P5, maxval 255).
Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const Frame& frame, const std::filesystem::path& path);

/// All .pgm files in a directory, sorted by filename.
FrameSequence read_frame_dir(const std::filesystem::path& dir);

/// Additive Gaussian noise calibrated so the result has the requested SNR:
/// varrho = ||D||_F / (sqrt(m n) 10^(snr/20)), output D + varrho * G with G
/// standard normal. Returns the noisy matrix and the varrho used.
std::pair<Matrix, double> add_video_noise(const Matrix& D, double snr_db, std::uint64_t seed);

}  // namespace spcp
