#include "spcp/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spcp/rng.hpp"

namespace spcp {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'P'};

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_f64_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpcpError(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void spill(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SpcpError(ErrorCode::IoFailure, "cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SpcpError(ErrorCode::IoFailure, "short write to " + path.string());
}

Matrix read_bin(const std::filesystem::path& path) {
  std::string bytes = slurp(path);
  if (bytes.size() < 12) throw SpcpError(ErrorCode::TruncatedFile, path.string());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw SpcpError(ErrorCode::BadMagic, path.string());
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::uint32_t rows = get_u32_le(p + 4);
  std::uint32_t cols = get_u32_le(p + 8);
  std::size_t need = 12 + 8 * static_cast<std::size_t>(rows) * cols;
  if (bytes.size() < need) throw SpcpError(ErrorCode::TruncatedFile, path.string());
  Matrix m(rows, cols);
  const unsigned char* data = p + 12;
  // column-major payload matches the in-memory layout
  for (Index i = 0; i < m.size(); ++i) m(i) = get_f64_le(data + 8 * i);
  return m;
}

void write_bin(const Matrix& m, const std::filesystem::path& path) {
  std::string bytes;
  bytes.reserve(12 + 8 * static_cast<std::size_t>(m.size()));
  bytes.append(kMagic, 4);
  put_u32_le(bytes, static_cast<std::uint32_t>(m.rows()));
  put_u32_le(bytes, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.size(); ++i) put_f64_le(bytes, m(i));
  spill(path, bytes);
}

Matrix read_csv(const std::filesystem::path& path) {
  std::string text = slurp(path);
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t cell_start = 0;
    for (;;) {
      std::size_t comma = line.find(',', cell_start);
      std::string cell = line.substr(
          cell_start, comma == std::string::npos ? std::string::npos : comma - cell_start);
      char* end = nullptr;
      const char* begin = cell.c_str();
      double v = std::strtod(begin, &end);
      while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
      if (end == begin || (end && *end != '\0')) {
        throw SpcpError(ErrorCode::NonNumericCell,
                        "'" + cell + "' in " + path.string());
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      cell_start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SpcpError(ErrorCode::DimensionMismatch, "ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SpcpError(ErrorCode::DimensionMismatch, "no rows in " + path.string());
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_csv(const Matrix& m, const std::filesystem::path& path) {
  std::string out;
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out += buf;
      out.push_back(j + 1 < m.cols() ? ',' : '\n');
    }
  }
  spill(path, out);
}

}  // namespace

MatrixFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::Csv : MatrixFormat::Bin;
}

Matrix read_matrix(const MatrixFile& f) {
  return f.format == MatrixFormat::Csv ? read_csv(f.path) : read_bin(f.path);
}

void write_matrix(const Matrix& m, const MatrixFile& f) {
  if (f.format == MatrixFormat::Csv) {
    write_csv(m, f.path);
  } else {
    write_bin(m, f.path);
  }
}

Matrix frames_to_matrix(const FrameSequence& fs) {
  if (fs.frames.empty()) {
    throw SpcpError(ErrorCode::InconsistentFrameSize, "no frames");
  }
  const Index h = fs.frames.front().rows();
  const Index w = fs.frames.front().cols();
  Matrix out(h * w, static_cast<Index>(fs.frames.size()));
  for (std::size_t t = 0; t < fs.frames.size(); ++t) {
    const Frame& f = fs.frames[t];
    if (f.rows() != h || f.cols() != w) {
      throw SpcpError(ErrorCode::InconsistentFrameSize, "frame " + std::to_string(t));
    }
    Index k = 0;
    for (Index j = 0; j < w; ++j) {
      for (Index i = 0; i < h; ++i) out(k++, static_cast<Index>(t)) = static_cast<double>(f(i, j));
    }
  }
  return out;
}

FrameSequence matrix_to_frames(const Matrix& m, Index height, Index width) {
  if (height * width != m.rows()) {
    throw SpcpError(ErrorCode::DimensionMismatch, "rows != height * width");
  }
  FrameSequence fs;
  fs.frames.reserve(static_cast<std::size_t>(m.cols()));
  for (Index t = 0; t < m.cols(); ++t) {
    Frame f(height, width);
    Index k = 0;
    for (Index j = 0; j < width; ++j) {
      for (Index i = 0; i < height; ++i) {
        double v = std::round(m(k++, t));
        f(i, j) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
    fs.frames.push_back(std::move(f));
  }
  return fs;
}

namespace {

// Next header token of a PGM file, skipping whitespace and '#' comments.
std::string pgm_token(const std::string& bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

}  // namespace

Frame read_pgm(const std::filesystem::path& path) {
  std::string bytes = slurp(path);
  std::size_t pos = 0;
  if (pgm_token(bytes, pos) != "P5") {
    throw SpcpError(ErrorCode::BadMagic, "not a binary PGM: " + path.string());
  }
  auto parse_dim = [&](const std::string& tok) -> long {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || v <= 0) {
      throw SpcpError(ErrorCode::IoFailure, "bad PGM header in " + path.string());
    }
    return v;
  };
  long w = parse_dim(pgm_token(bytes, pos));
  long h = parse_dim(pgm_token(bytes, pos));
  long maxval = parse_dim(pgm_token(bytes, pos));
  if (maxval != 255) {
    throw SpcpError(ErrorCode::IoFailure, "PGM maxval must be 255 in " + path.string());
  }
  ++pos;  // single whitespace after maxval
  if (bytes.size() < pos + static_cast<std::size_t>(w) * h) {
    throw SpcpError(ErrorCode::TruncatedFile, path.string());
  }
  Frame f(h, w);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (long i = 0; i < h; ++i) {
    for (long j = 0; j < w; ++j) f(i, j) = raster[i * w + j];
  }
  return f;
}

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
  std::string out = "P5\n" + std::to_string(frame.cols()) + " " + std::to_string(frame.rows()) +
                    "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(frame.size()));
  for (Index i = 0; i < frame.rows(); ++i) {
    for (Index j = 0; j < frame.cols(); ++j) out.push_back(static_cast<char>(frame(i, j)));
  }
  spill(path, out);
}

FrameSequence read_frame_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      paths.push_back(entry.path());
    }
  }
  if (paths.empty()) {
    throw SpcpError(ErrorCode::IoFailure, "no .pgm files in " + dir.string());
  }
  std::sort(paths.begin(), paths.end());
  FrameSequence fs;
  fs.frames.reserve(paths.size());
  for (const auto& p : paths) fs.frames.push_back(read_pgm(p));
  if (!fs.frames.empty()) {
    Index h = fs.frames.front().rows();
    Index w = fs.frames.front().cols();
    for (const Frame& f : fs.frames) {
      if (f.rows() != h || f.cols() != w) {
        throw SpcpError(ErrorCode::InconsistentFrameSize, dir.string());
      }
    }
  }
  return fs;
}

std::pair<Matrix, double> add_video_noise(const Matrix& D, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) {
    throw SpcpError(ErrorCode::InvalidConfig, "snr must be finite");
  }
  double mn = static_cast<double>(D.rows()) * static_cast<double>(D.cols());
  double varrho = D.norm() / (std::sqrt(mn) * std::pow(10.0, snr_db / 20.0));
  Rng rng(seed);
  Matrix noisy = D;
  for (Index j = 0; j < D.cols(); ++j) {
    for (Index i = 0; i < D.rows(); ++i) noisy(i, j) += varrho * rng.normal();
  }
  return {std::move(noisy), varrho};
}

}  // namespace spcp
