// Text-to-binary conversion for file-backed matrices.

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "oocl/bigmat.hpp"
#include "oocl/error.hpp"

namespace oocl {

namespace fs = std::filesystem;

namespace {

// Removes the listed files on scope exit unless released.
class FileCleanup {
 public:
  explicit FileCleanup(std::vector<fs::path> files) : files_(std::move(files)) {}
  FileCleanup(const FileCleanup&) = delete;
  FileCleanup& operator=(const FileCleanup&) = delete;
  ~FileCleanup() {
    if (!armed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
  }
  void release() { armed_ = false; }

 private:
  std::vector<fs::path> files_;
  bool armed_ = true;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void split(std::string_view line, char delim, std::vector<std::string_view>& cells) {
  cells.clear();
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

fs::path with_suffix(const fs::path& prefix, const char* suffix) {
  return fs::path(prefix.string() + suffix);
}

void check_stream(const std::ostream& out, const fs::path& path) {
  if (!out) throw IoError("write failed (disk full?): " + path.string());
}

// Read-only mapping of the staging file for the transpose pass.
class StagingMap {
 public:
  StagingMap(const fs::path& path, std::size_t bytes) : len_(bytes) {
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw IoError("cannot reopen staging file " + path.string());
    addr_ = ::mmap(nullptr, len_, PROT_READ, MAP_PRIVATE, fd_, 0);
    if (addr_ == MAP_FAILED) {
      ::close(fd_);
      throw IoError("mmap failed for staging file " + path.string());
    }
    ::madvise(addr_, len_, MADV_SEQUENTIAL);
  }
  StagingMap(const StagingMap&) = delete;
  StagingMap& operator=(const StagingMap&) = delete;
  ~StagingMap() {
    ::munmap(addr_, len_);
    ::close(fd_);
  }
  const double* data() const { return static_cast<const double*>(addr_); }

 private:
  int fd_ = -1;
  void* addr_ = nullptr;
  std::size_t len_ = 0;
};

}  // namespace

Descriptor setup_matrix(const fs::path& source, const fs::path& out_prefix,
                        const SetupOptions& opts) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError("cannot open " + source.string());

  const fs::path bin_path = with_suffix(out_prefix, ".bin");
  const fs::path desc_path = with_suffix(out_prefix, ".desc");
  const fs::path stage_path = with_suffix(out_prefix, ".stage.tmp");
  FileCleanup cleanup({bin_path, desc_path, stage_path});

  // Pass 1: parse rows into a row-major staging file.
  std::ofstream stage(stage_path, std::ios::binary | std::ios::trunc);
  if (!stage) throw IoError("cannot create staging file " + stage_path.string());

  std::optional<std::vector<std::string>> names;
  std::size_t n_cols = 0;
  std::size_t n_rows = 0;
  std::size_t line_no = 0;
  std::string line;
  std::vector<std::string_view> cells;
  std::vector<double> row;
  bool first = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    split(line, opts.delimiter, cells);

    if (first) {
      first = false;
      n_cols = cells.size();
      row.resize(n_cols);
      bool numeric = true;
      for (auto c : cells) numeric = numeric && parse_double(c, row[0]);
      if (!numeric) {
        names.emplace();
        for (auto c : cells) names->push_back(unquote(c));
        continue;
      }
    }
    if (cells.size() != n_cols)
      throw FormatError("ragged row at line " + std::to_string(line_no) + ": " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(n_cols));
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (!parse_double(cells[j], row[j]))
        throw ParseError(line_no, j + 1, "'" + std::string(cells[j]) + "' is not a finite number");
    }
    stage.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(n_cols * sizeof(double)));
    check_stream(stage, stage_path);
    ++n_rows;
  }
  if (in.bad()) throw IoError("read failed: " + source.string());
  if (n_rows == 0 || n_cols == 0) throw FormatError("no numeric data rows in " + source.string());
  stage.close();
  check_stream(stage, stage_path);

  // Pass 2: blockwise transpose into the column-major data file.
  const std::size_t col_bytes = 8 * n_rows;
  const std::size_t block_cols =
      std::clamp<std::size_t>(opts.block_bytes / col_bytes, 1, n_cols);
  {
    StagingMap staged(stage_path, col_bytes * n_cols);
    std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("cannot create " + bin_path.string());
    std::vector<double> block(block_cols * n_rows);
    const double* src = staged.data();
    for (std::size_t j0 = 0; j0 < n_cols; j0 += block_cols) {
      const std::size_t width = std::min(block_cols, n_cols - j0);
      for (std::size_t i = 0; i < n_rows; ++i) {
        const double* r = src + i * n_cols + j0;
        for (std::size_t t = 0; t < width; ++t) block[t * n_rows + i] = r[t];
      }
      bin.write(reinterpret_cast<const char*>(block.data()),
                static_cast<std::streamsize>(width * col_bytes));
      check_stream(bin, bin_path);
    }
    bin.close();
    check_stream(bin, bin_path);
  }
  std::error_code ec;
  fs::remove(stage_path, ec);

  Descriptor d;
  d.n_rows = n_rows;
  d.n_cols = n_cols;
  d.data_file = bin_path.filename().string();
  d.col_names = std::move(names);
  write_descriptor(desc_path, d);
  cleanup.release();
  return d;
}

Descriptor write_matrix(const fs::path& out_prefix, std::size_t n_rows, std::size_t n_cols,
                        const std::function<void(std::size_t, std::span<double>)>& fill,
                        std::optional<std::vector<std::string>> col_names) {
  if (n_rows == 0 || n_cols == 0) throw FormatError("write_matrix: empty matrix");
  if (col_names && col_names->size() != n_cols)
    throw RangeError("write_matrix: col_names size mismatch");
  const fs::path bin_path = with_suffix(out_prefix, ".bin");
  const fs::path desc_path = with_suffix(out_prefix, ".desc");
  FileCleanup cleanup({bin_path, desc_path});

  std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
  if (!bin) throw IoError("cannot create " + bin_path.string());
  std::vector<double> col(n_rows);
  for (std::size_t j = 0; j < n_cols; ++j) {
    fill(j, col);
    bin.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(n_rows * sizeof(double)));
    check_stream(bin, bin_path);
  }
  bin.close();
  check_stream(bin, bin_path);

  Descriptor d;
  d.n_rows = n_rows;
  d.n_cols = n_cols;
  d.data_file = bin_path.filename().string();
  d.col_names = std::move(col_names);
  write_descriptor(desc_path, d);
  cleanup.release();
  return d;
}

}  // namespace oocl
