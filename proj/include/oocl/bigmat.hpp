#pragma once

// File-backed column-major float64 matrices.
//
// On-disk contract: a raw data file of little-endian float64 values stored
// column by column (element (i,j) at byte_offset + 8*(j*n_rows + i)), and a
// small JSON descriptor naming the data file relative to the descriptor's
// own directory.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oocl {

inline constexpr std::string_view kFormatTag = "oocl-mat-v1";
inline constexpr std::string_view kElementType = "float64-le";
inline constexpr std::string_view kLayout = "column-major";

struct Descriptor {
  std::string format_tag{kFormatTag};
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::string element_type{kElementType};
  std::string layout{kLayout};
  std::string data_file;
  std::size_t byte_offset = 0;
  std::optional<std::vector<std::string>> col_names;

  std::size_t data_bytes() const { return 8 * n_rows * n_cols; }

  bool operator==(const Descriptor&) const = default;
};

std::string encode_descriptor(const Descriptor& d);
/// Throws FormatError on missing fields, unknown tags or bad values.
Descriptor decode_descriptor(std::string_view text);

void write_descriptor(const std::filesystem::path& path, const Descriptor& d);
Descriptor read_descriptor(const std::filesystem::path& path);

/// Read-only column-major matrix. Copies share the underlying storage, so a
/// FileMatrix is cheap to pass by value and safe to read from many threads.
class FileMatrix {
 public:
  /// Maps the data file named by the descriptor. Nothing is read eagerly.
  static FileMatrix attach(const std::filesystem::path& desc_path);

  /// Same interface over an owned buffer. Used to check that file-backed and
  /// in-memory fits agree bit for bit.
  static FileMatrix from_memory(std::size_t n_rows, std::size_t n_cols,
                                std::vector<double> col_major,
                                std::vector<std::string> col_names = {});

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  bool file_backed() const noexcept;

  std::span<const double> column(std::size_t j) const noexcept {
    return {data_ + j * n_rows_, n_rows_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[j * n_rows_ + i];
  }

  /// Empty when the source had no header.
  const std::vector<std::string>& col_names() const noexcept { return names_; }
  /// Name used in reports: the header name, or "V<j+1>".
  std::string col_name(std::size_t j) const;

 private:
  struct Storage;
  FileMatrix() = default;

  std::shared_ptr<const Storage> storage_;
  const double* data_ = nullptr;
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::string> names_;
};

/// A FileMatrix restricted to an ordered subset of its rows. Holds the
/// matrix by value (shared storage), never copies matrix data.
class MatrixView {
 public:
  /// All rows, in order.
  explicit MatrixView(FileMatrix m);
  /// Rows must be strictly increasing and < n_rows, else RangeError.
  MatrixView(FileMatrix m, std::vector<std::size_t> rows);

  std::size_t n_rows() const noexcept { return full_ ? m_.n_rows() : rows_.size(); }
  std::size_t n_cols() const noexcept { return m_.n_cols(); }
  bool is_full() const noexcept { return full_; }
  const FileMatrix& matrix() const noexcept { return m_; }

  /// Row ids into the underlying matrix. Materializes 0..n-1 for full views.
  std::vector<std::size_t> row_ids() const;

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return full_ ? m_(i, j) : m_(rows_[i], j);
  }

  /// Calls f(x, rows) where x is column j of the underlying matrix and rows
  /// is the index list (empty span for full views). Lets kernels pick a
  /// contiguous or gathered loop once per column.
  template <class F>
  decltype(auto) with_column(std::size_t j, F&& f) const {
    return f(m_.column(j).data(), std::span<const std::size_t>(rows_));
  }

  /// View of rows sub[0], sub[1], ... of this view (composition).
  MatrixView subview(std::span<const std::size_t> sub) const;

 private:
  FileMatrix m_;
  std::vector<std::size_t> rows_;
  bool full_ = true;
};

MatrixView make_view(const FileMatrix& m, std::vector<std::size_t> rows);

struct SetupOptions {
  /// Upper bound on the transpose buffer. At least one column is always
  /// buffered, so the effective bound is max(this, 8*n_rows).
  std::size_t block_bytes = 64u << 20;
  char delimiter = ',';
};

/// Converts a numeric delimited text file into `<out_prefix>.bin` and
/// `<out_prefix>.desc`. The first row is taken as a header when any of its
/// cells is non-numeric. Rows are staged row-major in a temporary file and
/// transposed in column blocks, so memory stays bounded by the block size.
/// On failure no output files are left behind.
Descriptor setup_matrix(const std::filesystem::path& source,
                        const std::filesystem::path& out_prefix,
                        const SetupOptions& opts = {});

/// Writes a column-major matrix column by column. `fill(j, out)` must fill
/// `out` (length n_rows) with column j. Produces the same two files as
/// setup_matrix.
Descriptor write_matrix(const std::filesystem::path& out_prefix, std::size_t n_rows,
                        std::size_t n_cols,
                        const std::function<void(std::size_t, std::span<double>)>& fill,
                        std::optional<std::vector<std::string>> col_names = std::nullopt);

}  // namespace oocl
