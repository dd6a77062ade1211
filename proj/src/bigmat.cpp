#include "oocl/bigmat.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "oocl/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "the on-disk format is little-endian float64; big-endian hosts need byte swapping");

namespace oocl {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Descriptor codec

std::string encode_descriptor(const Descriptor& d) {
  nlohmann::ordered_json j;
  j["format_tag"] = d.format_tag;
  j["n_rows"] = d.n_rows;
  j["n_cols"] = d.n_cols;
  j["element_type"] = d.element_type;
  j["layout"] = d.layout;
  j["data_file"] = d.data_file;
  j["byte_offset"] = d.byte_offset;
  if (d.col_names) j["col_names"] = *d.col_names;
  return j.dump(2) + "\n";
}

namespace {

template <class T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("descriptor: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("descriptor: bad value for '") + key + "'");
  }
}

std::size_t required_count(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("descriptor: missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw FormatError(std::string("descriptor: '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

Descriptor decode_descriptor(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("descriptor: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("descriptor: top level must be an object");

  Descriptor d;
  d.format_tag = required<std::string>(j, "format_tag");
  if (d.format_tag != kFormatTag)
    throw FormatError("descriptor: unknown format_tag '" + d.format_tag + "'");
  d.n_rows = required_count(j, "n_rows");
  d.n_cols = required_count(j, "n_cols");
  d.element_type = required<std::string>(j, "element_type");
  if (d.element_type != kElementType)
    throw FormatError("descriptor: unsupported element_type '" + d.element_type + "'");
  d.layout = required<std::string>(j, "layout");
  if (d.layout != kLayout) throw FormatError("descriptor: unsupported layout '" + d.layout + "'");
  d.data_file = required<std::string>(j, "data_file");
  if (d.data_file.empty()) throw FormatError("descriptor: empty data_file");
  d.byte_offset = j.contains("byte_offset") ? required_count(j, "byte_offset") : 0;
  if (j.contains("col_names")) {
    d.col_names = required<std::vector<std::string>>(j, "col_names");
    if (d.col_names->size() != d.n_cols)
      throw FormatError("descriptor: col_names has " + std::to_string(d.col_names->size()) +
                        " entries for " + std::to_string(d.n_cols) + " columns");
  }
  return d;
}

void write_descriptor(const fs::path& path, const Descriptor& d) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << encode_descriptor(d);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Descriptor read_descriptor(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open descriptor " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_descriptor(ss.str());
}

// ---------------------------------------------------------------------------
// Storage

namespace {

class MappedRegion {
 public:
  MappedRegion(const fs::path& path, std::size_t min_bytes) {
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
      ::close(fd_);
      throw IoError("cannot stat " + path.string());
    }
    len_ = static_cast<std::size_t>(st.st_size);
    if (len_ < min_bytes) {
      ::close(fd_);
      throw FormatError("size mismatch: " + path.string() + " has " + std::to_string(len_) +
                        " bytes, descriptor requires " + std::to_string(min_bytes));
    }
    addr_ = ::mmap(nullptr, len_, PROT_READ, MAP_SHARED, fd_, 0);
    if (addr_ == MAP_FAILED) {
      ::close(fd_);
      throw IoError("mmap failed for " + path.string() + ": " + std::strerror(errno));
    }
  }
  MappedRegion(const MappedRegion&) = delete;
  MappedRegion& operator=(const MappedRegion&) = delete;
  ~MappedRegion() {
    ::munmap(addr_, len_);
    ::close(fd_);
  }

  const std::byte* data() const { return static_cast<const std::byte*>(addr_); }

 private:
  int fd_ = -1;
  void* addr_ = nullptr;
  std::size_t len_ = 0;
};

}  // namespace

struct FileMatrix::Storage {
  std::variant<std::unique_ptr<MappedRegion>, std::vector<double>> buf;
};

FileMatrix FileMatrix::attach(const fs::path& desc_path) {
  const Descriptor d = read_descriptor(desc_path);
  if (d.n_rows == 0 || d.n_cols == 0) throw FormatError("descriptor: empty matrix");
  if (d.byte_offset % 8 != 0) throw FormatError("descriptor: byte_offset must be a multiple of 8");

  fs::path data_path = d.data_file;
  if (data_path.is_relative()) data_path = desc_path.parent_path() / data_path;

  auto storage = std::make_shared<Storage>();
  auto region = std::make_unique<MappedRegion>(data_path, d.byte_offset + d.data_bytes());
  const auto* base = region->data() + d.byte_offset;
  storage->buf = std::move(region);

  FileMatrix m;
  m.data_ = reinterpret_cast<const double*>(base);
  m.storage_ = std::move(storage);
  m.n_rows_ = d.n_rows;
  m.n_cols_ = d.n_cols;
  if (d.col_names) m.names_ = *d.col_names;
  return m;
}

FileMatrix FileMatrix::from_memory(std::size_t n_rows, std::size_t n_cols,
                                   std::vector<double> col_major,
                                   std::vector<std::string> col_names) {
  if (col_major.size() != n_rows * n_cols)
    throw RangeError("from_memory: buffer has " + std::to_string(col_major.size()) +
                     " values, expected " + std::to_string(n_rows * n_cols));
  if (!col_names.empty() && col_names.size() != n_cols)
    throw RangeError("from_memory: col_names size mismatch");
  auto storage = std::make_shared<Storage>();
  storage->buf = std::move(col_major);
  FileMatrix m;
  m.data_ = std::get<std::vector<double>>(storage->buf).data();
  m.storage_ = std::move(storage);
  m.n_rows_ = n_rows;
  m.n_cols_ = n_cols;
  m.names_ = std::move(col_names);
  return m;
}

bool FileMatrix::file_backed() const noexcept {
  return storage_ && std::holds_alternative<std::unique_ptr<MappedRegion>>(storage_->buf);
}

std::string FileMatrix::col_name(std::size_t j) const {
  if (j < names_.size()) return names_[j];
  return "V" + std::to_string(j + 1);
}

// ---------------------------------------------------------------------------
// Views

MatrixView::MatrixView(FileMatrix m) : m_(std::move(m)) {}

MatrixView::MatrixView(FileMatrix m, std::vector<std::size_t> rows)
    : m_(std::move(m)), rows_(std::move(rows)), full_(false) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i] >= m_.n_rows())
      throw RangeError("row index " + std::to_string(rows_[i]) + " out of range for " +
                       std::to_string(m_.n_rows()) + " rows");
    if (i > 0 && rows_[i] <= rows_[i - 1])
      throw RangeError("row indices must be strictly increasing (position " + std::to_string(i) +
                       ")");
  }
}

std::vector<std::size_t> MatrixView::row_ids() const {
  if (!full_) return rows_;
  std::vector<std::size_t> ids(m_.n_rows());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

MatrixView MatrixView::subview(std::span<const std::size_t> sub) const {
  std::vector<std::size_t> rows(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (sub[i] >= n_rows())
      throw RangeError("row index " + std::to_string(sub[i]) + " out of range for view of " +
                       std::to_string(n_rows()) + " rows");
    rows[i] = full_ ? sub[i] : rows_[sub[i]];
  }
  return MatrixView(m_, std::move(rows));
}

MatrixView make_view(const FileMatrix& m, std::vector<std::size_t> rows) {
  return MatrixView(m, std::move(rows));
}

}  // namespace oocl
