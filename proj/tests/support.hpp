#pragma once

// Shared helpers for the test suites.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oocl/bigmat.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "oocl-test-XXXXXX").string();
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
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Column-major n x p matrix of N(0,1) draws, optionally shifted/scaled per
/// column so centering and scaling matter.
inline std::vector<double> random_matrix(std::size_t n, std::size_t p, std::mt19937_64& rng,
                                         bool shifted = true) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> x(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    const double shift = shifted ? u(rng) : 0.0;
    const double scale = shifted ? std::exp(u(rng) / 2) : 1.0;
    for (std::size_t i = 0; i < n; ++i) x[j * n + i] = shift + scale * z(rng);
  }
  return x;
}

inline oocl::FileMatrix memory_matrix(std::size_t n, std::size_t p, std::vector<double> x) {
  return oocl::FileMatrix::from_memory(n, p, std::move(x));
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> y(n);
  for (double& v : y) v = z(rng);
  return y;
}

}  // namespace testing
