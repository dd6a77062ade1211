#include <doctest.h>

#include <cstring>
#include <random>
#include <thread>

#include "oocl/bigmat.hpp"
#include "oocl/error.hpp"
#include "support.hpp"

using namespace oocl;
using testing::TempDir;

namespace {

std::vector<double> doubles_of(const std::string& bytes) {
  std::vector<double> v(bytes.size() / 8);
  std::memcpy(v.data(), bytes.data(), v.size() * 8);
  return v;
}

std::string to_csv(std::size_t n, std::size_t p, const std::vector<double>& colmajor) {
  std::string s;
  char buf[40];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", colmajor[j * n + i]);
      if (j) s += ",";
      s += buf;
    }
    s += "\n";
  }
  return s;
}

}  // namespace

TEST_CASE("setup writes column-major little-endian doubles") {
  TempDir dir;
  testing::write_file(dir / "a.csv", "1,2\n3,4\n");
  const Descriptor d = setup_matrix(dir / "a.csv", dir / "a");
  CHECK(d.n_rows == 2);
  CHECK(d.n_cols == 2);
  CHECK(d.data_file == "a.bin");
  CHECK(doubles_of(testing::read_file(dir / "a.bin")) == std::vector<double>{1, 3, 2, 4});
  CHECK(std::filesystem::exists(dir / "a.desc"));
  CHECK_FALSE(std::filesystem::exists(dir / "a.stage.tmp"));
}

TEST_CASE("setup rejects an empty file") {
  TempDir dir;
  testing::write_file(dir / "e.csv", "");
  CHECK_THROWS_AS(setup_matrix(dir / "e.csv", dir / "e"), FormatError);
  CHECK_FALSE(std::filesystem::exists(dir / "e.bin"));
  CHECK_FALSE(std::filesystem::exists(dir / "e.desc"));
}

TEST_CASE("setup reads a header row into col_names") {
  TempDir dir;
  testing::write_file(dir / "h.csv", "a,b\n1,2\n3,4\n5,6\n");
  const Descriptor d = setup_matrix(dir / "h.csv", dir / "h");
  CHECK(d.n_rows == 3);
  REQUIRE(d.col_names.has_value());
  CHECK(*d.col_names == std::vector<std::string>{"a", "b"});
  const FileMatrix m = FileMatrix::attach(dir / "h.desc");
  CHECK(m.col_name(1) == "b");
  CHECK(m(2, 1) == 6.0);
}

TEST_CASE("setup reports the location of a non-numeric cell") {
  TempDir dir;
  testing::write_file(dir / "bad.csv", "1,2\n3,x\n");
  try {
    setup_matrix(dir / "bad.csv", dir / "bad");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 2);
  }
  CHECK_FALSE(std::filesystem::exists(dir / "bad.bin"));
  CHECK_FALSE(std::filesystem::exists(dir / "bad.desc"));
}

TEST_CASE("setup rejects missing values and infinities") {
  TempDir dir;
  testing::write_file(dir / "na.csv", "1,2\n3,\n");
  CHECK_THROWS_AS(setup_matrix(dir / "na.csv", dir / "na"), FormatError);
  testing::write_file(dir / "inf.csv", "1,2\n3,inf\n");
  CHECK_THROWS_AS(setup_matrix(dir / "inf.csv", dir / "inf"), ParseError);
}

TEST_CASE("setup rejects ragged rows") {
  TempDir dir;
  testing::write_file(dir / "r.csv", "1,2\n3,4,5\n");
  CHECK_THROWS_AS(setup_matrix(dir / "r.csv", dir / "r"), FormatError);
  CHECK_FALSE(std::filesystem::exists(dir / "r.bin"));
}

TEST_CASE("setup reports an I/O error for an unwritable destination") {
  TempDir dir;
  testing::write_file(dir / "ok.csv", "1,2\n3,4\n");
  CHECK_THROWS_AS(setup_matrix(dir / "ok.csv", dir / "no-such-dir" / "m"), IoError);
  CHECK_THROWS_AS(setup_matrix(dir / "missing.csv", dir / "m"), IoError);
}

TEST_CASE("layout law: every cell reads back as written") {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 9, p = 1 + rng() % 7;
    const auto x = testing::random_matrix(n, p, rng);
    const auto prefix = dir / ("m" + std::to_string(trial));
    testing::write_file(prefix.string() + ".csv", to_csv(n, p, x));
    SetupOptions opts;
    opts.block_bytes = 8 * (1 + rng() % 3);  // forces many column blocks
    setup_matrix(prefix.string() + ".csv", prefix, opts);
    const FileMatrix m = FileMatrix::attach(prefix.string() + ".desc");
    REQUIRE(m.n_rows() == n);
    REQUIRE(m.n_cols() == p);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < n; ++i) CHECK(m(i, j) == x[j * n + i]);
  }
}

TEST_CASE("descriptor codec round-trips") {
  Descriptor d;
  d.n_rows = 5;
  d.n_cols = 3;
  d.data_file = "x.bin";
  d.byte_offset = 16;
  d.col_names = std::vector<std::string>{"a", "b", "c"};
  CHECK(decode_descriptor(encode_descriptor(d)) == d);
  Descriptor e = d;
  e.col_names.reset();
  CHECK(decode_descriptor(encode_descriptor(e)) == e);
  CHECK(encode_descriptor(decode_descriptor(encode_descriptor(d))) == encode_descriptor(d));
}

TEST_CASE("descriptor decoding rejects corrupt input") {
  CHECK_THROWS_AS(decode_descriptor("not json"), FormatError);
  CHECK_THROWS_AS(decode_descriptor("{}"), FormatError);
  Descriptor d;
  d.n_rows = 2;
  d.n_cols = 2;
  d.data_file = "x.bin";
  std::string text = encode_descriptor(d);
  const auto pos = text.find("oocl-mat-v1");
  text.replace(pos, 11, "other-fmt-9");
  CHECK_THROWS_AS(decode_descriptor(text), FormatError);
}

TEST_CASE("attach reads the first CSV value and detects size mismatch") {
  TempDir dir;
  testing::write_file(dir / "a.csv", "1.5,2\n3,4\n");
  setup_matrix(dir / "a.csv", dir / "a");
  const FileMatrix m = FileMatrix::attach(dir / "a.desc");
  CHECK(m.file_backed());
  CHECK(m(0, 0) == 1.5);

  Descriptor d = read_descriptor(dir / "a.desc");
  d.n_rows = 3;
  write_descriptor(dir / "big.desc", d);
  CHECK_THROWS_AS(FileMatrix::attach(dir / "big.desc"), FormatError);
  CHECK_THROWS_AS(FileMatrix::attach(dir / "missing.desc"), IoError);
}

TEST_CASE("repeated attachments observe identical bytes") {
  TempDir dir;
  std::mt19937_64 rng(3);
  const auto x = testing::random_matrix(6, 4, rng);
  write_matrix(dir / "m", 6, 4, [&](std::size_t j, std::span<double> col) {
    std::copy_n(x.begin() + j * 6, 6, col.begin());
  });
  const FileMatrix a = FileMatrix::attach(dir / "m.desc");
  const FileMatrix b = FileMatrix::attach(dir / "m.desc");
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 6; ++i) CHECK(a(i, j) == b(i, j));
}

TEST_CASE("byte_offset shifts where the data starts") {
  TempDir dir;
  const std::vector<double> raw{99, 1, 3, 2, 4};
  {
    std::ofstream out(dir / "o.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(raw.data()), 40);
  }
  Descriptor d;
  d.n_rows = 2;
  d.n_cols = 2;
  d.data_file = "o.bin";
  d.byte_offset = 8;
  write_descriptor(dir / "o.desc", d);
  const FileMatrix m = FileMatrix::attach(dir / "o.desc");
  CHECK(m(0, 0) == 1);
  CHECK(m(1, 1) == 4);
}

TEST_CASE("make_view selects rows") {
  const FileMatrix m = FileMatrix::from_memory(2, 2, {1, 3, 2, 4});
  const MatrixView one = make_view(m, {0});
  CHECK(one.n_rows() == 1);
  CHECK(one(0, 0) == 1);
  CHECK(one(0, 1) == 2);

  const FileMatrix m3 = FileMatrix::from_memory(3, 1, {1, 2, 3});
  CHECK_THROWS_AS(make_view(m3, {5}), RangeError);
  CHECK_THROWS_AS(make_view(m3, {1, 1}), RangeError);
  CHECK_THROWS_AS(make_view(m3, {2, 0}), RangeError);
}

TEST_CASE("a full row list behaves like the raw matrix") {
  std::mt19937_64 rng(11);
  const auto x = testing::random_matrix(7, 3, rng);
  const FileMatrix m = FileMatrix::from_memory(7, 3, x);
  const MatrixView all = make_view(m, {0, 1, 2, 3, 4, 5, 6});
  const MatrixView full(m);
  for (std::size_t j = 0; j < 3; ++j) {
    double s1 = 0, s2 = 0, s3 = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      s1 += all(i, j);
      s2 += full(i, j);
      s3 += m(i, j);
    }
    CHECK(s1 == s3);
    CHECK(s2 == s3);
  }
}

TEST_CASE("view composition equals the composed row list") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 10, p = 1 + rng() % 4;
    const FileMatrix m = FileMatrix::from_memory(n, p, testing::random_matrix(n, p, rng));
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 2) a.push_back(i);
    if (a.empty()) a.push_back(0);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (rng() % 2) b.push_back(i);
    if (b.empty()) b.push_back(0);
    const MatrixView va = make_view(m, a);
    const MatrixView vab = va.subview(b);
    std::vector<std::size_t> ab;
    for (std::size_t t : b) ab.push_back(a[t]);
    const MatrixView direct = make_view(m, ab);
    REQUIRE(vab.n_rows() == direct.n_rows());
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < vab.n_rows(); ++i) CHECK(vab(i, j) == direct(i, j));
  }
  const FileMatrix m = FileMatrix::from_memory(3, 1, {1, 2, 3});
  const std::size_t bad[] = {3};
  CHECK_THROWS_AS(make_view(m, {0, 2}).subview(bad), RangeError);
}

TEST_CASE("concurrent readers see the same values as a serial read") {
  TempDir dir;
  const std::size_t n = 300, p = 40;
  std::mt19937_64 rng(9);
  const auto x = testing::random_matrix(n, p, rng);
  write_matrix(dir / "c", n, p, [&](std::size_t j, std::span<double> col) {
    std::copy_n(x.begin() + j * n, n, col.begin());
  });
  const FileMatrix m = FileMatrix::attach(dir / "c.desc");
  std::vector<double> serial(p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) serial[j] += m(i, j) * (1.0 + i);

  const int workers = 4;
  std::vector<std::vector<double>> got(workers, std::vector<double>(p));
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      // Overlapping ranges: every worker reads every column, in its own order.
      for (std::size_t t = 0; t < p; ++t) {
        const std::size_t j = (t + static_cast<std::size_t>(w) * 7) % p;
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += m(i, j) * (1.0 + i);
        got[w][j] = s;
      }
    });
  for (auto& t : threads) t.join();
  for (int w = 0; w < workers; ++w) CHECK(got[w] == serial);
}

TEST_CASE("from_memory validates its buffer") {
  CHECK_THROWS_AS(FileMatrix::from_memory(2, 2, {1, 2, 3}), RangeError);
  const FileMatrix m = FileMatrix::from_memory(1, 2, {1, 2});
  CHECK_FALSE(m.file_backed());
  CHECK(m.col_name(0) == "V1");
}
