#include "rsvd/matrix_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace rsvd::io {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'V', 'D'};
constexpr std::uint32_t kVersion = 1;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "missing header line");
  Index n = 0, m = 0;
  char comma = 0;
  std::istringstream header(line);
  if (!(header >> n >> comma >> m) || comma != ',' || n < 1 || m < 1)
    throw IoError(path, "malformed header, expected 'n,m'");
  Matrix a(n, m);
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw IoError(path, "unexpected end of file");
    std::istringstream row(line);
    std::string cell;
    for (Index j = 0; j < m; ++j) {
      if (!std::getline(row, cell, ',')) throw IoError(path, "short row");
      try {
        a(i, j) = std::stod(cell);
      } catch (const std::exception&) {
        throw IoError(path, "bad value '" + cell + "'");
      }
    }
  }
  return a;
}

void write_csv_matrix(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  out << a.rows() << ',' << a.cols() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

Matrix read_binary_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0, m = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path, "not a binary matrix file (bad magic)");
  if (version != kVersion) throw IoError(path, "unsupported version");
  if (n < 1 || m < 1 || n * m > (1ull << 34))
    throw IoError(path, "implausible dimensions");
  Matrix a(static_cast<Index>(n), static_cast<Index>(m));
  std::vector<double> row(m);
  for (std::uint64_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(m * sizeof(double)));
    if (!in) throw IoError(path, "truncated data section");
    for (std::uint64_t j = 0; j < m; ++j)
      a(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
  }
  return a;
}

void write_binary_matrix(const std::string& path, const Matrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  const std::uint64_t n = static_cast<std::uint64_t>(a.rows());
  const std::uint64_t m = static_cast<std::uint64_t>(a.cols());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  std::vector<double> row(m);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < m; ++j)
      row[j] = a(static_cast<Index>(i), static_cast<Index>(j));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(m * sizeof(double)));
  }
  if (!out) throw IoError(path, "write failed");
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (std::memcmp(magic, kMagic, 4) == 0) return read_binary_matrix(path);
  return read_csv_matrix(path);
}

}  // namespace rsvd::io
