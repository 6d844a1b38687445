#pragma once

#include <stdexcept>
#include <string>

#include "rsvd/common.hpp"

namespace rsvd::io {

/// I/O failure carrying the offending path in the message.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(what + " (" + path + ")") {}
};

/// CSV matrix format: a header line "n,m" with the dimensions, then n rows of
/// m comma-separated values. Doubles are written with 17 significant digits,
/// so a write/read round trip is bit-exact.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& a);

/// Binary matrix format: magic "RSVD", u32 version (= 1), u64 n, u64 m,
/// then n*m row-major little-endian float64.
Matrix read_binary_matrix(const std::string& path);
void write_binary_matrix(const std::string& path, const Matrix& a);

/// Reads either format, sniffing the leading "RSVD" magic.
Matrix read_matrix(const std::string& path);

}  // namespace rsvd::io
