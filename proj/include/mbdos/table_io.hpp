#pragma once

// Compact binary encoding of coefficient tables.
//
// Layout (all integers LEB128 varints unless noted):
//   "MBDOSTBL"  8-byte magic
//   version     u32 little-endian
//   L, N_max, R, level_begin, level_end
//   |S|, then q_i for each kept sector, then phi(q_i) for each
//   entry count
//   entries sorted by key: particles, zig-zag invariants, count (LEB128, unbounded)
//   crc32       u32 little-endian over all preceding bytes

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbdos/genfunc.hpp"

namespace mbdos::table_io {

inline constexpr std::uint32_t kFormatVersion = 1;

/// Checksum or structural failure while decoding.
class CorruptTable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header names a different format version; never migrated.
class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const genfunc::CoefficientTable& table);
genfunc::CoefficientTable decode(const std::vector<std::uint8_t>& bytes);

void write_file(const std::string& path, const genfunc::CoefficientTable& table);
genfunc::CoefficientTable read_file(const std::string& path);

std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

std::uint32_t crc32(const std::uint8_t* data, std::size_t size);
inline std::uint32_t crc32(const std::vector<std::uint8_t>& v) { return crc32(v.data(), v.size()); }

}  // namespace mbdos::table_io
