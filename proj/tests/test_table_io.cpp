#include <doctest.h>

#include <filesystem>

#include "mbdos/genfunc.hpp"
#include "mbdos/table_io.hpp"

using namespace mbdos;
using namespace mbdos::table_io;

TEST_CASE("round trip") {
  for (int R : {1, 3}) {
    const auto t = genfunc::expand(10, 3, R, genfunc::drop_top_sectors(10, 1));
    const auto bytes = encode(t);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "MBDOSTBL");
    CHECK(decode(bytes) == t);
    CHECK(encode(decode(bytes)) == bytes);
  }
  const auto partial = genfunc::expand_levels(8, 2, 2, {8, 2}, 3, 6);
  CHECK(decode(encode(partial)) == partial);
}

TEST_CASE("counts beyond 64 bits survive") {
  const BigCount huge = BigCount(1) << 100;
  const genfunc::CoefficientTable t({3, 1, 1, {}, 0, 3}, {{{0, {}}, 1}, {{1, {}}, huge}});
  CHECK(decode(encode(t)).count({1, {}}) == huge);
}

TEST_CASE("every single-byte corruption is detected") {
  const auto t = genfunc::expand(6, 2, 1, {6, 3});
  const auto bytes = encode(t);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    auto bad = bytes;
    bad[i] ^= 0x5a;
    CHECK_THROWS_AS((void)decode(bad), std::runtime_error);
  }
  auto shorter = bytes;
  shorter.pop_back();
  CHECK_THROWS_AS((void)decode(shorter), CorruptTable);
  CHECK_THROWS_AS((void)decode({}), CorruptTable);
}

TEST_CASE("version mismatch is rejected") {
  auto bytes = encode(genfunc::expand(4, 1, 1, {4}));
  bytes[8] = 2;  // version, little endian
  // Fix the trailer so only the version is wrong.
  const auto crc = crc32(bytes.data(), bytes.size() - 4);
  for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
  CHECK_THROWS_AS((void)decode(bytes), VersionMismatch);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "mbdos_table_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "t.tbl").string();
  const auto t = genfunc::expand(9, 3, 3, {9, 3});
  write_file(path, t);
  CHECK(read_file(path) == t);
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS(read_file((dir / "missing.tbl").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("crc32 check value") {
  const std::string s = "123456789";
  CHECK(crc32(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()) == 0xCBF43926u);
}
