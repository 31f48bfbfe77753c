#include "mbdos/table_io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "mbdos/cyclotomic.hpp"

namespace mbdos::table_io {

namespace {

constexpr char kMagic[8] = {'M', 'B', 'D', 'O', 'S', 'T', 'B', 'L'};

class Writer {
 public:
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      buf.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    buf.push_back(static_cast<std::uint8_t>(v));
  }
  void zigzag(std::int64_t v) { varint((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63)); }
  void big(const BigCount& v) {
    BigCount x = v;
    do {
      auto byte = static_cast<std::uint8_t>(static_cast<unsigned>(x & 0x7f));
      x >>= 7;
      if (x != 0) byte |= 0x80;
      buf.push_back(byte);
    } while (x != 0);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> buf;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : p_(data), end_(data + size) {}

  std::uint8_t byte() {
    if (p_ == end_) throw CorruptTable("table: unexpected end of data");
    return *p_++;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const auto b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
    }
    throw CorruptTable("table: varint overflow");
  }
  std::int64_t zigzag() {
    const auto v = varint();
    return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
  }
  BigCount big() {
    BigCount v = 0;
    unsigned shift = 0;
    for (;;) {
      const auto b = byte();
      v |= BigCount(b & 0x7f) << shift;
      shift += 7;
      if (!(b & 0x80)) return v;
    }
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  int small_int(const char* what) {
    const auto v = varint();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
      throw CorruptTable(std::string("table: field out of range: ") + what);
    return static_cast<int>(v);
  }
  bool done() const { return p_ == end_; }

 private:
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t size) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    c = ::crc32(c, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

std::vector<std::uint8_t> encode(const genfunc::CoefficientTable& table) {
  Writer w;
  w.buf.insert(w.buf.end(), std::begin(kMagic), std::end(kMagic));
  w.u32(kFormatVersion);
  const auto& p = table.params();
  w.varint(p.L);
  w.varint(p.n_max);
  w.varint(p.R);
  w.varint(p.level_begin);
  w.varint(p.level_end);
  w.varint(p.sectors.size());
  for (int q : p.sectors) w.varint(q);
  for (int phi : table.layout().phis()) w.varint(phi);
  w.varint(table.size());
  for (const auto& e : table.entries()) {
    w.varint(e.key.particles);
    for (auto v : e.key.inv) w.zigzag(v);
    w.big(e.count);
  }
  w.u32(crc32(w.buf));
  return std::move(w.buf);
}

genfunc::CoefficientTable decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kMagic + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw CorruptTable("table: bad magic");
  const std::size_t body = bytes.size() - 4;
  Reader trailer(bytes.data() + body, 4);
  if (trailer.u32() != crc32(bytes.data(), body)) throw CorruptTable("table: checksum mismatch");

  Reader r(bytes.data() + sizeof kMagic, body - sizeof kMagic);
  const auto version = r.u32();
  if (version != kFormatVersion)
    throw VersionMismatch("table: format version " + std::to_string(version) + " (expected " +
                          std::to_string(kFormatVersion) + ")");
  genfunc::TableParams p;
  p.L = r.small_int("L");
  p.n_max = r.small_int("N_max");
  p.R = r.small_int("R");
  p.level_begin = r.small_int("level_begin");
  p.level_end = r.small_int("level_end");
  const int ns = r.small_int("sector count");
  if (p.L < 1 || ns > p.L) throw CorruptTable("table: inconsistent header");
  for (int i = 0; i < ns; ++i) p.sectors.push_back(r.small_int("sector"));
  int width = 0;
  for (int i = 0; i < ns; ++i) {
    const int phi = r.small_int("phi");
    if (p.sectors[i] < 1 || p.L % p.sectors[i] != 0 || phi != cyclo::totient(p.sectors[i]))
      throw CorruptTable("table: totient table does not match sectors");
    width += phi;
  }
  const auto count = r.varint();
  std::vector<genfunc::Entry> entries;
  entries.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    genfunc::Entry e;
    e.key.particles = r.small_int("particles");
    e.key.inv.resize(width);
    for (auto& v : e.key.inv) {
      const auto z = r.zigzag();
      if (z < std::numeric_limits<std::int32_t>::min() || z > std::numeric_limits<std::int32_t>::max())
        throw CorruptTable("table: invariant out of range");
      v = static_cast<std::int32_t>(z);
    }
    e.count = r.big();
    entries.push_back(std::move(e));
  }
  if (!r.done()) throw CorruptTable("table: trailing bytes");
  try {
    return genfunc::CoefficientTable(std::move(p), std::move(entries));
  } catch (const std::invalid_argument& ex) {
    throw CorruptTable(std::string("table: ") + ex.what());
  }
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  // write-then-rename so readers never observe a partial file
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_file(const std::string& path, const genfunc::CoefficientTable& table) { write_bytes(path, encode(table)); }

genfunc::CoefficientTable read_file(const std::string& path) { return decode(read_bytes(path)); }

}  // namespace mbdos::table_io
