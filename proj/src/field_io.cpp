#include "homog/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace homog {

namespace {

constexpr char kMagic[4] = {'H', 'G', 'F', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
  const unsigned char* p;
  std::size_t left;

  void need(std::size_t n) {
    if (left < n) throw Error("field container is truncated");
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    left -= 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    left -= 4;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    std::uint8_t v = p[0];
    ++p;
    --left;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    left -= 8;
    return std::bit_cast<double>(bits);
  }
};

}  // namespace

void dump_field(const ScalarField& f, DomainKind kind, const std::string& path) {
  const Grid& g = f.grid;
  std::string buf;
  buf.reserve(32 + 8 * f.v.size());
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u16(buf, static_cast<std::uint16_t>(g.d));
  for (int k = 0; k < g.d; ++k) put_u32(buf, static_cast<std::uint32_t>(g.n[k]));
  put_f64(buf, g.h);
  buf.push_back(static_cast<char>(kind));
  for (double v : f.v) put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("short write to '" + path + "'");
}

LoadedField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  Reader r{bytes.data(), bytes.size()};

  r.need(4);
  if (std::memcmp(r.p, kMagic, 4) != 0) throw Error("'" + path + "' is not a field container");
  r.p += 4;
  r.left -= 4;
  const std::uint16_t version = r.u16();
  if (version != kVersion)
    throw Error("unsupported field container version " + std::to_string(version));
  const std::uint16_t d = r.u16();
  if (d != 2 && d != 3) throw Error("field container dimension must be 2 or 3");

  std::array<int, 3> n{1, 1, 1};
  std::size_t cells = 1;
  for (int k = 0; k < d; ++k) {
    const std::uint32_t nk = r.u32();
    if (nk == 0) throw Error("field container has an empty axis");
    if (nk > Grid::kCellCap || cells > Grid::kCellCap / nk)
      throw Error("field container grid is too large");
    n[k] = static_cast<int>(nk);
    cells *= nk;
  }
  const double h = r.f64();
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("field container spacing must be positive");
  const std::uint8_t kind_byte = r.u8();
  if (kind_byte > 3) throw Error("field container has an unknown domain kind");

  if (r.left != 8 * cells) throw Error("field container payload size mismatch");
  LoadedField out{ScalarField(Grid(d, n, h)), static_cast<DomainKind>(kind_byte)};
  for (std::size_t c = 0; c < cells; ++c) out.field.v[c] = r.f64();
  return out;
}

}  // namespace homog
