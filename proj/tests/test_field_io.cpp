#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "homog/field_io.hpp"
#include "homog/grid.hpp"

using namespace homog;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("homog_io_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  REQUIRE(bool(out));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ScalarField ramp_field(const Grid& g) {
  ScalarField f(g);
  for (std::size_t c = 0; c < g.cells(); ++c)
    f[c] = 0.5 * static_cast<double>(c) - 3.25;
  // throw in values that stress the byte encoding
  f[0] = -0.0;
  if (g.cells() > 1) f[1] = 1.0 / 3.0;
  return f;
}

}  // namespace

TEST_CASE("field containers round-trip bit-exactly") {
  struct Case {
    Grid g;
    DomainKind kind;
  };
  const Case cases[] = {
      {Grid(2, {7, 5, 1}, 0.25), DomainKind::Torus},
      {Grid(2, {8, 8, 1}, 0.125), DomainKind::Slab},
      {Grid(3, {4, 3, 5}, 0.5), DomainKind::Box},
      {Grid(2, {6, 6, 1}, 1.0 / 6.0), DomainKind::CornerBox},
  };
  int tag = 0;
  for (const Case& tc : cases) {
    const fs::path path = temp_file("roundtrip_" + std::to_string(tag++) + ".hgf1");
    const ScalarField f = ramp_field(tc.g);
    dump_field(f, tc.kind, path.string());

    const LoadedField back = load_field(path.string());
    CHECK(back.kind == tc.kind);
    CHECK(back.field.grid.d == tc.g.d);
    CHECK(back.field.grid.h == tc.g.h);
    for (int k = 0; k < tc.g.d; ++k) CHECK(back.field.grid.n[k] == tc.g.n[k]);
    REQUIRE(back.field.v.size() == f.v.size());
    for (std::size_t c = 0; c < f.v.size(); ++c) {
      // bit-exact: compare representations, not values (covers -0.0)
      std::uint64_t a, b;
      std::memcpy(&a, &f.v[c], 8);
      std::memcpy(&b, &back.field.v[c], 8);
      CHECK(a == b);
    }
    fs::remove(path);
  }
}

TEST_CASE("field container loader rejects malformed bytes") {
  const Grid g(2, {4, 3, 1}, 0.25);
  const fs::path path = temp_file("malformed.hgf1");
  dump_field(ramp_field(g), DomainKind::Box, path.string());
  const std::string good = slurp(path);

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_field(temp_file("does_not_exist.hgf1").string()), Error);
  }
  SUBCASE("wrong magic") {
    std::string bad = good;
    bad[0] = 'X';
    spit(path, bad);
    CHECK_THROWS_WITH_AS(load_field(path.string()),
                         doctest::Contains("not a field container"), Error);
  }
  SUBCASE("big-endian writer is rejected at the version check") {
    // version 1 written big-endian reads as 256 on the wire
    std::string bad = good;
    bad[4] = 0;
    bad[5] = 1;
    spit(path, bad);
    CHECK_THROWS_WITH_AS(load_field(path.string()),
                         doctest::Contains("unsupported field container version"),
                         Error);
  }
  SUBCASE("truncated header") {
    spit(path, good.substr(0, 9));
    CHECK_THROWS_WITH_AS(load_field(path.string()), doctest::Contains("truncated"),
                         Error);
  }
  SUBCASE("truncated payload") {
    spit(path, good.substr(0, good.size() - 5));
    CHECK_THROWS_WITH_AS(load_field(path.string()),
                         doctest::Contains("payload size mismatch"), Error);
  }
  SUBCASE("trailing garbage") {
    spit(path, good + "zz");
    CHECK_THROWS_WITH_AS(load_field(path.string()),
                         doctest::Contains("payload size mismatch"), Error);
  }
  SUBCASE("unknown domain kind byte") {
    std::string bad = good;
    // header: magic(4) version(2) d(2) n0(4) n1(4) h(8) kind(1)
    bad[4 + 2 + 2 + 8 + 8] = 7;
    spit(path, bad);
    CHECK_THROWS_WITH_AS(load_field(path.string()),
                         doctest::Contains("domain kind"), Error);
  }
  SUBCASE("oversized extents fail before allocation") {
    std::string bad = good.substr(0, 4 + 2 + 2);
    for (int rep = 0; rep < 2; ++rep)
      for (int b = 0; b < 4; ++b) bad += static_cast<char>(0xF0);  // ~4e9 each axis
    bad += good.substr(4 + 2 + 2 + 8);
    spit(path, bad);
    CHECK_THROWS_AS(load_field(path.string()), Error);
  }
  SUBCASE("zero extent") {
    std::string bad = good;
    for (int b = 0; b < 4; ++b) bad[4 + 2 + 2 + b] = 0;
    spit(path, bad);
    CHECK_THROWS_AS(load_field(path.string()), Error);
  }
  fs::remove(path);
}

TEST_CASE("field container dump writes the documented little-endian layout") {
  Grid g(2, {2, 1, 1}, 0.5);
  ScalarField f(g);
  f[0] = 1.0;
  f[1] = -2.0;
  const fs::path path = temp_file("layout.hgf1");
  dump_field(f, DomainKind::Slab, path.string());
  const std::string bytes = slurp(path);

  REQUIRE(bytes.size() == 4 + 2 + 2 + 4 + 4 + 8 + 1 + 16);
  CHECK(bytes.substr(0, 4) == "HGF1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);   // version lo
  CHECK(static_cast<unsigned char>(bytes[5]) == 0);   // version hi
  CHECK(static_cast<unsigned char>(bytes[6]) == 2);   // d lo
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);   // n0 lo
  CHECK(static_cast<unsigned char>(bytes[12]) == 1);  // n1 lo
  // h = 0.5 -> IEEE-754 bytes 00..e0 3f little-endian
  CHECK(static_cast<unsigned char>(bytes[16 + 6]) == 0xe0);
  CHECK(static_cast<unsigned char>(bytes[16 + 7]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[24]) == 1);  // slab
  // payload doubles: 1.0 then -2.0
  CHECK(static_cast<unsigned char>(bytes[25 + 7]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[25 + 6]) == 0xf0);
  CHECK(static_cast<unsigned char>(bytes[33 + 7]) == 0xc0);
  fs::remove(path);
}
