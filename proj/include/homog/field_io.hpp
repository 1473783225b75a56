#pragma once

#include <string>

#include "homog/grid.hpp"

namespace homog {

// Binary field container, trivially parseable from any language:
//   bytes 0..3   magic "HGF1"
//   u16          format version (currently 1)
//   u16          dimension d (2 or 3)
//   u32 * d      per-axis cell counts, axis order
//   f64          grid spacing h
//   u8           domain kind (0 torus, 1 slab, 2 box, 3 corner box)
//   f64 * cells  payload, row-major with the last axis fastest
// All integers and doubles are little-endian regardless of the host. The
// container carries no origin; loaded grids are anchored at zero.
void dump_field(const ScalarField& f, DomainKind kind, const std::string& path);

struct LoadedField {
  ScalarField field;
  DomainKind kind = DomainKind::Torus;
};

// Parses and validates a container written by dump_field. Throws Error on
// magic/version mismatch, malformed geometry, or truncated/oversized payload.
LoadedField load_field(const std::string& path);

}  // namespace homog
