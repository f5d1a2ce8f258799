#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace covgrid {

// Cell class tags. The numeric values are baked into canonical keys, so the
// (dimension, key) sort groups cells by class in this order. The boundary
// reduction relies on QEdge < HalfEdge < SwarmEdge.
enum class CellClass : uint8_t {
    Other = 0,
    OverlapVertex = 1,
    PermVertex = 2,
    QEdge = 3,
    HalfEdge = 4,
    SwarmEdge = 5,
    Square = 6,
    Triangle = 7,
    Cube = 8,
    OspFace = 9,
};

const char* cell_class_name(CellClass c);

// Canonical 128-bit cell label. Layout:
//   hi bits 56..63  class tag
//   hi bits 48..55  crossing index            (perm-side cells)
//   hi bits 32..47  on-crossing label mask    (perm-side cells)
//   hi bits 24..31  position k                (half edges, shift edges, triangles)
//   hi bits 16..23  position l                (shift edges, triangles)
//   hi bits  0..15  patrol edge/square/cube index (Q-side cells)
//   lo  4-bit slot per agent label (label L occupies bits 4(L-1)..4L-1):
//       cell index, position along the crossing, or 0xF for the patroller
// Supports up to 14 cells and 15 labels, which is far beyond what the
// factorial-sized complexes allow in practice.
struct Key128 {
    uint64_t hi = 0;
    uint64_t lo = 0;

    friend bool operator==(const Key128& a, const Key128& b) {
        return a.hi == b.hi && a.lo == b.lo;
    }
    friend bool operator!=(const Key128& a, const Key128& b) { return !(a == b); }
    friend bool operator<(const Key128& a, const Key128& b) {
        return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
    }

    CellClass cell_class() const { return static_cast<CellClass>(hi >> 56); }
    std::string hex() const;
};

constexpr int kMaxCells = 14;   // keyed cell indices fit in a nibble (0xF reserved)
constexpr int kMaxLabels = 15;  // agent labels 1..15 fit in 15 nibbles

constexpr uint64_t slot_nibble(int label, uint64_t value) {
    return value << (4 * (label - 1));
}

inline uint64_t key_mix(const Key128& k) {
    uint64_t x = k.hi * 0x9e3779b97f4a7c15ULL ^ k.lo;
    x ^= x >> 32;
    x *= 0xd6e8feb86659fd93ULL;
    x ^= x >> 32;
    x *= 0xd6e8feb86659fd93ULL;
    x ^= x >> 32;
    return x;
}

struct Key128Hash {
    size_t operator()(const Key128& k) const { return static_cast<size_t>(key_mix(k)); }
};

inline int key_dimension(CellClass c) {
    switch (c) {
    case CellClass::OverlapVertex:
    case CellClass::PermVertex: return 0;
    case CellClass::QEdge:
    case CellClass::HalfEdge:
    case CellClass::SwarmEdge: return 1;
    case CellClass::Square:
    case CellClass::Triangle: return 2;
    case CellClass::Cube: return 3;
    default: return -1; // Other/OspFace carry no intrinsic dimension
    }
}

} // namespace covgrid
