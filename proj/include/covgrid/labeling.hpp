#pragma once

#include <cstdint>
#include <vector>

#include "covgrid/keys.hpp"
#include "covgrid/patrol.hpp"

namespace covgrid {

// One of the (A+1)! ways to pick a patroller and pin the remaining A agents
// to the A cells. Corresponds to the permutation (patroller, assignment...)
// in lexicographic order.
struct Labeling {
    int patroller = 0;               // agent label, 1-based
    std::vector<uint8_t> assignment; // cell index -> agent label
};

uint64_t factorial(int n);
uint64_t binomial(int n, int k);
uint64_t falling(int n, int k); // n (n-1) ... (n-k+1)

// Lexicographic permutation of 1..n with the given rank (factorial number
// system); rank 0 is the identity.
std::vector<uint8_t> perm_unrank(int n, uint64_t rank);
// Lexicographic rank-r k-subset of 1..n, ascending.
std::vector<uint8_t> comb_unrank(int n, int k, uint64_t rank);

// Deterministic, splittable stream over a rank range of labelings.
class LabelingStream {
public:
    LabelingStream(int A, uint64_t begin, uint64_t end);
    bool next(Labeling& out);
    uint64_t remaining() const { return end_ - rank_; }
    static uint64_t total(int A) { return factorial(A + 1); }

private:
    int A_;
    uint64_t rank_, end_;
    std::vector<uint8_t> perm_;
};

// Full stream; rejects A < 2 (a single-cell domain has no movement at all,
// and the gluing recipe is undefined there).
LabelingStream enumerate_labelings(int A);

// --- canonical key builders -------------------------------------------------
// `placement_lo` packs one nibble per agent label: the cell it occupies, the
// position along a crossing, or 0xF for the patroller (see keys.hpp).

namespace keybuild {

inline Key128 overlap_vertex(uint64_t placement_lo) {
    return {static_cast<uint64_t>(CellClass::OverlapVertex) << 56, placement_lo};
}
inline Key128 q_edge(uint64_t placement_lo, int edge_idx) {
    return {static_cast<uint64_t>(CellClass::QEdge) << 56 |
                static_cast<uint64_t>(edge_idx),
            placement_lo};
}
inline Key128 q_square(uint64_t placement_lo, int square_idx) {
    return {static_cast<uint64_t>(CellClass::Square) << 56 |
                static_cast<uint64_t>(square_idx),
            placement_lo};
}
inline Key128 q_cube(uint64_t placement_lo, int cube_idx) {
    return {static_cast<uint64_t>(CellClass::Cube) << 56 |
                static_cast<uint64_t>(cube_idx),
            placement_lo};
}
inline uint64_t perm_hi(CellClass cls, int crossing, uint32_t mask, int k = 0,
                        int l = 0) {
    return static_cast<uint64_t>(cls) << 56 |
           static_cast<uint64_t>(crossing) << 48 |
           static_cast<uint64_t>(mask) << 32 | static_cast<uint64_t>(k) << 24 |
           static_cast<uint64_t>(l) << 16;
}
inline Key128 perm_vertex(uint64_t lo, int crossing, uint32_t mask) {
    return {perm_hi(CellClass::PermVertex, crossing, mask), lo};
}
inline Key128 half_edge(uint64_t lo, int crossing, uint32_t mask, int k) {
    return {perm_hi(CellClass::HalfEdge, crossing, mask, k), lo};
}
inline Key128 swarm_edge(uint64_t lo, int crossing, uint32_t mask, int k, int l) {
    return {perm_hi(CellClass::SwarmEdge, crossing, mask, k, l), lo};
}
inline Key128 triangle(uint64_t lo, int crossing, uint32_t mask, int k, int l) {
    return {perm_hi(CellClass::Triangle, crossing, mask, k, l), lo};
}

} // namespace keybuild

// --- identification rules ----------------------------------------------------
// These produce the canonical labels under which cells from different pieces
// coincide. `off_lo` packs the off-crossing agents (cell-index nibbles);
// `arr` lists the on-crossing agents by position (index 0 = first cell).

// Rule (a): the patroller of L standing on `cell` overlaps agent L(cell);
// the label is symmetric in the two.
Key128 rule_a_overlap(const Labeling& L, int cell);

// Rule (b): the midpoint for transposition position k (1-based) of
// arrangement `arr` is the overlap of arr[k-1], arr[k] on the k-th crossing
// cell, with the remaining on-crossing agents packed onto the other cells in
// arrangement order.
Key128 rule_b_midpoint(const CrossingSet::Crossing& X, const std::vector<uint8_t>& arr,
                       int k, uint64_t off_lo);

// Rule (c): the Single shift at positions (k, k+1) of `arr` is the QEdge
// with patroller arr[k], agents arr[0..k-1] on cells 1..k and
// arr[k+1..] on cells k+1..i, moving along the crossing edge (k, k+1).
Key128 rule_c_single_shift(const PatrolRegion& q, const CrossingSet::Crossing& X,
                           const std::vector<uint8_t>& arr, int k, uint64_t off_lo);

// Packed placement of a full labeling (all pinned agents on their cells).
uint64_t assignment_lo(const Labeling& L);

} // namespace covgrid
