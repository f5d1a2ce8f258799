#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covgrid/cell_complex.hpp"

namespace covgrid {

// Discrete matching on the (edge, 2-cell) layer. No vertex is ever matched,
// so the critical complex is the graph of all vertices plus the unmatched
// edges, and its boundary map is the restriction of the original one.
struct MorseMatching {
    enum class Rule : uint8_t {
        TriangleSwarm = 0,   // triangle paired with its swarm edge
        TriangleHalf = 1,    // triangle paired with its larger half-edge
        SquareSeed = 2,      // square paired with an initially free rim edge
        SquareWavefront = 3, // square reached by peeling
    };

    std::vector<uint32_t> edge_of; // pair index -> edge id
    std::vector<uint32_t> face_of; // pair index -> 2-cell id
    std::vector<Rule> rule_of;
    std::vector<uint32_t> pair_of_face; // 2-cell id -> pair index or npos
    std::vector<uint32_t> pair_of_edge; // edge id -> pair index or npos

    static constexpr uint32_t npos = UINT32_MAX;
    size_t size() const { return edge_of.size(); }
};

// Swarm triangles take their swarm edge; Single triangles take the half-edge
// past the moving pair; squares are peeled from free rim edges inward.
// Rejects complexes with 3-cells.
MorseMatching build_matching(const CellComplex& cx);

struct MatchingReport {
    bool valid = false;    // incident pairs, each cell in at most one
    bool acyclic = false;  // no directed cycle among matched 2-cells
    bool complete = false; // every 2-cell is matched
    uint64_t matched_faces = 0;
    uint64_t faces = 0;
    std::string detail;
};

MatchingReport verify_matching(const CellComplex& cx, const MorseMatching& m);

struct MorseSummary {
    int64_t critical_vertices = 0;
    int64_t critical_edges = 0;
    int64_t critical_faces = 0;
    int64_t euler = 0;
    std::vector<int64_t> betti; // graph homology of the critical complex
};

MorseSummary morse_complex(const CellComplex& cx, const MorseMatching& m);

// Greedy elementary-collapse order over the matched pairs: a pair collapses
// once its edge has a single remaining 2-cell coface. Succeeds for every
// acyclic complete matching.
struct CollapseSchedule {
    bool success = false;
    uint64_t steps = 0;
    std::string detail;
};

CollapseSchedule free_collapse_schedule(const CellComplex& cx, const MorseMatching& m);

} // namespace covgrid
