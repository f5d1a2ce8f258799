#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "covgrid/grid_domain.hpp"

namespace covgrid {

// The free patrolling region of a domain: one vertex per cell, one edge per
// face-adjacent pair, one square per full 2x2 axis-plane block, one cube per
// full 2x2x2 block. Vertex indices are the canonical cell indices.
struct PatrolRegion {
    struct Edge {
        int a, b;   // cell indices, a < b
        int axis;   // 0=x, 1=y, 2=z
    };
    struct SquareCell {
        std::array<int, 4> corners; // cell indices
        std::array<int, 4> edges;   // edge indices of the block's sides
        int plane;                  // normal axis: 2 for xy blocks, etc.
    };
    struct CubeCell {
        std::array<int, 8> corners;
        std::array<int, 6> squares; // square indices of the block's faces
    };

    int dim = 2;
    std::vector<Cell> vertices;
    std::vector<Edge> edges;
    std::vector<SquareCell> squares;
    std::vector<CubeCell> cubes;
    int64_t K = 0; // square count, the area of the region

    // Edge index for a face-adjacent cell pair, or -1.
    int edge_index(int a, int b) const;

private:
    friend PatrolRegion patrol_region(const GridDomain&);
    std::map<std::pair<int, int>, int> edge_lookup_;
};

PatrolRegion patrol_region(const GridDomain& g);

// Maximal axis-aligned runs of consecutive cells. Length = vertex count.
struct CrossingSet {
    struct Crossing {
        int axis;
        std::vector<int> cells; // cell indices in increasing coordinate order
        bool degenerate;        // length 1
        int length() const { return static_cast<int>(cells.size()); }
    };

    std::vector<Crossing> crossings;
    std::map<int, int64_t> histogram;                         // merged n_i
    std::array<std::map<int, int64_t>, 3> histogram_by_axis;  // per axis
};

CrossingSet crossings(const PatrolRegion& q);

// Exact check of the 2D identity K = 1 - A + sum_i n_i (i - 1) - g.
struct AreaLemmaReport {
    int64_t lhs_K = 0;
    int64_t rhs = 0;
    int64_t A = 0;
    int64_t crossing_term = 0; // sum_i n_i (i - 1)
    int64_t g = 0;
    bool pass = false;
};

AreaLemmaReport check_area_lemma(const DomainSummary& s, const CrossingSet& c,
                                 const PatrolRegion& q);

} // namespace covgrid
