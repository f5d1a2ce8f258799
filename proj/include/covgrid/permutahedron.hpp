#pragma once

#include <cstdint>
#include <vector>

namespace covgrid {

// 1-skeleton of the permutahedron Pi_{m-1}: vertices are the m! permutations
// of m abstract labels in lexicographic order; edges join permutations that
// differ by one adjacent transposition, tagged with the 1-based position.
struct PermComplex {
    struct Edge {
        uint32_t u, v; // vertex indices, u lexicographically below v
        int pos;       // transposed positions (pos, pos+1)
    };

    int m = 0;
    std::vector<std::vector<uint8_t>> vertices;
    std::vector<Edge> edges;

    // Edge incident to a vertex at a given transposition position.
    uint32_t edge_at(uint32_t vertex, int pos) const {
        return incident_[vertex * (m - 1) + pos - 1];
    }

    std::vector<uint32_t> incident_; // filled by skel1
};

// Labels default to 1..m.
PermComplex skel1(int m);
PermComplex skel1(const std::vector<uint8_t>& labels);

enum class ShiftClass : uint8_t { Single, Swarm };

// Single iff the two transposition positions are adjacent.
ShiftClass classify_shift(const std::vector<uint8_t>& vertex, int k, int l);

// Barycentric subdivision of the 1-skeleton plus the expansion: midpoint per
// edge, two half-edges per edge, shift edges joining the midpoints around
// each vertex, and one triangle per shift edge.
struct ExpandedPerm {
    PermComplex base;

    // midpoint i subdivides base edge i; the canonical endpoint carries the
    // transposed pair in ascending label order
    std::vector<uint32_t> midpoint_canon_vertex;

    struct HalfEdge {
        uint32_t vertex;
        uint32_t base_edge;
        int pos;
    };
    std::vector<HalfEdge> half_edges; // index = vertex*(m-1) + pos-1

    // one triangle per shift edge, with boundary {shift edge, the half-edges
    // at (vertex, k) and (vertex, l)}
    struct ShiftEdge {
        uint32_t vertex;
        int k, l; // k < l
        ShiftClass cls;
    };
    std::vector<ShiftEdge> shift_edges;

    size_t vertex_count() const { return base.vertices.size() + base.edges.size(); }
    size_t half_edge_count() const { return half_edges.size(); }
    size_t shift_edge_count() const { return shift_edges.size(); }
    size_t triangle_count() const { return shift_edges.size(); }
    size_t single_count() const;
    uint32_t half_index(uint32_t vertex, int pos) const {
        return vertex * (base.m - 1) + pos - 1;
    }
};

ExpandedPerm subdivide_and_expand(const PermComplex& p);

// Ordered-set-partition face lattice of Pi_{m-1}, dimensions 0..k. A d-face
// is an ordered partition of the m labels into m-d nonempty blocks.
struct FaceLattice {
    using Osp = std::vector<std::vector<uint8_t>>;
    int m = 0;
    int k = 0;
    std::vector<std::vector<Osp>> faces; // faces[d]
    int64_t face_count(int d) const { return static_cast<int64_t>(faces[d].size()); }
    int64_t euler() const;
};

FaceLattice k_skeleton(int m, int k);

} // namespace covgrid
