#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covgrid {

// Lattice coordinate of a unit plaque: (x, y, z), z = 0 in 2D.
// x grows rightward along a text row, y downward across rows, z across layers.
using Cell = std::array<int32_t, 3>;

// Canonical cell order: (z, y, x) lexicographic, i.e. reading order.
struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const {
        if (a[2] != b[2]) return a[2] < b[2];
        if (a[1] != b[1]) return a[1] < b[1];
        return a[0] < b[0];
    }
};

struct GridDomain {
    int dim = 2;                 // 2 or 3
    std::vector<Cell> cells;     // sorted by CellOrder, normalized to origin
    std::string name;

    int cell_count() const { return static_cast<int>(cells.size()); }
    // Index of a cell in the canonical order, or -1 if absent.
    int cell_index(const Cell& c) const;
    bool contains(const Cell& c) const { return cell_index(c) >= 0; }
};

struct DomainSummary {
    int A = 0;
    int dim = 2;
    int64_t euler = 0;               // chi of the cubical complex spanned by the plaques
    std::optional<int64_t> holes_g;  // 2D: 1 - chi; 3D: only when unambiguous
    Cell bbox_min{0, 0, 0};
    Cell bbox_max{0, 0, 0};
};

// Parses the ASCII format ('#' plaque, '.' empty; rows top to bottom; 3D
// layers separated by one blank line) or the JSON alternative
// {"dim": d, "cells": [[..], ..]}. Rejects empty or disconnected input.
GridDomain parse_domain(const std::string& text, const std::string& name = "");

// ASCII serialization; parse(serialize(g)) == g on the cell set.
std::string serialize_domain(const GridDomain& g);

DomainSummary domain_summary(const GridDomain& g);

// Random connected domain with A cells and, for 2D, exactly g holes.
// Deterministic in (A, g, seed). Throws Infeasible when A < 5g + 3 (g >= 1);
// a g-hole domain needs g interior cells with disjoint-enough neighborhoods.
GridDomain random_domain(int A, int g, uint64_t seed);

// Constructs a solid box domain, a convenience for tests and the CLI.
GridDomain box_domain(int nx, int ny, int nz = 1);

} // namespace covgrid
