#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covgrid/cell_complex.hpp"
#include "covgrid/permutahedron.hpp"

namespace covgrid {

// Exact rational radius; denominator kept positive.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;
    bool positive() const { return num > 0; }
    std::string str() const;
};

Rational parse_rational(const std::string& text); // "p/q" or "p"

// Excess number k = n - ceil(1/(2r)), computed with exact integer ceiling.
// nullopt means the covering space is empty (k < 0).
std::optional<int> excess(int n, const Rational& r);

// The 1D covering model: the excess-k skeleton of Pi_{n-1}.
struct IntervalModel {
    int n = 0;
    Rational r;
    bool empty = false;
    int k = -1;
    std::vector<int64_t> counts; // faces per dimension 0..k
    int64_t euler = 0;
    // Homology is computed when the skeleton fits the graded store (k <= 3);
    // larger skeletons report counts and chi only.
    std::optional<std::vector<int64_t>> betti;
    std::optional<CellComplex> complex;
};

IntervalModel interval_model(int n, const Rational& r);

// The k-skeleton as a labeled cell complex (k <= 3).
CellComplex skeleton_complex(const FaceLattice& fl);

} // namespace covgrid
