#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "covgrid/cell_complex.hpp"
#include "covgrid/grid_domain.hpp"
#include "covgrid/labeling.hpp"
#include "covgrid/patrol.hpp"

namespace covgrid {

// Cell counts by class. With cells capped at 14 and labels at 15, every
// count and every formula term stays far below 2^63; arithmetic is checked.
struct CountReport {
    int64_t v_overlap = 0;
    int64_t v_perm = 0;
    int64_t e_q = 0;
    int64_t e_half = 0;
    int64_t e_swarm = 0;
    int64_t sigma_s = 0;
    int64_t sigma_t = 0;
    int64_t cubes = 0;

    int64_t v() const { return v_overlap + v_perm; }
    int64_t e() const { return e_q + e_half + e_swarm; }
    int64_t f() const { return sigma_s + sigma_t; }
    int64_t total() const { return v() + e() + f() + cubes; }
    int64_t euler() const { return v() - e() + f() - cubes; }
};

struct BuildOptions {
    enum class Mode { Full, Census };
    Mode mode = Mode::Full;
    int threads = 1;
    uint64_t max_cells = 50'000'000; // Full mode cap
    // Glue interval attachments on length-1 crossings too. They add matched
    // (vertex, edge) pairs only, so every count check is chi-neutral.
    bool include_degenerate = false;
};

// Emission-multiplicity verification gathered while deduplicating: each
// overlap vertex must arrive exactly twice from patrol instances and once
// per non-degenerate crossing through its cell; each q-edge exactly once
// from its patrol instance and once as a Single shift, with agreeing
// boundaries; every other label exactly once.
struct MultiplicityCheck {
    bool ok = true;
    std::string detail;
    uint64_t ov_patrol_emissions = 0;
    uint64_t ov_midpoint_emissions = 0;
    uint64_t qedge_patrol_emissions = 0;
    uint64_t qedge_shift_emissions = 0;
};

struct BuildResult {
    BuildOptions::Mode mode = BuildOptions::Mode::Full;
    CountReport built;
    MultiplicityCheck multiplicity;
    std::optional<CellComplex> complex; // Full mode only
};

// Executes the gluing recipe over all (A+1)! labelings and all
// (crossing, off-crossing labeling) pairs. Full mode seals a CellComplex;
// Census mode streams class counts with arithmetic deduplication. The result
// is byte-deterministic and independent of the thread count.
BuildResult build_covering_complex(const GridDomain& g, const BuildOptions& opt = {});

// Closed-form cell counts for 2D domains. The first edge summand implements
// sum_i n_i (i-1) (A+1)!; see the README note on the corrected term.
// Exact int64 arithmetic bounds this to 18 cells.
CountReport predicted_cell_counts(const DomainSummary& s, const CrossingSet& c,
                                  const PatrolRegion& q);

// chi = (chi(G) - A/2) (A+1)!, evaluated exactly in 128 bits so that
// formula-only domains far beyond buildable size still report exact values.
struct EulerPrediction {
    std::optional<int64_t> chi; // present when the value fits 64 bits
    std::string chi_decimal;    // always the exact value
    bool conjecture = false;    // 3D: conjectural extension, not a proved theorem
};
EulerPrediction predicted_euler(const DomainSummary& s);

struct CompareReport {
    bool class_residuals = false; // true when per-class residuals are meaningful (2D)
    int64_t d_v_overlap = 0, d_v_perm = 0;
    int64_t d_e_q = 0, d_e_half = 0, d_e_swarm = 0;
    int64_t d_sigma_s = 0, d_sigma_t = 0;
    int64_t d_euler = 0;
    bool pass = false;
};

CompareReport compare_counts(const CountReport& built, const CountReport& predicted);

} // namespace covgrid
