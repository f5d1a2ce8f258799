#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covgrid/keys.hpp"

namespace covgrid {

// Open-addressing map from canonical keys to dense cell ids. Sized for tens
// of millions of entries; reserve() avoids rehash spikes on big builds.
class KeyIdMap {
public:
    KeyIdMap() { rehash(1 << 12); }

    void reserve(size_t n);
    // Returns the existing id, or inserts and returns `id`.
    uint32_t insert_or_get(const Key128& k, uint32_t id);
    std::optional<uint32_t> find(const Key128& k) const;
    size_t size() const { return size_; }
    void clear_and_free();

private:
    void rehash(size_t cap);
    size_t slot(const Key128& k) const {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(key_mix(k)) * cap_) >> 64);
    }

    std::vector<Key128> keys_; // hi == ~0ull marks an empty slot
    std::vector<uint32_t> vals_;
    size_t cap_ = 0;
    size_t size_ = 0;
};

// Graded polyhedral-complex store, dimensions 0..3. Cells are append-only
// with dense ids in insertion order of first occurrence; add_cell dedups by
// canonical label. Serialization re-sorts cells by (dimension, label).
class CellComplex {
public:
    static constexpr uint32_t npos = UINT32_MAX;

    uint32_t add_cell(int dim, std::span<const uint32_t> boundary,
                      const Key128& label, CellClass cls);
    std::optional<uint32_t> find(const Key128& label) const { return index_.find(label); }

    size_t size() const { return key_.size(); }
    int64_t count(int dim) const { return counts_[dim]; }
    int top_dimension() const;

    int dim_of(uint32_t id) const { return dim_[id]; }
    CellClass class_of(uint32_t id) const { return class_[id]; }
    const Key128& key_of(uint32_t id) const { return key_[id]; }
    std::span<const uint32_t> boundary(uint32_t id) const {
        return {bnd_.data() + bnd_off_[id], bnd_off_[id + 1] - bnd_off_[id]};
    }

    void reserve(size_t cells, size_t boundary_entries);
    // Drops the dedup index; find() stops working, memory is returned.
    void seal();

    // Dense ids of all d-cells, ascending.
    std::vector<uint32_t> cells_of_dim(int dim) const;
    // CSR coboundary: for each d-cell (indexed by its position in
    // cells_of_dim(d)), the ids of the (d+1)-cells containing it.
    struct Coboundary {
        std::vector<uint32_t> off;
        std::vector<uint32_t> inc;
        std::vector<uint32_t> row_of; // cell id -> row index (npos elsewhere)
        std::span<const uint32_t> cofaces(uint32_t row) const {
            return {inc.data() + off[row], off[row + 1] - off[row]};
        }
    };
    Coboundary coboundary(int dim) const;

    int64_t euler_characteristic() const;

    // Betti numbers over F2 up to max_dim: b_d = n_d - rank d_d - rank d_{d+1},
    // rank d_1 by spanning forest, higher boundary ranks by sparse column
    // reduction. b_0 is cross-checked against graph-traversal components.
    std::vector<int64_t> betti(int max_dim = 3) const;

    struct Components {
        int64_t count = 0;
        std::vector<Key128> representatives; // smallest vertex label per component
    };
    Components components() const;

    // Torsion coefficients of integral H1 (invariant factors > 1 of the
    // signed second boundary matrix). Guarded by a cell cap.
    std::vector<int64_t> integral_h1_torsion(size_t max_cells = 200000) const;

    // Checks dd = 0 and grading; returns an error description or empty.
    std::string validate_boundaries() const;

    // Byte-deterministic serializations in canonical (dimension, label) order.
    void serialize_binary(std::ostream& os) const;
    void serialize_json(std::ostream& os) const;

    // Signed boundary of a 2-cell as (edge id, +-1) pairs, from a walk of its
    // boundary polygon.
    std::vector<std::pair<uint32_t, int>> oriented_boundary(uint32_t id) const;

private:
    std::vector<uint32_t> canonical_order() const;

    std::vector<uint8_t> dim_;
    std::vector<CellClass> class_;
    std::vector<Key128> key_;
    std::vector<uint64_t> bnd_off_{0};
    std::vector<uint32_t> bnd_;
    int64_t counts_[4] = {0, 0, 0, 0};
    KeyIdMap index_;
    bool sealed_ = false;
    bool canonical_ = true; // insertions so far are in (dim, label) order
    Key128 last_key_{0, 0};
    int last_dim_ = -1;
};

} // namespace covgrid
