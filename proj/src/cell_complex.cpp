#include "covgrid/cell_complex.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "covgrid/errors.hpp"

namespace covgrid {

const char* cell_class_name(CellClass c) {
    switch (c) {
    case CellClass::OverlapVertex: return "overlap_vertex";
    case CellClass::PermVertex: return "perm_vertex";
    case CellClass::QEdge: return "q_edge";
    case CellClass::HalfEdge: return "half_edge";
    case CellClass::SwarmEdge: return "swarm_edge";
    case CellClass::Square: return "square";
    case CellClass::Triangle: return "triangle";
    case CellClass::Cube: return "cube";
    case CellClass::OspFace: return "osp_face";
    default: return "other";
    }
}

std::string Key128::hex() const {
    char buf[36];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return buf;
}

// ---------------------------------------------------------------- KeyIdMap

namespace {
constexpr uint64_t kEmptyHi = ~0ull;
}

void KeyIdMap::rehash(size_t cap) {
    std::vector<Key128> old_keys = std::move(keys_);
    std::vector<uint32_t> old_vals = std::move(vals_);
    keys_.assign(cap, Key128{kEmptyHi, 0});
    vals_.assign(cap, 0);
    cap_ = cap;
    size_ = 0;
    for (size_t i = 0; i < old_keys.size(); ++i)
        if (old_keys[i].hi != kEmptyHi) insert_or_get(old_keys[i], old_vals[i]);
}

void KeyIdMap::reserve(size_t n) {
    size_t want = n + n / 2 + 16; // ~0.67 max load
    if (want > cap_) rehash(want);
}

uint32_t KeyIdMap::insert_or_get(const Key128& k, uint32_t id) {
    if ((size_ + 1) * 4 > cap_ * 3) rehash(cap_ * 2);
    size_t i = slot(k);
    while (keys_[i].hi != kEmptyHi) {
        if (keys_[i] == k) return vals_[i];
        if (++i == cap_) i = 0;
    }
    keys_[i] = k;
    vals_[i] = id;
    ++size_;
    return id;
}

std::optional<uint32_t> KeyIdMap::find(const Key128& k) const {
    size_t i = slot(k);
    while (keys_[i].hi != kEmptyHi) {
        if (keys_[i] == k) return vals_[i];
        if (++i == cap_) i = 0;
    }
    return std::nullopt;
}

void KeyIdMap::clear_and_free() {
    std::vector<Key128>().swap(keys_);
    std::vector<uint32_t>().swap(vals_);
    cap_ = size_ = 0;
}

// -------------------------------------------------------------- CellComplex

uint32_t CellComplex::add_cell(int dim, std::span<const uint32_t> boundary,
                               const Key128& label, CellClass cls) {
    if (dim < 0 || dim > 3)
        throw InputError(ErrorKind::BadBoundaryDimension, "cell dimension out of range");
    if (sealed_) throw std::logic_error("add_cell on a sealed complex");
    uint32_t next = static_cast<uint32_t>(key_.size());
    uint32_t got = index_.insert_or_get(label, next);
    if (got != next) return got; // dedup contract
    for (uint32_t b : boundary) {
        if (b >= key_.size()) {
            throw InputError(ErrorKind::UnknownBoundaryId,
                             "boundary id " + std::to_string(b) + " does not exist");
        }
        if (dim_[b] != dim - 1)
            throw InputError(ErrorKind::BadBoundaryDimension,
                             "boundary of a " + std::to_string(dim) +
                                 "-cell must consist of " + std::to_string(dim - 1) +
                                 "-cells");
    }
    if (canonical_ && !key_.empty() &&
        !(dim > last_dim_ || (dim == last_dim_ && last_key_ < label)))
        canonical_ = false;
    last_dim_ = dim;
    last_key_ = label;

    dim_.push_back(static_cast<uint8_t>(dim));
    class_.push_back(cls);
    key_.push_back(label);
    bnd_.insert(bnd_.end(), boundary.begin(), boundary.end());
    std::sort(bnd_.end() - boundary.size(), bnd_.end());
    bnd_off_.push_back(bnd_.size());
    ++counts_[dim];
    return next;
}

void CellComplex::reserve(size_t cells, size_t boundary_entries) {
    dim_.reserve(cells);
    class_.reserve(cells);
    key_.reserve(cells);
    bnd_off_.reserve(cells + 1);
    bnd_.reserve(boundary_entries);
    index_.reserve(cells);
}

void CellComplex::seal() {
    index_.clear_and_free();
    sealed_ = true;
}

int CellComplex::top_dimension() const {
    for (int d = 3; d >= 0; --d)
        if (counts_[d] > 0) return d;
    return 0;
}

std::vector<uint32_t> CellComplex::cells_of_dim(int dim) const {
    std::vector<uint32_t> out;
    out.reserve(static_cast<size_t>(counts_[dim]));
    for (uint32_t i = 0; i < key_.size(); ++i)
        if (dim_[i] == dim) out.push_back(i);
    return out;
}

CellComplex::Coboundary CellComplex::coboundary(int dim) const {
    Coboundary co;
    std::vector<uint32_t> rows = cells_of_dim(dim);
    co.row_of.assign(key_.size(), npos);
    for (uint32_t r = 0; r < rows.size(); ++r) co.row_of[rows[r]] = r;
    co.off.assign(rows.size() + 1, 0);
    std::vector<uint32_t> upper = cells_of_dim(dim + 1);
    for (uint32_t c : upper)
        for (uint32_t b : boundary(c)) ++co.off[co.row_of[b] + 1];
    for (size_t i = 1; i < co.off.size(); ++i) co.off[i] += co.off[i - 1];
    co.inc.resize(co.off.back());
    std::vector<uint32_t> fill(co.off.begin(), co.off.end() - 1);
    for (uint32_t c : upper)
        for (uint32_t b : boundary(c)) co.inc[fill[co.row_of[b]]++] = c;
    return co;
}

int64_t CellComplex::euler_characteristic() const {
    return counts_[0] - counts_[1] + counts_[2] - counts_[3];
}

namespace {

// XOR-merge of two strictly ascending id lists (symmetric difference).
void xor_merge(const std::vector<uint32_t>& a, const uint32_t* b, size_t nb,
               std::vector<uint32_t>& out) {
    out.clear();
    size_t i = 0, j = 0;
    while (i < a.size() && j < nb) {
        if (a[i] < b[j]) out.push_back(a[i++]);
        else if (b[j] < a[i]) out.push_back(b[j++]);
        else { ++i; ++j; }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b + j, b + nb);
}

struct UnionFind {
    std::vector<int32_t> parent;
    explicit UnionFind(size_t n) : parent(n, -1) {}
    int32_t root(int32_t x) {
        while (parent[x] >= 0) {
            if (parent[parent[x]] >= 0) parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(int32_t a, int32_t b) {
        a = root(a);
        b = root(b);
        if (a == b) return false;
        if (parent[a] > parent[b]) std::swap(a, b); // more negative = bigger
        parent[a] += parent[b];
        parent[b] = a;
        return true;
    }
};

} // namespace

// Rank over F2 of the boundary map from `dim`-cells, by column reduction
// with the largest face id as pivot. The canonical id order makes almost
// every column settle with a fresh pivot on covering complexes: swarm
// triangles pivot on their swarm edge, single-shift triangles on their
// higher midpoint half-edge, squares stay within per-labeling blocks.
static int64_t boundary_rank_f2(const CellComplex& c, int dim) {
    std::vector<int32_t> pivot_owner(c.size(), -1);
    std::vector<uint32_t> pool;
    std::vector<std::pair<uint64_t, uint32_t>> owner_span;
    std::vector<uint32_t> col, merged;
    int64_t rank = 0;

    for (uint32_t id = 0; id < c.size(); ++id) {
        if (c.dim_of(id) != dim) continue;
        auto b = c.boundary(id);
        col.assign(b.begin(), b.end());
        // boundary lists are stored sorted; fold accidental duplicates mod 2
        for (size_t i = 0; i + 1 < col.size();) {
            if (col[i] == col[i + 1]) col.erase(col.begin() + i, col.begin() + i + 2);
            else ++i;
        }
        while (!col.empty()) {
            uint32_t p = col.back();
            int32_t o = pivot_owner[p];
            if (o < 0) {
                pivot_owner[p] = static_cast<int32_t>(owner_span.size());
                owner_span.emplace_back(pool.size(), static_cast<uint32_t>(col.size()));
                pool.insert(pool.end(), col.begin(), col.end());
                ++rank;
                break;
            }
            xor_merge(col, pool.data() + owner_span[o].first, owner_span[o].second,
                      merged);
            col.swap(merged);
        }
    }
    return rank;
}

std::vector<int64_t> CellComplex::betti(int max_dim) const {
    int top = top_dimension();
    int upto = std::min(max_dim, top);

    // rank of d_1 equals |spanning forest| (elimination closed form);
    // components are recomputed independently by traversal below.
    UnionFind uf(key_.size());
    int64_t rank1 = 0;
    for (uint32_t id = 0; id < key_.size(); ++id) {
        if (dim_[id] != 1) continue;
        auto b = boundary(id);
        if (b.size() == 2 && uf.unite(b[0], b[1])) ++rank1;
    }
    int64_t comp_uf = counts_[0] - rank1;
    int64_t comp_bfs = components().count;
    if (comp_uf != comp_bfs)
        throw std::logic_error("component cross-check failed: union-find " +
                               std::to_string(comp_uf) + " vs traversal " +
                               std::to_string(comp_bfs));

    int64_t rank2 = upto >= 1 && counts_[2] > 0 ? boundary_rank_f2(*this, 2) : 0;
    int64_t rank3 = upto >= 2 && counts_[3] > 0 ? boundary_rank_f2(*this, 3) : 0;

    std::vector<int64_t> b;
    b.push_back(comp_uf);
    if (upto >= 1) b.push_back(counts_[1] - rank1 - rank2);
    if (upto >= 2) b.push_back(counts_[2] - rank2 - rank3);
    if (upto >= 3) b.push_back(counts_[3] - rank3);
    return b;
}

CellComplex::Components CellComplex::components() const {
    Components out;
    // vertex adjacency in CSR form
    std::vector<uint32_t> deg(key_.size() + 1, 0);
    for (uint32_t id = 0; id < key_.size(); ++id) {
        if (dim_[id] != 1) continue;
        auto b = boundary(id);
        for (uint32_t v : b) ++deg[v + 1];
    }
    std::vector<uint32_t> off(key_.size() + 1, 0);
    for (size_t i = 1; i <= key_.size(); ++i) off[i] = off[i - 1] + deg[i];
    std::vector<uint32_t> adj(off.back());
    std::vector<uint32_t> fill(off.begin(), off.end() - 1);
    for (uint32_t id = 0; id < key_.size(); ++id) {
        if (dim_[id] != 1) continue;
        auto b = boundary(id);
        if (b.size() == 2) {
            adj[fill[b[0]]++] = b[1];
            adj[fill[b[1]]++] = b[0];
        }
    }
    std::vector<uint32_t> comp(key_.size(), npos);
    std::vector<uint32_t> stack;
    for (uint32_t s = 0; s < key_.size(); ++s) {
        if (dim_[s] != 0 || comp[s] != npos) continue;
        uint32_t me = static_cast<uint32_t>(out.count);
        comp[s] = me;
        Key128 rep = key_[s];
        stack.push_back(s);
        while (!stack.empty()) {
            uint32_t v = stack.back();
            stack.pop_back();
            if (key_[v] < rep) rep = key_[v];
            for (uint32_t i = off[v]; i < off[v + 1]; ++i) {
                uint32_t w = adj[i];
                if (comp[w] == npos) {
                    comp[w] = me;
                    stack.push_back(w);
                }
            }
        }
        out.representatives.push_back(rep);
        ++out.count;
    }
    std::sort(out.representatives.begin(), out.representatives.end());
    return out;
}

std::vector<std::pair<uint32_t, int>> CellComplex::oriented_boundary(uint32_t id) const {
    if (dim_[id] != 2) throw std::logic_error("oriented_boundary needs a 2-cell");
    auto edges = boundary(id);
    // endpoints per edge; polygon vertices have degree exactly 2
    std::vector<std::pair<uint32_t, uint32_t>> ends;
    std::vector<uint32_t> verts;
    for (uint32_t e : edges) {
        auto vb = boundary(e);
        if (vb.size() != 2) throw std::logic_error("polygon edge without 2 endpoints");
        ends.emplace_back(vb[0], vb[1]);
        verts.push_back(vb[0]);
        verts.push_back(vb[1]);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    auto incident = [&](uint32_t v) {
        std::vector<size_t> out;
        for (size_t i = 0; i < ends.size(); ++i)
            if (ends[i].first == v || ends[i].second == v) out.push_back(i);
        return out;
    };
    for (uint32_t v : verts)
        if (incident(v).size() != 2)
            throw std::logic_error("2-cell boundary is not a simple polygon");

    std::vector<std::pair<uint32_t, int>> out;
    std::vector<bool> used(ends.size(), false);
    uint32_t v = verts.front();
    for (size_t step = 0; step < ends.size(); ++step) {
        std::vector<size_t> inc = incident(v);
        size_t pick = npos;
        for (size_t i : inc)
            if (!used[i] && (pick == npos || edges[i] < edges[pick])) pick = i;
        if (pick == npos) throw std::logic_error("polygon walk stuck");
        used[pick] = true;
        int sign = ends[pick].first == v ? +1 : -1;
        out.emplace_back(edges[pick], sign);
        v = ends[pick].first == v ? ends[pick].second : ends[pick].first;
    }
    if (v != verts.front()) throw std::logic_error("polygon walk did not close");
    return out;
}

namespace {

// Dense Smith normal form for the small core left after unit-pivot
// elimination. Entries stay tiny in practice; adds are overflow-checked.
std::vector<int64_t> dense_snf(std::vector<std::vector<int64_t>> m) {
    std::vector<int64_t> diag;
    size_t r0 = 0, c0 = 0;
    auto rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    while (r0 < rows && c0 < cols) {
        // find the entry of minimal absolute value in the active block
        size_t pr = r0, pc = c0;
        int64_t best = 0;
        for (size_t i = r0; i < rows; ++i)
            for (size_t j = c0; j < cols; ++j)
                if (m[i][j] != 0 &&
                    (best == 0 || std::abs(m[i][j]) < std::abs(best))) {
                    best = m[i][j];
                    pr = i;
                    pc = j;
                }
        if (best == 0) break;
        std::swap(m[r0], m[pr]);
        for (size_t i = r0; i < rows; ++i) std::swap(m[i][c0], m[i][pc]);
        bool clean = true;
        for (size_t i = r0 + 1; i < rows; ++i) {
            if (m[i][c0] % m[r0][c0] != 0) clean = false;
            int64_t q = m[i][c0] / m[r0][c0];
            if (q)
                for (size_t j = c0; j < cols; ++j) {
                    int64_t t;
                    if (__builtin_mul_overflow(q, m[r0][j], &t) ||
                        __builtin_sub_overflow(m[i][j], t, &m[i][j]))
                        throw std::logic_error("SNF overflow");
                }
        }
        for (size_t j = c0 + 1; j < cols; ++j) {
            if (m[r0][j] % m[r0][c0] != 0) clean = false;
            int64_t q = m[r0][j] / m[r0][c0];
            if (q)
                for (size_t i = r0; i < rows; ++i) {
                    int64_t t;
                    if (__builtin_mul_overflow(q, m[i][c0], &t) ||
                        __builtin_sub_overflow(m[i][j], t, &m[i][j]))
                        throw std::logic_error("SNF overflow");
                }
        }
        bool zeroed = true;
        for (size_t i = r0 + 1; i < rows && zeroed; ++i)
            if (m[i][c0] != 0) zeroed = false;
        for (size_t j = c0 + 1; j < cols && zeroed; ++j)
            if (m[r0][j] != 0) zeroed = false;
        if (!zeroed || !clean) continue; // repeat with a smaller pivot
        diag.push_back(std::abs(m[r0][c0]));
        ++r0;
        ++c0;
    }
    // normalize the diagonal into invariant factors (divisibility chain)
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < diag.size(); ++i)
            for (size_t j = i + 1; j < diag.size(); ++j)
                if (diag[j] % diag[i] != 0) {
                    int64_t g = std::gcd(diag[i], diag[j]);
                    diag[j] = diag[i] / g * diag[j];
                    diag[i] = g;
                    changed = true;
                }
    }
    return diag;
}

} // namespace

std::vector<int64_t> CellComplex::integral_h1_torsion(size_t max_cells) const {
    if (size() > max_cells)
        throw ResourceLimitError(
            "complex too large for Smith normal form (" + std::to_string(size()) +
                " cells, cap " + std::to_string(max_cells) + ")",
            "raise the cap or restrict torsion checks to small domains");

    // Sparse unit-pivot elimination on the signed d_2, then dense SNF on the
    // leftover core. Torsion of H1 is exactly the invariant factors > 1.
    std::vector<uint32_t> twos = cells_of_dim(2);
    std::vector<std::vector<std::pair<uint32_t, int64_t>>> colv; // (edge id, coeff)
    colv.reserve(twos.size());
    for (uint32_t id : twos) {
        auto ob = oriented_boundary(id);
        std::vector<std::pair<uint32_t, int64_t>> col;
        for (auto [e, s] : ob) col.emplace_back(e, s);
        std::sort(col.begin(), col.end());
        // merge repeated edges (a polygon can traverse an edge twice)
        std::vector<std::pair<uint32_t, int64_t>> merged;
        for (auto& [e, s] : col) {
            if (!merged.empty() && merged.back().first == e) merged.back().second += s;
            else merged.emplace_back(e, s);
        }
        std::erase_if(merged, [](auto& p) { return p.second == 0; });
        colv.push_back(std::move(merged));
    }

    std::vector<bool> col_dead(colv.size(), false), row_dead(size(), false);
    auto find_entry = [&](const std::vector<std::pair<uint32_t, int64_t>>& col,
                          uint32_t row) -> int64_t {
        for (auto& [e, v] : col)
            if (e == row) return v;
        return 0;
    };
    // repeat: pick any +-1 pivot, eliminate its row everywhere
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t j = 0; j < colv.size() && !progress; ++j) {
            if (col_dead[j]) continue;
            for (auto& [row, val] : colv[j]) {
                if (row_dead[row] || (val != 1 && val != -1)) continue;
                int64_t pv = val;
                uint32_t prow = row;
                for (size_t k = 0; k < colv.size(); ++k) {
                    if (k == j || col_dead[k]) continue;
                    int64_t w = find_entry(colv[k], prow);
                    if (w == 0) continue;
                    int64_t f = w * pv; // w / pv since pv is a unit
                    std::vector<std::pair<uint32_t, int64_t>> next;
                    size_t a = 0, b = 0;
                    auto &ck = colv[k], &cj = colv[j];
                    while (a < ck.size() || b < cj.size()) {
                        if (b == cj.size() || (a < ck.size() && ck[a].first < cj[b].first))
                            next.push_back(ck[a++]);
                        else if (a == ck.size() || cj[b].first < ck[a].first) {
                            int64_t t;
                            if (__builtin_mul_overflow(f, cj[b].second, &t))
                                throw std::logic_error("torsion elimination overflow");
                            next.emplace_back(cj[b].first, -t);
                            ++b;
                        } else {
                            int64_t t, u;
                            if (__builtin_mul_overflow(f, cj[b].second, &t) ||
                                __builtin_sub_overflow(ck[a].second, t, &u))
                                throw std::logic_error("torsion elimination overflow");
                            if (u != 0) next.emplace_back(ck[a].first, u);
                            ++a;
                            ++b;
                        }
                    }
                    colv[k] = std::move(next);
                }
                col_dead[j] = true;
                row_dead[prow] = true;
                progress = true;
                break;
            }
        }
    }

    // collect the core
    std::vector<uint32_t> core_rows;
    std::vector<size_t> core_cols;
    for (size_t j = 0; j < colv.size(); ++j) {
        if (col_dead[j]) continue;
        bool nonzero = false;
        for (auto& [row, val] : colv[j])
            if (!row_dead[row] && val != 0) {
                core_rows.push_back(row);
                nonzero = true;
            }
        if (nonzero) core_cols.push_back(j);
    }
    std::sort(core_rows.begin(), core_rows.end());
    core_rows.erase(std::unique(core_rows.begin(), core_rows.end()), core_rows.end());
    std::vector<int64_t> factors;
    if (!core_cols.empty()) {
        std::vector<std::vector<int64_t>> m(
            core_rows.size(), std::vector<int64_t>(core_cols.size(), 0));
        for (size_t jj = 0; jj < core_cols.size(); ++jj)
            for (auto& [row, val] : colv[core_cols[jj]]) {
                if (row_dead[row]) continue;
                size_t ri = static_cast<size_t>(
                    std::lower_bound(core_rows.begin(), core_rows.end(), row) -
                    core_rows.begin());
                m[ri][jj] = val;
            }
        factors = dense_snf(std::move(m));
    }
    std::erase_if(factors, [](int64_t f) { return f <= 1; });
    std::sort(factors.begin(), factors.end());
    return factors;
}

std::string CellComplex::validate_boundaries() const {
    std::vector<uint32_t> gg;
    for (uint32_t id = 0; id < key_.size(); ++id) {
        int d = dim_[id];
        auto b = boundary(id);
        for (uint32_t f : b)
            if (dim_[f] != d - 1)
                return "cell " + std::to_string(id) + " has a boundary face of dim " +
                       std::to_string(int(dim_[f]));
        if (d < 2) continue;
        // dd = 0 over F2: every (d-2)-face appears an even number of times
        gg.clear();
        for (uint32_t f : b) {
            auto fb = boundary(f);
            gg.insert(gg.end(), fb.begin(), fb.end());
        }
        std::sort(gg.begin(), gg.end());
        for (size_t i = 0; i < gg.size();) {
            size_t j = i;
            while (j < gg.size() && gg[j] == gg[i]) ++j;
            if ((j - i) % 2 != 0)
                return "dd != 0 at cell " + std::to_string(id) + " via face " +
                       std::to_string(gg[i]);
            i = j;
        }
    }
    return "";
}

std::vector<uint32_t> CellComplex::canonical_order() const {
    std::vector<uint32_t> order(key_.size());
    std::iota(order.begin(), order.end(), 0);
    if (!canonical_) {
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            if (dim_[a] != dim_[b]) return dim_[a] < dim_[b];
            return key_[a] < key_[b];
        });
    }
    return order;
}

void CellComplex::serialize_binary(std::ostream& os) const {
    // Little-endian, fixed-width records in canonical (dimension, label) order.
    std::vector<uint32_t> order = canonical_order();
    std::vector<uint32_t> rank(key_.size());
    for (uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    os.write("CVGX", 4);
    uint8_t version = 1, top = static_cast<uint8_t>(top_dimension());
    os.write(reinterpret_cast<const char*>(&version), 1);
    os.write(reinterpret_cast<const char*>(&top), 1);
    for (int d = 0; d < 4; ++d) {
        uint64_t n = static_cast<uint64_t>(counts_[d]);
        os.write(reinterpret_cast<const char*>(&n), 8);
    }
    std::vector<uint32_t> bb;
    for (uint32_t id : order) {
        const Key128& k = key_[id];
        os.write(reinterpret_cast<const char*>(&k.hi), 8);
        os.write(reinterpret_cast<const char*>(&k.lo), 8);
        uint8_t cls = static_cast<uint8_t>(class_[id]);
        auto b = boundary(id);
        uint8_t nb = static_cast<uint8_t>(b.size());
        os.write(reinterpret_cast<const char*>(&cls), 1);
        os.write(reinterpret_cast<const char*>(&nb), 1);
        bb.assign(b.begin(), b.end());
        for (uint32_t& x : bb) x = rank[x];
        std::sort(bb.begin(), bb.end());
        os.write(reinterpret_cast<const char*>(bb.data()),
                 static_cast<std::streamsize>(bb.size() * 4));
    }
}

void CellComplex::serialize_json(std::ostream& os) const {
    std::vector<uint32_t> order = canonical_order();
    std::vector<uint32_t> rank(key_.size());
    for (uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["type"] = "cell_complex";
    j["counts"] = {{"0", counts_[0]}, {"1", counts_[1]}, {"2", counts_[2]},
                   {"3", counts_[3]}};
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (uint32_t id : order) {
        nlohmann::ordered_json c;
        c["key"] = key_[id].hex();
        c["dim"] = dim_[id];
        c["class"] = cell_class_name(class_[id]);
        std::vector<uint32_t> bb;
        for (uint32_t x : boundary(id)) bb.push_back(rank[x]);
        std::sort(bb.begin(), bb.end());
        c["boundary"] = bb;
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    os << j.dump(1) << "\n";
}

} // namespace covgrid
