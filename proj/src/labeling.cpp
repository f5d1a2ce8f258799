#include "covgrid/labeling.hpp"

#include <algorithm>
#include <cassert>

#include "covgrid/errors.hpp"

namespace covgrid {

uint64_t factorial(int n) {
    uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<uint64_t>(i);
    return f;
}

uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<uint64_t>(n - k + i) / i;
    return r;
}

uint64_t falling(int n, int k) {
    uint64_t r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<uint64_t>(n - i);
    return r;
}

std::vector<uint8_t> perm_unrank(int n, uint64_t rank) {
    std::vector<uint8_t> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = static_cast<uint8_t>(i + 1);
    std::vector<uint8_t> out;
    out.reserve(n);
    uint64_t f = factorial(n);
    for (int i = n; i >= 1; --i) {
        f /= static_cast<uint64_t>(i);
        size_t idx = static_cast<size_t>(rank / f);
        rank %= f;
        out.push_back(pool[idx]);
        pool.erase(pool.begin() + idx);
    }
    return out;
}

std::vector<uint8_t> comb_unrank(int n, int k, uint64_t rank) {
    std::vector<uint8_t> out;
    out.reserve(k);
    int next = 1;
    for (int slots = k; slots > 0; --slots) {
        while (true) {
            uint64_t with_next = binomial(n - next, slots - 1);
            if (rank < with_next) {
                out.push_back(static_cast<uint8_t>(next));
                ++next;
                break;
            }
            rank -= with_next;
            ++next;
        }
    }
    return out;
}

LabelingStream::LabelingStream(int A, uint64_t begin, uint64_t end)
    : A_(A), rank_(begin), end_(end) {
    assert(end_ <= total(A));
    if (rank_ < end_) perm_ = perm_unrank(A + 1, rank_);
}

bool LabelingStream::next(Labeling& out) {
    if (rank_ >= end_) return false;
    out.patroller = perm_[0];
    out.assignment.assign(perm_.begin() + 1, perm_.end());
    ++rank_;
    if (rank_ < end_) std::next_permutation(perm_.begin(), perm_.end());
    return true;
}

LabelingStream enumerate_labelings(int A) {
    if (A < 2)
        throw InputError(ErrorKind::DomainTooSmall,
                         "labeled assembly needs at least 2 cells");
    return LabelingStream(A, 0, LabelingStream::total(A));
}

uint64_t assignment_lo(const Labeling& L) {
    uint64_t lo = 0;
    for (size_t cell = 0; cell < L.assignment.size(); ++cell)
        lo |= slot_nibble(L.assignment[cell], cell);
    return lo;
}

Key128 rule_a_overlap(const Labeling& L, int cell) {
    // both overlapping agents carry the cell's nibble; the encoding is
    // symmetric in them by construction
    return keybuild::overlap_vertex(assignment_lo(L) |
                                    slot_nibble(L.patroller, cell));
}

Key128 rule_b_midpoint(const CrossingSet::Crossing& X, const std::vector<uint8_t>& arr,
                       int k, uint64_t off_lo) {
    uint64_t lo = off_lo;
    int m = static_cast<int>(arr.size());
    for (int t = 1; t <= m; ++t) {
        int cell;
        if (t < k) cell = X.cells[t - 1];
        else if (t == k || t == k + 1) cell = X.cells[k - 1];
        else cell = X.cells[t - 2];
        lo |= slot_nibble(arr[t - 1], static_cast<uint64_t>(cell));
    }
    return keybuild::overlap_vertex(lo);
}

Key128 rule_c_single_shift(const PatrolRegion& q, const CrossingSet::Crossing& X,
                           const std::vector<uint8_t>& arr, int k, uint64_t off_lo) {
    uint64_t lo = off_lo;
    int m = static_cast<int>(arr.size());
    for (int t = 1; t <= m; ++t) {
        if (t == k + 1) {
            lo |= slot_nibble(arr[t - 1], 0xF); // the patroller
            continue;
        }
        int cell = t <= k ? X.cells[t - 1] : X.cells[t - 2];
        lo |= slot_nibble(arr[t - 1], static_cast<uint64_t>(cell));
    }
    int e = q.edge_index(X.cells[k - 1], X.cells[k]);
    assert(e >= 0);
    return keybuild::q_edge(lo, e);
}

} // namespace covgrid
