#include "covgrid/assembly.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "covgrid/errors.hpp"
#include "covgrid/permutahedron.hpp"

namespace covgrid {
namespace {

int64_t mul_i64(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("cell count overflow");
    return r;
}

int64_t add_i64(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("cell count overflow");
    return r;
}

// Emission sources, used by the multiplicity verifier.
enum : uint8_t {
    kSrcPatrol = 0,   // patrol instance of the free region
    kSrcMidpoint = 1, // subdivision midpoint, keyed by the overlap rule
    kSrcPerm = 2,     // interval-attachment interior
    kSrcShift = 3,    // Single shift, keyed by the q-edge rule
};

struct VRec {
    Key128 key;
    uint8_t src;
};
struct ERec {
    Key128 key;
    std::array<uint32_t, 2> b;
    uint8_t src;
};
struct FRec {
    Key128 key;
    std::array<uint32_t, 4> b;
    uint8_t nb;
    uint8_t src;
};
struct CRec {
    Key128 key;
    std::array<uint32_t, 6> b;
};

struct ByKey {
    template <class R>
    bool operator()(const R& x, const R& y) const {
        return x.key < y.key;
    }
};

// One attachment family: every way to pick which agents ride the crossing
// and how the rest sit on the off-crossing cells.
struct Job {
    int ci = 0; // crossing index
    int m = 0;  // agents on the crossing = length + 1
    uint64_t copies = 0;
    uint64_t pv = 0, pe = 0, pf = 0; // emissions per copy, by dimension
};

struct Plan {
    const GridDomain* g = nullptr;
    int A = 0;
    uint64_t labelings = 0;
    PatrolRegion q;
    CrossingSet cs;
    std::vector<Job> jobs;
    std::vector<uint8_t> dc; // cell -> number of glued crossings through it
    std::map<int, ExpandedPerm> tmpl;
};

Plan make_plan(const GridDomain& g, const BuildOptions& opt) {
    Plan pl;
    pl.g = &g;
    pl.A = g.cell_count();
    pl.labelings = factorial(pl.A + 1);
    pl.q = patrol_region(g);
    pl.cs = crossings(pl.q);
    pl.dc.assign(static_cast<size_t>(pl.A), 0);
    for (size_t i = 0; i < pl.cs.crossings.size(); ++i) {
        const auto& X = pl.cs.crossings[i];
        if (X.degenerate && !opt.include_degenerate) continue;
        Job j;
        j.ci = static_cast<int>(i);
        j.m = X.length() + 1;
        j.copies = binomial(pl.A + 1, j.m) * factorial(pl.A + 1 - j.m);
        uint64_t mf = factorial(j.m);
        uint64_t shifts = binomial(j.m - 1, 2);
        j.pv = mf * (j.m - 1) / 2 + mf;          // midpoints + arrangements
        j.pe = mf * (j.m - 1) + mf * shifts;     // half-edges + shift edges
        j.pf = mf * shifts;                      // triangles
        pl.jobs.push_back(j);
        for (int c : X.cells) ++pl.dc[c];
    }
    for (const auto& j : pl.jobs)
        if (!pl.tmpl.count(j.m)) pl.tmpl.emplace(j.m, subdivide_and_expand(skel1(j.m)));
    return pl;
}

// Expected emission and unique-cell counts, exact. Doubles as the reserve
// sizing and as a cross-check on the deduplicated result.
struct Estimate {
    uint64_t em_v = 0, em_e = 0, em_f = 0, em_c = 0;
    uint64_t u_ov = 0, u_pv = 0, u_qe = 0, u_he = 0, u_se = 0;
    uint64_t u_sq = 0, u_tr = 0, u_cu = 0;
    uint64_t mid_emissions = 0;

    uint64_t unique() const {
        return u_ov + u_pv + u_qe + u_he + u_se + u_sq + u_tr + u_cu;
    }
    uint64_t boundary_entries() const {
        return 2 * (u_qe + u_he + u_se) + 4 * u_sq + 3 * u_tr + 6 * u_cu;
    }
};

Estimate estimate(const Plan& pl) {
    Estimate e;
    uint64_t lab = pl.labelings;
    uint64_t A = static_cast<uint64_t>(pl.A);
    e.u_ov = A * lab / 2;
    e.u_qe = pl.q.edges.size() * lab;
    e.u_sq = pl.q.squares.size() * lab;
    e.u_cu = pl.q.cubes.size() * lab;
    e.em_v = A * lab;
    e.em_e = 2 * e.u_qe; // patrol route + Single-shift route
    e.em_f = e.u_sq;
    e.em_c = e.u_cu;
    for (const auto& j : pl.jobs) {
        uint64_t mf = factorial(j.m);
        uint64_t shifts = binomial(j.m - 1, 2);
        uint64_t mids = j.copies * (mf * (j.m - 1) / 2);
        e.mid_emissions += mids;
        e.u_pv += j.copies * mf;
        e.u_he += j.copies * mf * (j.m - 1);
        e.u_se += j.copies * mf * (shifts - (j.m - 2));
        e.u_tr += j.copies * mf * shifts;
        e.em_v += mids + j.copies * mf;
        e.em_e += j.copies * (mf * (j.m - 1) + mf * (shifts - (j.m - 2)));
        e.em_f += j.copies * mf * shifts;
    }
    return e;
}

struct Chunk {
    int pos;
    uint64_t b, e;
};

// Decodes one copy: which agents sit on the crossing (ascending), where the
// others are pinned, and the relabeling of the per-length template.
struct CopyCtx {
    const Plan* pl = nullptr;
    const CrossingSet::Crossing* X = nullptr;
    const ExpandedPerm* ep = nullptr;
    int A = 0, m = 0, offn = 0, ci = 0;
    uint64_t off_fact = 1;
    std::vector<int> off_cells;
    std::vector<uint8_t> on, offl, arr, arr2;
    uint64_t off_lo = 0;
    uint32_t mask = 0;

    void init(const Plan& plan, int active_pos) {
        pl = &plan;
        const Job& j = plan.jobs[active_pos];
        ci = j.ci;
        m = j.m;
        X = &plan.cs.crossings[ci];
        ep = &plan.tmpl.at(m);
        A = plan.A;
        offn = A + 1 - m;
        off_fact = factorial(offn);
        off_cells.clear();
        std::vector<char> onc(static_cast<size_t>(A), 0);
        for (int c : X->cells) onc[c] = 1;
        for (int c = 0; c < A; ++c)
            if (!onc[c]) off_cells.push_back(c);
        arr.resize(m);
        arr2.resize(m);
    }

    void decode(uint64_t rank) {
        on = comb_unrank(A + 1, m, rank / off_fact);
        mask = 0;
        for (uint8_t v : on) mask |= 1u << (v - 1);
        offl.clear();
        for (int v = 1; v <= A + 1; ++v)
            if (!(mask >> (v - 1) & 1)) offl.push_back(static_cast<uint8_t>(v));
        std::vector<uint8_t> op = perm_unrank(offn, rank % off_fact);
        off_lo = 0;
        for (int j = 0; j < offn; ++j)
            off_lo |= slot_nibble(offl[op[j] - 1], static_cast<uint64_t>(off_cells[j]));
    }

    void relabel(uint32_t vertex, std::vector<uint8_t>& out) const {
        const auto& tv = ep->base.vertices[vertex];
        for (int t = 0; t < m; ++t) out[t] = on[tv[t] - 1];
    }

    uint64_t lo_on(const std::vector<uint8_t>& a) const {
        uint64_t lo = off_lo;
        for (int t = 0; t < m; ++t) lo |= slot_nibble(a[t], static_cast<uint64_t>(t));
        return lo;
    }

    Key128 midpoint_key(uint32_t base_edge) {
        relabel(ep->midpoint_canon_vertex[base_edge], arr2);
        return rule_b_midpoint(*X, arr2, ep->base.edges[base_edge].pos, off_lo);
    }
};

template <class Sink>
void phase_vertices(const Plan& pl, Sink& s, uint64_t lb, uint64_t le,
                    const std::vector<Chunk>& chunks) {
    if constexpr (Sink::kFull) {
        uint64_t n = (le - lb) * static_cast<uint64_t>(pl.A);
        for (const auto& c : chunks) n += (c.e - c.b) * pl.jobs[c.pos].pv;
        s.reserve_v(n);
    }
    LabelingStream st(pl.A, lb, le);
    Labeling L;
    while (st.next(L)) {
        if constexpr (Sink::kFull) {
            uint64_t lo = assignment_lo(L);
            for (int c = 0; c < pl.A; ++c)
                s.vertex(keybuild::overlap_vertex(lo | slot_nibble(L.patroller, c)),
                         kSrcPatrol);
        } else {
            for (int c = 0; c < pl.A; ++c) s.count_vertex(kSrcPatrol);
        }
    }
    CopyCtx ctx;
    for (const auto& ch : chunks) {
        ctx.init(pl, ch.pos);
        const ExpandedPerm& ep = *ctx.ep;
        size_t nv = ep.base.vertices.size(), ne = ep.base.edges.size();
        for (uint64_t r = ch.b; r < ch.e; ++r) {
            if constexpr (Sink::kFull) {
                ctx.decode(r);
                for (size_t ei = 0; ei < ne; ++ei)
                    s.vertex(ctx.midpoint_key(static_cast<uint32_t>(ei)), kSrcMidpoint);
                for (uint32_t v = 0; v < nv; ++v) {
                    ctx.relabel(v, ctx.arr);
                    s.vertex(keybuild::perm_vertex(ctx.lo_on(ctx.arr), ctx.ci, ctx.mask),
                             kSrcPerm);
                }
            } else {
                for (size_t ei = 0; ei < ne; ++ei) s.count_vertex(kSrcMidpoint);
                for (size_t v = 0; v < nv; ++v) s.count_vertex(kSrcPerm);
            }
        }
    }
}

template <class Sink>
void phase_edges(const Plan& pl, Sink& s, uint64_t lb, uint64_t le,
                 const std::vector<Chunk>& chunks) {
    if constexpr (Sink::kFull) {
        uint64_t n = (le - lb) * pl.q.edges.size();
        for (const auto& c : chunks) n += (c.e - c.b) * pl.jobs[c.pos].pe;
        s.reserve_e(n);
    }
    LabelingStream st(pl.A, lb, le);
    Labeling L;
    while (st.next(L)) {
        if constexpr (Sink::kFull) {
            uint64_t lo_e = assignment_lo(L) | slot_nibble(L.patroller, 0xF);
            for (size_t j = 0; j < pl.q.edges.size(); ++j) {
                const auto& ed = pl.q.edges[j];
                s.edge(keybuild::q_edge(lo_e, static_cast<int>(j)),
                       rule_a_overlap(L, ed.a), rule_a_overlap(L, ed.b), kSrcPatrol);
            }
        } else {
            for (size_t j = 0; j < pl.q.edges.size(); ++j)
                s.count_edge(CellClass::QEdge, kSrcPatrol);
        }
    }
    CopyCtx ctx;
    std::vector<Key128> mids;
    for (const auto& ch : chunks) {
        ctx.init(pl, ch.pos);
        const ExpandedPerm& ep = *ctx.ep;
        int m = ctx.m;
        size_t nv = ep.base.vertices.size();
        mids.resize(ep.base.edges.size());
        for (uint64_t r = ch.b; r < ch.e; ++r) {
            if constexpr (Sink::kFull) {
                ctx.decode(r);
                for (size_t ei = 0; ei < mids.size(); ++ei)
                    mids[ei] = ctx.midpoint_key(static_cast<uint32_t>(ei));
                for (uint32_t v = 0; v < nv; ++v) {
                    ctx.relabel(v, ctx.arr);
                    uint64_t lo = ctx.lo_on(ctx.arr);
                    Key128 pv = keybuild::perm_vertex(lo, ctx.ci, ctx.mask);
                    for (int p = 1; p < m; ++p)
                        s.edge(keybuild::half_edge(lo, ctx.ci, ctx.mask, p), pv,
                               mids[ep.base.edge_at(v, p)], kSrcPerm);
                }
                for (const auto& sh : ep.shift_edges) {
                    ctx.relabel(sh.vertex, ctx.arr);
                    Key128 ek;
                    uint8_t src;
                    if (sh.cls == ShiftClass::Single) {
                        ek = rule_c_single_shift(pl.q, *ctx.X, ctx.arr, sh.k, ctx.off_lo);
                        src = kSrcShift;
                    } else {
                        ek = keybuild::swarm_edge(ctx.lo_on(ctx.arr), ctx.ci, ctx.mask,
                                                  sh.k, sh.l);
                        src = kSrcPerm;
                    }
                    s.edge(ek, mids[ep.base.edge_at(sh.vertex, sh.k)],
                           mids[ep.base.edge_at(sh.vertex, sh.l)], src);
                }
            } else {
                for (size_t v = 0; v < nv; ++v)
                    for (int p = 1; p < m; ++p) s.count_edge(CellClass::HalfEdge, kSrcPerm);
                for (const auto& sh : ep.shift_edges) {
                    if (sh.cls == ShiftClass::Single)
                        s.count_edge(CellClass::QEdge, kSrcShift);
                    else
                        s.count_edge(CellClass::SwarmEdge, kSrcPerm);
                }
            }
        }
    }
}

template <class Sink>
void phase_faces(const Plan& pl, Sink& s, uint64_t lb, uint64_t le,
                 const std::vector<Chunk>& chunks) {
    if constexpr (Sink::kFull) {
        uint64_t n = (le - lb) * pl.q.squares.size();
        for (const auto& c : chunks) n += (c.e - c.b) * pl.jobs[c.pos].pf;
        s.reserve_f(n);
    }
    LabelingStream st(pl.A, lb, le);
    Labeling L;
    while (st.next(L)) {
        if constexpr (Sink::kFull) {
            uint64_t lo_e = assignment_lo(L) | slot_nibble(L.patroller, 0xF);
            for (size_t j = 0; j < pl.q.squares.size(); ++j) {
                const auto& sq = pl.q.squares[j];
                Key128 bk[4];
                for (int i = 0; i < 4; ++i) bk[i] = keybuild::q_edge(lo_e, sq.edges[i]);
                s.face(keybuild::q_square(lo_e, static_cast<int>(j)), bk, 4, kSrcPatrol);
            }
        } else {
            for (size_t j = 0; j < pl.q.squares.size(); ++j)
                s.count_face(CellClass::Square);
        }
    }
    CopyCtx ctx;
    for (const auto& ch : chunks) {
        ctx.init(pl, ch.pos);
        const ExpandedPerm& ep = *ctx.ep;
        for (uint64_t r = ch.b; r < ch.e; ++r) {
            if constexpr (Sink::kFull) {
                ctx.decode(r);
                for (const auto& sh : ep.shift_edges) {
                    ctx.relabel(sh.vertex, ctx.arr);
                    uint64_t lo = ctx.lo_on(ctx.arr);
                    Key128 bk[3];
                    bk[0] = sh.cls == ShiftClass::Single
                                ? rule_c_single_shift(pl.q, *ctx.X, ctx.arr, sh.k,
                                                      ctx.off_lo)
                                : keybuild::swarm_edge(lo, ctx.ci, ctx.mask, sh.k, sh.l);
                    bk[1] = keybuild::half_edge(lo, ctx.ci, ctx.mask, sh.k);
                    bk[2] = keybuild::half_edge(lo, ctx.ci, ctx.mask, sh.l);
                    s.face(keybuild::triangle(lo, ctx.ci, ctx.mask, sh.k, sh.l), bk, 3,
                           kSrcPerm);
                }
            } else {
                for (size_t i = 0; i < ep.shift_edges.size(); ++i)
                    s.count_face(CellClass::Triangle);
            }
        }
    }
}

template <class Sink>
void phase_cubes(const Plan& pl, Sink& s, uint64_t lb, uint64_t le,
                 const std::vector<Chunk>&) {
    if (pl.q.cubes.empty()) return;
    if constexpr (Sink::kFull) s.reserve_c((le - lb) * pl.q.cubes.size());
    LabelingStream st(pl.A, lb, le);
    Labeling L;
    while (st.next(L)) {
        if constexpr (Sink::kFull) {
            uint64_t lo_e = assignment_lo(L) | slot_nibble(L.patroller, 0xF);
            for (size_t j = 0; j < pl.q.cubes.size(); ++j) {
                const auto& cu = pl.q.cubes[j];
                std::array<Key128, 6> bk;
                for (int i = 0; i < 6; ++i) bk[i] = keybuild::q_square(lo_e, cu.squares[i]);
                s.cube(keybuild::q_cube(lo_e, static_cast<int>(j)), bk);
            }
        } else {
            for (size_t j = 0; j < pl.q.cubes.size(); ++j) s.count_cube();
        }
    }
}

struct Store {
    std::vector<VRec> v;
    std::vector<ERec> e;
    std::vector<FRec> f;
    std::vector<CRec> c;
};

struct FullSink {
    static constexpr bool kFull = true;
    const CellComplex* cx = nullptr;
    Store* st = nullptr;

    void reserve_v(uint64_t n) { st->v.reserve(st->v.size() + n); }
    void reserve_e(uint64_t n) { st->e.reserve(st->e.size() + n); }
    void reserve_f(uint64_t n) { st->f.reserve(st->f.size() + n); }
    void reserve_c(uint64_t n) { st->c.reserve(st->c.size() + n); }

    uint32_t resolve(const Key128& k) const {
        auto id = cx->find(k);
        if (!id) throw std::logic_error("unresolved boundary label " + k.hex());
        return *id;
    }
    void vertex(const Key128& k, uint8_t src) { st->v.push_back({k, src}); }
    void edge(const Key128& k, const Key128& a, const Key128& b, uint8_t src) {
        uint32_t ia = resolve(a), ib = resolve(b);
        if (ia > ib) std::swap(ia, ib);
        st->e.push_back({k, {ia, ib}, src});
    }
    void face(const Key128& k, const Key128* bk, int nb, uint8_t src) {
        FRec r;
        r.key = k;
        r.b = {0, 0, 0, 0};
        r.nb = static_cast<uint8_t>(nb);
        r.src = src;
        for (int i = 0; i < nb; ++i) r.b[i] = resolve(bk[i]);
        std::sort(r.b.begin(), r.b.begin() + nb);
        st->f.push_back(r);
    }
    void cube(const Key128& k, const std::array<Key128, 6>& bk) {
        CRec r;
        r.key = k;
        for (int i = 0; i < 6; ++i) r.b[i] = resolve(bk[i]);
        std::sort(r.b.begin(), r.b.end());
        st->c.push_back(r);
    }
};

struct Tally {
    uint64_t ov_patrol = 0, mid = 0, perm = 0;
    uint64_t qe_patrol = 0, qe_shift = 0, half = 0, swarm = 0;
    uint64_t square = 0, tri = 0, cube = 0;
};

struct CensusSink {
    static constexpr bool kFull = false;
    Tally t;

    void count_vertex(uint8_t src) {
        if (src == kSrcPatrol) ++t.ov_patrol;
        else if (src == kSrcMidpoint) ++t.mid;
        else ++t.perm;
    }
    void count_edge(CellClass cls, uint8_t src) {
        if (cls == CellClass::QEdge) {
            if (src == kSrcPatrol) ++t.qe_patrol;
            else ++t.qe_shift;
        } else if (cls == CellClass::HalfEdge) {
            ++t.half;
        } else {
            ++t.swarm;
        }
    }
    void count_face(CellClass cls) {
        if (cls == CellClass::Square) ++t.square;
        else ++t.tri;
    }
    void count_cube() { ++t.cube; }
};

// Splits the labeling ranks and each job's copy ranks into `T` contiguous
// slices and runs `fn` per slice. The slice boundaries do not affect the
// output: full mode sorts all records by key before deduplication.
template <class Sink, class Fn>
void drive(const Plan& pl, int T, std::vector<Sink>& sinks, Fn fn) {
    std::vector<std::exception_ptr> errs(static_cast<size_t>(T));
    auto work = [&](int t) {
        try {
            uint64_t lb = pl.labelings * static_cast<uint64_t>(t) / T;
            uint64_t le = pl.labelings * static_cast<uint64_t>(t + 1) / T;
            std::vector<Chunk> ch;
            for (size_t p = 0; p < pl.jobs.size(); ++p) {
                uint64_t cb = pl.jobs[p].copies * static_cast<uint64_t>(t) / T;
                uint64_t ce = pl.jobs[p].copies * static_cast<uint64_t>(t + 1) / T;
                if (cb < ce) ch.push_back({static_cast<int>(p), cb, ce});
            }
            fn(sinks[t], lb, le, ch);
        } catch (...) {
            errs[t] = std::current_exception();
        }
    };
    if (T == 1) {
        work(0);
    } else {
        std::vector<std::thread> th;
        th.reserve(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) th.emplace_back(work, t);
        for (auto& x : th) x.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

template <class Rec>
std::vector<Rec> collect(std::vector<Store>& stores, std::vector<Rec> Store::*member) {
    if (stores.size() == 1) return std::move(stores[0].*member);
    size_t n = 0;
    for (auto& s : stores) n += (s.*member).size();
    std::vector<Rec> out;
    out.reserve(n);
    for (auto& s : stores) {
        out.insert(out.end(), (s.*member).begin(), (s.*member).end());
        std::vector<Rec>().swap(s.*member);
    }
    return out;
}

// The cell in an overlap-vertex key that carries two agents.
int overlap_cell(uint64_t lo, int A) {
    int cnt[16] = {0};
    for (int l = 1; l <= A + 1; ++l) ++cnt[lo >> 4 * (l - 1) & 0xF];
    for (int c = 0; c < A; ++c)
        if (cnt[c] == 2) return c;
    return -1;
}

BuildResult build_full(const Plan& pl, const Estimate& est, int T) {
    BuildResult res;
    res.mode = BuildOptions::Mode::Full;
    CellComplex cx;
    cx.reserve(est.unique(), est.boundary_entries());
    MultiplicityCheck& mc = res.multiplicity;
    CountReport& rep = res.built;
    auto fail = [&](std::string d) {
        if (mc.ok) {
            mc.ok = false;
            mc.detail = std::move(d);
        }
    };

    std::vector<Store> stores(static_cast<size_t>(T));
    std::vector<FullSink> sinks(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) sinks[t] = FullSink{&cx, &stores[t]};

    drive(pl, T, sinks, [&pl](FullSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_vertices(pl, s, lb, le, ch);
    });
    {
        std::vector<VRec> recs = collect(stores, &Store::v);
        std::sort(recs.begin(), recs.end(), ByKey{});
        size_t i = 0, n = recs.size();
        while (i < n) {
            size_t j = i;
            uint64_t by_src[4] = {0, 0, 0, 0};
            while (j < n && recs[j].key == recs[i].key) {
                ++by_src[recs[j].src];
                ++j;
            }
            const Key128& k = recs[i].key;
            CellClass cls = k.cell_class();
            if (cls == CellClass::OverlapVertex) {
                mc.ov_patrol_emissions += by_src[kSrcPatrol];
                mc.ov_midpoint_emissions += by_src[kSrcMidpoint];
                int cell = overlap_cell(k.lo, pl.A);
                if (cell < 0 || by_src[kSrcPatrol] != 2 ||
                    by_src[kSrcMidpoint] != pl.dc[cell] || by_src[kSrcPerm] != 0)
                    fail("overlap vertex " + k.hex() + " has emission counts (patrol=" +
                         std::to_string(by_src[kSrcPatrol]) + ", midpoint=" +
                         std::to_string(by_src[kSrcMidpoint]) + "), expected (2, " +
                         std::to_string(cell < 0 ? -1 : pl.dc[cell]) + ")");
                ++rep.v_overlap;
            } else {
                if (by_src[kSrcPerm] != 1 || j - i != 1)
                    fail("arrangement vertex " + k.hex() + " emitted " +
                         std::to_string(j - i) + " times");
                ++rep.v_perm;
            }
            cx.add_cell(0, {}, k, cls);
            i = j;
        }
    }

    drive(pl, T, sinks, [&pl](FullSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_edges(pl, s, lb, le, ch);
    });
    {
        std::vector<ERec> recs = collect(stores, &Store::e);
        std::sort(recs.begin(), recs.end(), ByKey{});
        size_t i = 0, n = recs.size();
        while (i < n) {
            size_t j = i;
            uint64_t by_src[4] = {0, 0, 0, 0};
            while (j < n && recs[j].key == recs[i].key) {
                ++by_src[recs[j].src];
                ++j;
            }
            const Key128& k = recs[i].key;
            CellClass cls = k.cell_class();
            if (cls == CellClass::QEdge) {
                mc.qedge_patrol_emissions += by_src[kSrcPatrol];
                mc.qedge_shift_emissions += by_src[kSrcShift];
                if (by_src[kSrcPatrol] != 1 || by_src[kSrcShift] != 1 || j - i != 2)
                    fail("q-edge " + k.hex() + " route multiplicities (patrol=" +
                         std::to_string(by_src[kSrcPatrol]) + ", shift=" +
                         std::to_string(by_src[kSrcShift]) + "), expected (1, 1)");
                else if (recs[i].b != recs[i + 1].b)
                    fail("q-edge " + k.hex() + " glued with disagreeing endpoints");
                ++rep.e_q;
            } else {
                if (j - i != 1 || by_src[kSrcPerm] != 1)
                    fail("attachment edge " + k.hex() + " emitted " +
                         std::to_string(j - i) + " times");
                if (cls == CellClass::HalfEdge) ++rep.e_half;
                else ++rep.e_swarm;
            }
            cx.add_cell(1, recs[i].b, k, cls);
            i = j;
        }
    }

    drive(pl, T, sinks, [&pl](FullSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_faces(pl, s, lb, le, ch);
    });
    {
        std::vector<FRec> recs = collect(stores, &Store::f);
        std::sort(recs.begin(), recs.end(), ByKey{});
        size_t i = 0, n = recs.size();
        while (i < n) {
            size_t j = i;
            while (j < n && recs[j].key == recs[i].key) ++j;
            const Key128& k = recs[i].key;
            CellClass cls = k.cell_class();
            uint8_t want = cls == CellClass::Square ? kSrcPatrol : kSrcPerm;
            if (j - i != 1 || recs[i].src != want)
                fail("2-cell " + k.hex() + " emitted " + std::to_string(j - i) + " times");
            if (cls == CellClass::Square) ++rep.sigma_s;
            else ++rep.sigma_t;
            cx.add_cell(2, std::span<const uint32_t>(recs[i].b.data(), recs[i].nb), k, cls);
            i = j;
        }
    }

    if (!pl.q.cubes.empty()) {
        drive(pl, T, sinks, [&pl](FullSink& s, uint64_t lb, uint64_t le,
                                  const std::vector<Chunk>& ch) {
            phase_cubes(pl, s, lb, le, ch);
        });
        std::vector<CRec> recs = collect(stores, &Store::c);
        std::sort(recs.begin(), recs.end(), ByKey{});
        size_t i = 0, n = recs.size();
        while (i < n) {
            size_t j = i;
            while (j < n && recs[j].key == recs[i].key) ++j;
            if (j - i != 1)
                fail("cube " + recs[i].key.hex() + " emitted " + std::to_string(j - i) +
                     " times");
            ++rep.cubes;
            cx.add_cell(3, recs[i].b, recs[i].key, CellClass::Cube);
            i = j;
        }
    }

    if (static_cast<uint64_t>(rep.v_overlap) != est.u_ov ||
        static_cast<uint64_t>(rep.v_perm) != est.u_pv ||
        static_cast<uint64_t>(rep.e_q) != est.u_qe ||
        static_cast<uint64_t>(rep.e_half) != est.u_he ||
        static_cast<uint64_t>(rep.e_swarm) != est.u_se ||
        static_cast<uint64_t>(rep.sigma_s) != est.u_sq ||
        static_cast<uint64_t>(rep.sigma_t) != est.u_tr ||
        static_cast<uint64_t>(rep.cubes) != est.u_cu)
        fail("deduplicated cell counts diverge from the arithmetic expectation");

    res.complex.emplace(std::move(cx));
    return res;
}

BuildResult build_census(const Plan& pl, const Estimate& est, int T) {
    BuildResult res;
    res.mode = BuildOptions::Mode::Census;
    std::vector<CensusSink> sinks(static_cast<size_t>(T));
    drive(pl, T, sinks, [&pl](CensusSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_vertices(pl, s, lb, le, ch);
    });
    drive(pl, T, sinks, [&pl](CensusSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_edges(pl, s, lb, le, ch);
    });
    drive(pl, T, sinks, [&pl](CensusSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_faces(pl, s, lb, le, ch);
    });
    drive(pl, T, sinks, [&pl](CensusSink& s, uint64_t lb, uint64_t le,
                              const std::vector<Chunk>& ch) {
        phase_cubes(pl, s, lb, le, ch);
    });
    Tally t;
    for (const auto& s : sinks) {
        t.ov_patrol += s.t.ov_patrol;
        t.mid += s.t.mid;
        t.perm += s.t.perm;
        t.qe_patrol += s.t.qe_patrol;
        t.qe_shift += s.t.qe_shift;
        t.half += s.t.half;
        t.swarm += s.t.swarm;
        t.square += s.t.square;
        t.tri += s.t.tri;
        t.cube += s.t.cube;
    }

    MultiplicityCheck& mc = res.multiplicity;
    mc.ov_patrol_emissions = t.ov_patrol;
    mc.ov_midpoint_emissions = t.mid;
    mc.qedge_patrol_emissions = t.qe_patrol;
    mc.qedge_shift_emissions = t.qe_shift;
    auto fail = [&](std::string d) {
        if (mc.ok) {
            mc.ok = false;
            mc.detail = std::move(d);
        }
    };
    if (t.ov_patrol != 2 * est.u_ov)
        fail("overlap-vertex emissions do not pair up");
    if (t.mid != est.mid_emissions)
        fail("midpoint emissions diverge from the crossing incidence count");
    if (t.qe_patrol != t.qe_shift || t.qe_patrol != est.u_qe)
        fail("q-edge route emissions are not in bijection");
    if (t.perm != est.u_pv || t.half != est.u_he || t.swarm != est.u_se ||
        t.square != est.u_sq || t.tri != est.u_tr || t.cube != est.u_cu)
        fail("streamed class counts diverge from the arithmetic expectation");

    CountReport& rep = res.built;
    rep.v_overlap = static_cast<int64_t>(t.ov_patrol / 2);
    rep.v_perm = static_cast<int64_t>(t.perm);
    rep.e_q = static_cast<int64_t>(t.qe_patrol);
    rep.e_half = static_cast<int64_t>(t.half);
    rep.e_swarm = static_cast<int64_t>(t.swarm);
    rep.sigma_s = static_cast<int64_t>(t.square);
    rep.sigma_t = static_cast<int64_t>(t.tri);
    rep.cubes = static_cast<int64_t>(t.cube);
    return res;
}

} // namespace

BuildResult build_covering_complex(const GridDomain& g, const BuildOptions& opt) {
    if (g.cell_count() < 2)
        throw InputError(ErrorKind::DomainTooSmall,
                         "the construction needs at least 2 cells");
    if (g.cell_count() > kMaxCells)
        throw InputError(ErrorKind::BadArgument,
                         "domains beyond " + std::to_string(kMaxCells) +
                             " cells exceed the canonical label width");
    int T = std::clamp(opt.threads, 1, 64);
    Plan pl = make_plan(g, opt);
    Estimate est = estimate(pl);
    if (opt.mode == BuildOptions::Mode::Full && est.unique() > opt.max_cells)
        throw ResourceLimitError(
            "the complex would hold " + std::to_string(est.unique()) +
                " cells, above the cap of " + std::to_string(opt.max_cells),
            "rerun with --mode census, or raise --max-cells if memory allows");
    return opt.mode == BuildOptions::Mode::Full ? build_full(pl, est, T)
                                                : build_census(pl, est, T);
}

CountReport predicted_cell_counts(const DomainSummary& s, const CrossingSet& c,
                                  const PatrolRegion& q) {
    if (q.dim != 2)
        throw InputError(ErrorKind::DimensionUnsupported,
                         "closed-form class counts are stated for 2D domains only");
    if (s.A > 18)
        throw InputError(ErrorKind::BadArgument,
                         "class counts exceed the exact 64-bit range beyond 18 cells");
    int64_t A = s.A;
    int64_t lab = static_cast<int64_t>(factorial(static_cast<int>(A) + 1));
    CountReport r;
    r.v_overlap = mul_i64(A, lab) / 2;
    r.sigma_s = mul_i64(q.K, lab);
    for (const auto& [i, ni] : c.histogram) {
        if (i < 2) continue;
        int64_t P = static_cast<int64_t>(
            falling(static_cast<int>(A) + 1, static_cast<int>(A) - i));
        int64_t fi = static_cast<int64_t>(factorial(i + 1));
        int64_t unit = mul_i64(P, fi); // one full labeling orbit per crossing
        int64_t pairs = static_cast<int64_t>(i) * (i - 1) / 2;
        r.v_perm = add_i64(r.v_perm, mul_i64(ni, unit));
        r.e_q = add_i64(r.e_q, mul_i64(ni, mul_i64(i - 1, lab)));
        r.e_half = add_i64(r.e_half, mul_i64(ni, mul_i64(i, unit)));
        r.e_swarm = add_i64(r.e_swarm, mul_i64(ni, mul_i64(pairs - (i - 1), unit)));
        r.sigma_t = add_i64(r.sigma_t, mul_i64(ni, mul_i64(pairs, unit)));
    }
    return r;
}

namespace {

std::string i128_to_string(__int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                              : static_cast<unsigned __int128>(v);
    std::string digits;
    while (u > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

} // namespace

EulerPrediction predicted_euler(const DomainSummary& s) {
    if (s.A > 30)
        throw InputError(ErrorKind::BadArgument,
                         "exact evaluation is supported up to 30 cells");
    EulerPrediction p;
    __int128 lab = 1;
    for (int i = 2; i <= s.A + 1; ++i) lab *= i;
    __int128 chi = (2 * static_cast<__int128>(s.euler) - s.A) * (lab / 2);
    p.chi_decimal = i128_to_string(chi);
    if (chi >= std::numeric_limits<int64_t>::min() &&
        chi <= std::numeric_limits<int64_t>::max())
        p.chi = static_cast<int64_t>(chi);
    p.conjecture = s.dim == 3;
    return p;
}

CompareReport compare_counts(const CountReport& built, const CountReport& predicted) {
    CompareReport r;
    r.class_residuals = true;
    r.d_v_overlap = built.v_overlap - predicted.v_overlap;
    r.d_v_perm = built.v_perm - predicted.v_perm;
    r.d_e_q = built.e_q - predicted.e_q;
    r.d_e_half = built.e_half - predicted.e_half;
    r.d_e_swarm = built.e_swarm - predicted.e_swarm;
    r.d_sigma_s = built.sigma_s - predicted.sigma_s;
    r.d_sigma_t = built.sigma_t - predicted.sigma_t;
    r.d_euler = built.euler() - predicted.euler();
    r.pass = !r.d_v_overlap && !r.d_v_perm && !r.d_e_q && !r.d_e_half && !r.d_e_swarm &&
             !r.d_sigma_s && !r.d_sigma_t && !r.d_euler;
    return r;
}

} // namespace covgrid
