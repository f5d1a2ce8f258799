#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <map>
#include <vector>

#include "covgrid/assembly.hpp"
#include "covgrid/errors.hpp"
#include "covgrid/grid_domain.hpp"
#include "covgrid/morse.hpp"

using namespace covgrid;

namespace {

Key128 vkey(uint64_t i) {
    return {static_cast<uint64_t>(CellClass::OverlapVertex) << 56, i};
}
Key128 ekey(uint64_t i, CellClass cls = CellClass::QEdge) {
    return {static_cast<uint64_t>(cls) << 56, i};
}
Key128 fkey(uint64_t i, CellClass cls = CellClass::Square) {
    return {static_cast<uint64_t>(cls) << 56, i};
}

MorseMatching manual_matching(const CellComplex& cx,
                              std::vector<std::pair<uint32_t, uint32_t>> pairs,
                              MorseMatching::Rule rule) {
    MorseMatching m;
    m.pair_of_face.assign(cx.size(), MorseMatching::npos);
    m.pair_of_edge.assign(cx.size(), MorseMatching::npos);
    for (auto [e, f] : pairs) {
        uint32_t idx = static_cast<uint32_t>(m.edge_of.size());
        m.edge_of.push_back(e);
        m.face_of.push_back(f);
        m.rule_of.push_back(rule);
        m.pair_of_edge[e] = idx;
        m.pair_of_face[f] = idx;
    }
    return m;
}

void check_pipeline(const char* text) {
    CAPTURE(text);
    BuildResult r = build_covering_complex(parse_domain(text));
    REQUIRE(r.complex.has_value());
    const CellComplex& cx = *r.complex;

    MorseMatching m = build_matching(cx);
    MatchingReport rep = verify_matching(cx, m);
    CHECK(rep.valid);
    CHECK(rep.acyclic);
    CHECK(rep.complete);
    CHECK(rep.matched_faces == rep.faces);
    CHECK(static_cast<int64_t>(m.size()) == cx.count(2));

    MorseSummary ms = morse_complex(cx, m);
    CHECK(ms.critical_vertices == cx.count(0));
    CHECK(ms.critical_edges == cx.count(1) - cx.count(2));
    CHECK(ms.critical_faces == 0);
    CHECK(ms.euler == cx.euler_characteristic());

    std::vector<int64_t> direct = cx.betti();
    direct.resize(3, 0);
    std::vector<int64_t> viaMorse = ms.betti;
    viaMorse.resize(3, 0);
    CHECK(direct == viaMorse);

    CollapseSchedule cs = free_collapse_schedule(cx, m);
    CHECK(cs.success);
    CHECK(cs.steps == m.size());
}

} // namespace

TEST_CASE("the collapse pipeline works on small domains end to end") {
    check_pipeline("##\n");
    check_pipeline("###\n");
    check_pipeline("#.\n##\n");
    check_pipeline("##\n##\n");
    check_pipeline("###\n###\n");
}

TEST_CASE("matched edges always lie on their face's boundary") {
    BuildResult r = build_covering_complex(parse_domain("###\n###\n"));
    const CellComplex& cx = *r.complex;
    MorseMatching m = build_matching(cx);

    for (size_t i = 0; i < m.size(); ++i) {
        uint32_t e = m.edge_of[i], f = m.face_of[i];
        auto bd = cx.boundary(f);
        CHECK(std::find(bd.begin(), bd.end(), e) != bd.end());
        switch (m.rule_of[i]) {
        case MorseMatching::Rule::TriangleSwarm:
            CHECK(cx.class_of(f) == CellClass::Triangle);
            CHECK(cx.class_of(e) == CellClass::SwarmEdge);
            break;
        case MorseMatching::Rule::TriangleHalf: {
            CHECK(cx.class_of(f) == CellClass::Triangle);
            CHECK(cx.class_of(e) == CellClass::HalfEdge);
            // the larger of the boundary's half-edges is chosen
            for (uint32_t b : bd)
                if (cx.class_of(b) == CellClass::HalfEdge)
                    CHECK_FALSE(cx.key_of(e) < cx.key_of(b));
            break;
        }
        case MorseMatching::Rule::SquareSeed:
        case MorseMatching::Rule::SquareWavefront:
            CHECK(cx.class_of(f) == CellClass::Square);
            CHECK(cx.class_of(e) == CellClass::QEdge);
            break;
        }
    }
}

TEST_CASE("rule usage matches the crossing structure") {
    // length-2 runs only: every triangle pairs with a half-edge
    BuildResult two = build_covering_complex(parse_domain("##\n"));
    MorseMatching m2 = build_matching(*two.complex);
    for (auto r : m2.rule_of) CHECK(r == MorseMatching::Rule::TriangleHalf);

    // a length-3 run brings swarm shifts and their triangles
    BuildResult three = build_covering_complex(parse_domain("###\n"));
    MorseMatching m3 = build_matching(*three.complex);
    int64_t swarm_rules = 0;
    for (auto r : m3.rule_of)
        if (r == MorseMatching::Rule::TriangleSwarm) ++swarm_rules;
    int64_t swarm_edges = 0;
    for (uint32_t e : three.complex->cells_of_dim(1))
        if (three.complex->class_of(e) == CellClass::SwarmEdge) ++swarm_edges;
    CHECK(swarm_rules == swarm_edges); // one triangle per swarm edge
    CHECK(swarm_rules == 24);

    // squares collapse through one seed or wavefront pair each
    BuildResult sq = build_covering_complex(parse_domain("##\n##\n"));
    MorseMatching msq = build_matching(*sq.complex);
    std::map<MorseMatching::Rule, int64_t> hist;
    for (auto r : msq.rule_of) ++hist[r];
    CHECK(hist[MorseMatching::Rule::SquareSeed] +
              hist[MorseMatching::Rule::SquareWavefront] ==
          sq.built.sigma_s);
    CHECK(hist[MorseMatching::Rule::SquareSeed] >= 1);
    CHECK(hist[MorseMatching::Rule::TriangleHalf] == sq.built.sigma_t);
}

TEST_CASE("matchings are deterministic") {
    BuildResult a = build_covering_complex(parse_domain("##\n##\n"));
    BuildResult b = build_covering_complex(parse_domain("##\n##\n"));
    MorseMatching ma = build_matching(*a.complex);
    MorseMatching mb = build_matching(*b.complex);
    CHECK(ma.edge_of == mb.edge_of);
    CHECK(ma.face_of == mb.face_of);
    CHECK(ma.rule_of == mb.rule_of);
}

TEST_CASE("a cyclic matching is caught by the verifier") {
    // two triangles glued along two parallel edges, matched crosswise
    CellComplex cx;
    uint32_t v0 = cx.add_cell(0, {}, vkey(0), CellClass::OverlapVertex);
    uint32_t v1 = cx.add_cell(0, {}, vkey(1), CellClass::OverlapVertex);
    std::array<uint32_t, 2> vb{v0, v1};
    uint32_t e1 = cx.add_cell(1, vb, ekey(1, CellClass::HalfEdge), CellClass::HalfEdge);
    uint32_t e2 = cx.add_cell(1, vb, ekey(2, CellClass::HalfEdge), CellClass::HalfEdge);
    uint32_t e3 = cx.add_cell(1, vb, ekey(3, CellClass::HalfEdge), CellClass::HalfEdge);
    uint32_t e4 = cx.add_cell(1, vb, ekey(4, CellClass::HalfEdge), CellClass::HalfEdge);
    std::array<uint32_t, 3> b1{e1, e2, e3}, b2{e1, e2, e4};
    uint32_t t1 = cx.add_cell(2, b1, fkey(1, CellClass::Triangle), CellClass::Triangle);
    uint32_t t2 = cx.add_cell(2, b2, fkey(2, CellClass::Triangle), CellClass::Triangle);

    MorseMatching m = manual_matching(cx, {{e1, t1}, {e2, t2}},
                                      MorseMatching::Rule::TriangleHalf);
    MatchingReport rep = verify_matching(cx, m);
    CHECK(rep.valid);
    CHECK(rep.complete);
    CHECK_FALSE(rep.acyclic);
    CHECK_FALSE(rep.detail.empty());

    // the same pairs the other way around have no chained boundary edge
    MorseMatching ok = manual_matching(cx, {{e3, t1}, {e4, t2}},
                                       MorseMatching::Rule::TriangleHalf);
    MatchingReport rep2 = verify_matching(cx, ok);
    CHECK(rep2.valid);
    CHECK(rep2.acyclic);
    CHECK(free_collapse_schedule(cx, ok).success);
}

TEST_CASE("a matched edge shared with an unmatched face never frees") {
    CellComplex cx;
    std::vector<uint32_t> vs;
    for (int i = 0; i < 6; ++i)
        vs.push_back(cx.add_cell(0, {}, vkey(i), CellClass::OverlapVertex));
    auto edge = [&](uint64_t n, uint32_t a, uint32_t b) {
        std::array<uint32_t, 2> vb{a, b};
        return cx.add_cell(1, vb, ekey(n), CellClass::QEdge);
    };
    // two squares around a shared rung
    uint32_t shared = edge(0, vs[1], vs[4]);
    std::array<uint32_t, 4> sq1{edge(1, vs[0], vs[1]), shared,
                                edge(2, vs[3], vs[4]), edge(3, vs[0], vs[3])};
    std::array<uint32_t, 4> sq2{edge(4, vs[1], vs[2]), shared,
                                edge(5, vs[4], vs[5]), edge(6, vs[2], vs[5])};
    uint32_t s1 = cx.add_cell(2, sq1, fkey(1), CellClass::Square);
    cx.add_cell(2, sq2, fkey(2), CellClass::Square);

    MorseMatching m = manual_matching(cx, {{shared, s1}},
                                      MorseMatching::Rule::SquareSeed);
    MatchingReport rep = verify_matching(cx, m);
    CHECK(rep.valid);
    CHECK(rep.acyclic);
    CHECK_FALSE(rep.complete);

    CollapseSchedule cs = free_collapse_schedule(cx, m);
    CHECK_FALSE(cs.success);
    CHECK(cs.steps == 0);
    CHECK_FALSE(cs.detail.empty());
}

TEST_CASE("a pair whose edge misses the face boundary is invalid") {
    CellComplex cx;
    std::vector<uint32_t> vs;
    for (int i = 0; i < 4; ++i)
        vs.push_back(cx.add_cell(0, {}, vkey(i), CellClass::OverlapVertex));
    auto edge = [&](uint64_t n, uint32_t a, uint32_t b) {
        std::array<uint32_t, 2> vb{a, b};
        return cx.add_cell(1, vb, ekey(n), CellClass::QEdge);
    };
    std::array<uint32_t, 3> tri{edge(0, vs[0], vs[1]), edge(1, vs[1], vs[2]),
                                edge(2, vs[0], vs[2])};
    uint32_t stray = edge(9, vs[2], vs[3]);
    uint32_t f = cx.add_cell(2, tri, fkey(0, CellClass::Triangle), CellClass::Triangle);

    MorseMatching m = manual_matching(cx, {{stray, f}},
                                      MorseMatching::Rule::TriangleHalf);
    MatchingReport rep = verify_matching(cx, m);
    CHECK_FALSE(rep.valid);
    CHECK_FALSE(rep.detail.empty());
}

TEST_CASE("three-dimensional complexes are rejected") {
    CellComplex cx;
    uint32_t v[8];
    for (int i = 0; i < 8; ++i)
        v[i] = cx.add_cell(0, {}, vkey(i), CellClass::OverlapVertex);
    std::map<std::pair<int, int>, uint32_t> e;
    uint64_t en = 0;
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
            if (__builtin_popcount(a ^ b) == 1) {
                std::array<uint32_t, 2> vb{v[a], v[b]};
                e[{a, b}] = cx.add_cell(1, vb, ekey(en++), CellClass::QEdge);
            }
    auto eid = [&](int a, int b) { return e[{std::min(a, b), std::max(a, b)}]; };
    std::vector<uint32_t> sqs;
    uint64_t fn = 0;
    for (int axis1 = 0; axis1 < 3; ++axis1)
        for (int axis2 = axis1 + 1; axis2 < 3; ++axis2)
            for (int base = 0; base < 8; ++base) {
                if (base & (1 << axis1) || base & (1 << axis2)) continue;
                int p = base, q1 = base | 1 << axis1, q2 = base | 1 << axis2,
                    r = base | 1 << axis1 | 1 << axis2;
                std::array<uint32_t, 4> sb{eid(p, q1), eid(p, q2), eid(q1, r),
                                           eid(q2, r)};
                sqs.push_back(cx.add_cell(2, sb, fkey(fn++), CellClass::Square));
            }
    REQUIRE(sqs.size() == 6);
    Key128 ck{static_cast<uint64_t>(CellClass::Cube) << 56, 0};
    cx.add_cell(3, sqs, ck, CellClass::Cube);

    try {
        build_matching(cx);
        FAIL("cubes cannot be collapsed by the edge-face scheme");
    } catch (const InputError& err) {
        CHECK(err.kind() == ErrorKind::DimensionUnsupported);
    }
}

TEST_CASE("critical complexes preserve circle counts on a handmade shape") {
    // a square with a dangling 4-cycle: one disk, one genuine circle
    CellComplex cx;
    std::vector<uint32_t> vs;
    for (int i = 0; i < 7; ++i)
        vs.push_back(cx.add_cell(0, {}, vkey(i), CellClass::OverlapVertex));
    auto edge = [&](uint64_t n, uint32_t a, uint32_t b) {
        std::array<uint32_t, 2> vb{a, b};
        return cx.add_cell(1, vb, ekey(n), CellClass::QEdge);
    };
    std::array<uint32_t, 4> sq{edge(0, vs[0], vs[1]), edge(1, vs[1], vs[2]),
                               edge(2, vs[2], vs[3]), edge(3, vs[0], vs[3])};
    uint32_t f = cx.add_cell(2, sq, fkey(0), CellClass::Square);
    edge(4, vs[3], vs[4]);
    edge(5, vs[4], vs[5]);
    edge(6, vs[5], vs[6]);
    edge(7, vs[3], vs[6]);

    MorseMatching m = build_matching(cx);
    REQUIRE(m.size() == 1);
    CHECK(m.face_of[0] == f);
    MatchingReport rep = verify_matching(cx, m);
    CHECK(rep.valid);
    CHECK(rep.acyclic);
    CHECK(rep.complete);

    MorseSummary ms = morse_complex(cx, m);
    CHECK(ms.critical_edges == 7);
    CHECK(ms.euler == 0); // a disk and a circle sharing one vertex
    REQUIRE(ms.betti.size() >= 2);
    CHECK(ms.betti[0] == 1);
    CHECK(ms.betti[1] == 1);
    CHECK(free_collapse_schedule(cx, m).success);
}
