#include "covgrid/morse.hpp"

#include <algorithm>
#include <queue>

#include "covgrid/errors.hpp"

namespace covgrid {
namespace {

bool is_edge_class(CellClass c) {
    return c == CellClass::QEdge || c == CellClass::HalfEdge ||
           c == CellClass::SwarmEdge;
}

} // namespace

MorseMatching build_matching(const CellComplex& cx) {
    if (cx.count(3) > 0)
        throw InputError(ErrorKind::DimensionUnsupported,
                         "the collapse scheme handles complexes without 3-cells");
    MorseMatching m;
    m.pair_of_face.assign(cx.size(), MorseMatching::npos);
    m.pair_of_edge.assign(cx.size(), MorseMatching::npos);
    auto match = [&](uint32_t e, uint32_t f, MorseMatching::Rule r) {
        uint32_t idx = static_cast<uint32_t>(m.edge_of.size());
        m.edge_of.push_back(e);
        m.face_of.push_back(f);
        m.rule_of.push_back(r);
        m.pair_of_face[f] = idx;
        m.pair_of_edge[e] = idx;
    };

    // triangles first: each grabs an edge no square competes for
    std::vector<uint32_t> faces = cx.cells_of_dim(2);
    for (uint32_t f : faces) {
        if (cx.class_of(f) != CellClass::Triangle) continue;
        auto bd = cx.boundary(f);
        uint32_t swarm = MorseMatching::npos;
        uint32_t half_hi = MorseMatching::npos;
        for (uint32_t e : bd) {
            CellClass c = cx.class_of(e);
            if (c == CellClass::SwarmEdge) {
                swarm = e;
            } else if (c == CellClass::HalfEdge) {
                if (half_hi == MorseMatching::npos ||
                    cx.key_of(half_hi) < cx.key_of(e))
                    half_hi = e;
            }
        }
        if (swarm != MorseMatching::npos)
            match(swarm, f, MorseMatching::Rule::TriangleSwarm);
        else
            match(half_hi, f, MorseMatching::Rule::TriangleHalf);
    }

    // squares: peel from edges with a single live square coface
    CellComplex::Coboundary cob = cx.coboundary(1);
    std::vector<uint32_t> edges = cx.cells_of_dim(1);
    std::vector<uint32_t> live(edges.size(), 0);
    std::vector<uint8_t> seeded(edges.size(), 0);
    std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> q;
    for (size_t r = 0; r < edges.size(); ++r) {
        for (uint32_t f : cob.cofaces(static_cast<uint32_t>(r)))
            if (cx.class_of(f) == CellClass::Square) ++live[r];
        if (live[r] == 1) {
            seeded[r] = 1;
            q.push(edges[r]);
        }
    }
    while (!q.empty()) {
        uint32_t e = q.top();
        q.pop();
        uint32_t r = cob.row_of[e];
        if (live[r] != 1 || m.pair_of_edge[e] != MorseMatching::npos) continue;
        uint32_t sq = MorseMatching::npos;
        for (uint32_t f : cob.cofaces(r))
            if (cx.class_of(f) == CellClass::Square &&
                m.pair_of_face[f] == MorseMatching::npos)
                sq = f;
        if (sq == MorseMatching::npos) continue;
        match(e, sq,
              seeded[r] ? MorseMatching::Rule::SquareSeed
                        : MorseMatching::Rule::SquareWavefront);
        for (uint32_t a : cx.boundary(sq)) {
            uint32_t ra = cob.row_of[a];
            if (--live[ra] == 1 && m.pair_of_edge[a] == MorseMatching::npos)
                q.push(a);
        }
    }
    return m;
}

MatchingReport verify_matching(const CellComplex& cx, const MorseMatching& m) {
    MatchingReport rep;
    rep.faces = static_cast<uint64_t>(cx.count(2));
    rep.matched_faces = m.size();

    // structural validity
    for (size_t i = 0; i < m.size(); ++i) {
        uint32_t e = m.edge_of[i], f = m.face_of[i];
        if (e >= cx.size() || f >= cx.size() || cx.dim_of(e) != 1 || cx.dim_of(f) != 2 ||
            !is_edge_class(cx.class_of(e))) {
            rep.detail = "pair " + std::to_string(i) + " is not an (edge, 2-cell) pair";
            return rep;
        }
        if (m.pair_of_edge[e] != i || m.pair_of_face[f] != i) {
            rep.detail = "pair " + std::to_string(i) + " reuses a cell";
            return rep;
        }
        auto bd = cx.boundary(f);
        if (std::find(bd.begin(), bd.end(), e) == bd.end()) {
            rep.detail = "pair " + std::to_string(i) + " is not incident";
            return rep;
        }
    }
    rep.valid = true;
    rep.complete = rep.matched_faces == rep.faces;

    // acyclicity of f -> f' whenever some non-matched boundary edge of f is
    // the matched edge of f'
    std::vector<uint8_t> color(m.size(), 0); // 0 fresh, 1 on stack, 2 done
    std::vector<std::pair<uint32_t, uint32_t>> stack; // (pair idx, boundary pos)
    for (uint32_t s = 0; s < m.size(); ++s) {
        if (color[s]) continue;
        stack.push_back({s, 0});
        color[s] = 1;
        while (!stack.empty()) {
            auto& [p, pos] = stack.back();
            auto bd = cx.boundary(m.face_of[p]);
            if (pos >= bd.size()) {
                color[p] = 2;
                stack.pop_back();
                continue;
            }
            uint32_t a = bd[pos++];
            if (a == m.edge_of[p]) continue;
            uint32_t p2 = m.pair_of_edge[a];
            if (p2 == MorseMatching::npos || p2 == p) continue;
            if (color[p2] == 1) {
                rep.detail = "directed cycle through 2-cell id " +
                             std::to_string(m.face_of[p2]);
                return rep;
            }
            if (color[p2] == 0) {
                color[p2] = 1;
                stack.push_back({p2, 0});
            }
        }
    }
    rep.acyclic = true;
    if (!rep.complete)
        rep.detail = std::to_string(rep.faces - rep.matched_faces) +
                     " 2-cells left unmatched";
    return rep;
}

MorseSummary morse_complex(const CellComplex& cx, const MorseMatching& m) {
    MorseSummary s;
    s.critical_vertices = cx.count(0);
    s.critical_faces = cx.count(2) - static_cast<int64_t>(m.size());

    std::vector<uint32_t> parent(cx.size());
    for (uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    int64_t forest = 0;
    for (uint32_t e : cx.cells_of_dim(1)) {
        if (m.pair_of_edge[e] != MorseMatching::npos) continue;
        ++s.critical_edges;
        auto bd = cx.boundary(e);
        uint32_t a = find(bd[0]), b = find(bd[1]);
        if (a != b) {
            parent[a] = b;
            ++forest;
        }
    }
    int64_t b0 = s.critical_vertices - forest;
    int64_t b1 = s.critical_edges - forest;
    s.euler = s.critical_vertices - s.critical_edges + s.critical_faces;
    s.betti = {b0, b1, 0};
    return s;
}

CollapseSchedule free_collapse_schedule(const CellComplex& cx, const MorseMatching& m) {
    CollapseSchedule sched;
    CellComplex::Coboundary cob = cx.coboundary(1);
    std::vector<uint32_t> edges = cx.cells_of_dim(1);
    std::vector<uint32_t> live(edges.size(), 0);
    std::vector<uint8_t> face_live(cx.size(), 0);
    for (uint32_t f : cx.cells_of_dim(2)) face_live[f] = 1;
    std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> q;
    for (size_t r = 0; r < edges.size(); ++r) {
        live[r] = static_cast<uint32_t>(cob.cofaces(static_cast<uint32_t>(r)).size());
        if (live[r] == 1 && m.pair_of_edge[edges[r]] != MorseMatching::npos)
            q.push(edges[r]);
    }
    while (!q.empty()) {
        uint32_t e = q.top();
        q.pop();
        uint32_t r = cob.row_of[e];
        uint32_t p = m.pair_of_edge[e];
        if (live[r] != 1 || p == MorseMatching::npos) continue;
        uint32_t f = m.face_of[p];
        if (!face_live[f]) continue;
        face_live[f] = 0;
        ++sched.steps;
        for (uint32_t a : cx.boundary(f)) {
            if (a == e) continue;
            uint32_t ra = cob.row_of[a];
            if (--live[ra] == 1 && m.pair_of_edge[a] != MorseMatching::npos &&
                face_live[m.face_of[m.pair_of_edge[a]]])
                q.push(a);
        }
    }
    sched.success = sched.steps == m.size();
    if (!sched.success)
        sched.detail = std::to_string(m.size() - sched.steps) +
                       " matched pairs never became free";
    return sched;
}

} // namespace covgrid
