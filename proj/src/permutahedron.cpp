#include "covgrid/permutahedron.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "covgrid/errors.hpp"

namespace covgrid {

namespace {

// Lexicographic rank of a permutation among all orderings of its multiset of
// distinct labels. Quadratic, fine for the template sizes in play.
uint32_t lex_rank(const std::vector<uint8_t>& p) {
    uint32_t rank = 0;
    uint32_t fact = 1;
    for (size_t i = 2; i <= p.size(); ++i) fact *= static_cast<uint32_t>(i);
    for (size_t i = 0; i < p.size(); ++i) {
        fact /= static_cast<uint32_t>(p.size() - i);
        uint32_t smaller = 0;
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[j] < p[i]) ++smaller;
        rank += smaller * fact;
    }
    return rank;
}

} // namespace

PermComplex skel1(const std::vector<uint8_t>& labels) {
    if (labels.empty())
        throw InputError(ErrorKind::BadArgument, "need at least one label");
    PermComplex pc;
    pc.m = static_cast<int>(labels.size());
    std::vector<uint8_t> perm = labels;
    std::sort(perm.begin(), perm.end());
    do {
        pc.vertices.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (pc.m > 1) pc.incident_.assign(pc.vertices.size() * (pc.m - 1), 0);
    for (uint32_t u = 0; u < pc.vertices.size(); ++u) {
        for (int pos = 1; pos < pc.m; ++pos) {
            const std::vector<uint8_t>& pu = pc.vertices[u];
            if (pu[pos - 1] > pu[pos]) continue; // record each edge once
            std::vector<uint8_t> pv = pu;
            std::swap(pv[pos - 1], pv[pos]);
            uint32_t v = lex_rank(pv);
            uint32_t e = static_cast<uint32_t>(pc.edges.size());
            pc.edges.push_back({u, v, pos});
            pc.incident_[u * (pc.m - 1) + pos - 1] = e;
            pc.incident_[v * (pc.m - 1) + pos - 1] = e;
        }
    }
    return pc;
}

PermComplex skel1(int m) {
    if (m < 1) throw InputError(ErrorKind::BadArgument, "order must be >= 1");
    std::vector<uint8_t> labels(m);
    for (int i = 0; i < m; ++i) labels[i] = static_cast<uint8_t>(i + 1);
    return skel1(labels);
}

ShiftClass classify_shift(const std::vector<uint8_t>& vertex, int k, int l) {
    int m = static_cast<int>(vertex.size());
    if (k == l)
        throw InputError(ErrorKind::SamePosition,
                         "shift positions must be distinct");
    if (k < 1 || l < 1 || k > m - 1 || l > m - 1)
        throw InputError(ErrorKind::BadArgument,
                         "transposition position out of range");
    return std::abs(k - l) == 1 ? ShiftClass::Single : ShiftClass::Swarm;
}

size_t ExpandedPerm::single_count() const {
    size_t n = 0;
    for (const ShiftEdge& s : shift_edges)
        if (s.cls == ShiftClass::Single) ++n;
    return n;
}

ExpandedPerm subdivide_and_expand(const PermComplex& p) {
    ExpandedPerm ex;
    ex.base = p;
    int m = p.m;

    ex.midpoint_canon_vertex.reserve(p.edges.size());
    for (const PermComplex::Edge& e : p.edges) {
        // skel1 records edges from the endpoint whose transposed pair ascends
        assert(p.vertices[e.u][e.pos - 1] < p.vertices[e.u][e.pos]);
        ex.midpoint_canon_vertex.push_back(e.u);
    }

    if (m > 1) {
        ex.half_edges.resize(p.vertices.size() * (m - 1));
        for (uint32_t v = 0; v < p.vertices.size(); ++v)
            for (int pos = 1; pos < m; ++pos)
                ex.half_edges[ex.half_index(v, pos)] = {v, p.edge_at(v, pos), pos};
    }

    for (uint32_t v = 0; v < p.vertices.size(); ++v)
        for (int k = 1; k < m; ++k)
            for (int l = k + 1; l < m; ++l)
                ex.shift_edges.push_back(
                    {v, k, l, classify_shift(p.vertices[v], k, l)});
    return ex;
}

int64_t FaceLattice::euler() const {
    int64_t chi = 0;
    for (int d = 0; d < static_cast<int>(faces.size()); ++d)
        chi += (d % 2 ? -1 : 1) * face_count(d);
    return chi;
}

FaceLattice k_skeleton(int m, int k) {
    if (m < 1) throw InputError(ErrorKind::BadArgument, "order must be >= 1");
    if (k < 0 || k > m - 1)
        throw InputError(ErrorKind::BadArgument,
                         "skeleton dimension must lie in [0, m-1]");
    FaceLattice fl;
    fl.m = m;
    fl.k = k;
    fl.faces.resize(k + 1);
    for (int d = 0; d <= k; ++d) {
        int b = m - d; // block count
        // enumerate surjections [m] -> [b] as base-b counters; the counter
        // order is the canonical face order
        std::vector<uint8_t> assign(m, 0);
        while (true) {
            uint32_t seen = 0;
            for (uint8_t a : assign) seen |= 1u << a;
            if (seen == (1u << b) - 1) {
                FaceLattice::Osp osp(b);
                for (int i = 0; i < m; ++i)
                    osp[assign[i]].push_back(static_cast<uint8_t>(i + 1));
                fl.faces[d].push_back(std::move(osp));
            }
            int i = m - 1;
            while (i >= 0 && assign[i] == b - 1) assign[i--] = 0;
            if (i < 0) break;
            ++assign[i];
        }
    }
    return fl;
}

} // namespace covgrid
