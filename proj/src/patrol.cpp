#include "covgrid/patrol.hpp"

#include <algorithm>
#include <cassert>

#include "covgrid/errors.hpp"

namespace covgrid {

int PatrolRegion::edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = edge_lookup_.find({a, b});
    return it == edge_lookup_.end() ? -1 : it->second;
}

PatrolRegion patrol_region(const GridDomain& g) {
    PatrolRegion q;
    q.dim = g.dim;
    q.vertices = g.cells;

    for (int i = 0; i < g.cell_count(); ++i) {
        const Cell& c = g.cells[i];
        for (int axis = 0; axis < g.dim; ++axis) {
            Cell n = c;
            ++n[axis];
            int j = g.cell_index(n);
            if (j < 0) continue;
            q.edge_lookup_[{std::min(i, j), std::max(i, j)}] =
                static_cast<int>(q.edges.size());
            q.edges.push_back({std::min(i, j), std::max(i, j), axis});
        }
    }

    // 2x2 blocks per axis plane, keyed by their minimum corner.
    std::map<std::pair<int, int>, int> square_lookup; // (min cell, plane) -> index
    for (int i = 0; i < g.cell_count(); ++i) {
        const Cell& c = g.cells[i];
        for (int plane = g.dim == 2 ? 2 : 0; plane <= 2; ++plane) {
            if (g.dim == 2 && plane != 2) continue;
            int u = (plane + 1) % 3, v = (plane + 2) % 3;
            Cell cu = c, cv = c, cuv = c;
            ++cu[u];
            ++cv[v];
            ++cuv[u];
            ++cuv[v];
            int iu = g.cell_index(cu), iv = g.cell_index(cv), iuv = g.cell_index(cuv);
            if (iu < 0 || iv < 0 || iuv < 0) continue;
            PatrolRegion::SquareCell s;
            s.corners = {i, iu, iv, iuv};
            s.edges = {q.edge_index(i, iu), q.edge_index(i, iv),
                       q.edge_index(iu, iuv), q.edge_index(iv, iuv)};
            s.plane = plane;
            square_lookup[{i, plane}] = static_cast<int>(q.squares.size());
            q.squares.push_back(s);
        }
    }
    q.K = static_cast<int64_t>(q.squares.size());

    if (g.dim == 3) {
        for (int i = 0; i < g.cell_count(); ++i) {
            const Cell& c = g.cells[i];
            std::array<int, 8> corner{};
            bool full = true;
            for (int k = 0; k < 8 && full; ++k) {
                Cell d = {c[0] + (k & 1), c[1] + ((k >> 1) & 1), c[2] + ((k >> 2) & 1)};
                corner[k] = g.cell_index(d);
                if (corner[k] < 0) full = false;
            }
            if (!full) continue;
            PatrolRegion::CubeCell cube;
            cube.corners = corner;
            // Faces: for each plane normal, the block at the low corner and
            // the one shifted by +1 along the normal.
            int f = 0;
            for (int plane = 0; plane < 3; ++plane)
                for (int w = 0; w <= 1; ++w) {
                    Cell lo = c;
                    lo[plane] += w;
                    cube.squares[f++] = square_lookup.at({g.cell_index(lo), plane});
                }
            q.cubes.push_back(cube);
        }
    }
    return q;
}

CrossingSet crossings(const PatrolRegion& q) {
    CrossingSet cs;
    int n = static_cast<int>(q.vertices.size());
    for (int axis = 0; axis < q.dim; ++axis) {
        // Sort cell indices so runs along this axis are consecutive.
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        int u = (axis + 1) % 3, v = (axis + 2) % 3;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const Cell &ca = q.vertices[a], &cb = q.vertices[b];
            if (ca[v] != cb[v]) return ca[v] < cb[v];
            if (ca[u] != cb[u]) return ca[u] < cb[u];
            return ca[axis] < cb[axis];
        });
        size_t start = 0;
        for (size_t i = 1; i <= order.size(); ++i) {
            bool split = i == order.size();
            if (!split) {
                const Cell &p = q.vertices[order[i - 1]], &c = q.vertices[order[i]];
                split = p[u] != c[u] || p[v] != c[v] || p[axis] + 1 != c[axis];
            }
            if (split) {
                CrossingSet::Crossing run;
                run.axis = axis;
                run.cells.assign(order.begin() + start, order.begin() + i);
                run.degenerate = run.cells.size() == 1;
                cs.crossings.push_back(std::move(run));
                start = i;
            }
        }
    }
    std::sort(cs.crossings.begin(), cs.crossings.end(),
              [](const CrossingSet::Crossing& a, const CrossingSet::Crossing& b) {
                  if (a.axis != b.axis) return a.axis < b.axis;
                  return a.cells.front() < b.cells.front();
              });
    for (const auto& run : cs.crossings) {
        ++cs.histogram[run.length()];
        ++cs.histogram_by_axis[run.axis][run.length()];
    }
    return cs;
}

AreaLemmaReport check_area_lemma(const DomainSummary& s, const CrossingSet& c,
                                 const PatrolRegion& q) {
    if (q.dim != 2)
        throw InputError(ErrorKind::DimensionUnsupported,
                         "the area identity is stated for 2D domains");
    AreaLemmaReport r;
    r.A = s.A;
    r.g = s.holes_g.value();
    for (const auto& [len, count] : c.histogram)
        r.crossing_term += count * (len - 1);
    r.lhs_K = q.K;
    r.rhs = 1 - r.A + r.crossing_term - r.g;
    r.pass = r.lhs_K == r.rhs;
    return r;
}

} // namespace covgrid
