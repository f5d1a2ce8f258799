#include "covgrid/grid_domain.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "covgrid/errors.hpp"

namespace covgrid {

namespace {

// Packs a normalized coordinate triple into a hashable word. Grid extents
// stay far below 2^20 per axis.
uint64_t pack3(int64_t x, int64_t y, int64_t z) {
    return static_cast<uint64_t>(x) | static_cast<uint64_t>(y) << 21 |
           static_cast<uint64_t>(z) << 42;
}

uint64_t pack_cell(const Cell& c) { return pack3(c[0], c[1], c[2]); }

const std::array<Cell, 6> kFaceSteps = {{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
}};

Cell add(const Cell& a, const Cell& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

void normalize(GridDomain& g) {
    Cell mn = g.cells.front();
    for (const Cell& c : g.cells)
        for (int i = 0; i < 3; ++i) mn[i] = std::min(mn[i], c[i]);
    for (Cell& c : g.cells)
        for (int i = 0; i < 3; ++i) c[i] -= mn[i];
    std::sort(g.cells.begin(), g.cells.end(), CellOrder{});
}

// Connected components over face adjacency; returns component id per cell.
std::vector<int> face_components(const std::vector<Cell>& cells) {
    std::unordered_set<uint64_t> present;
    present.reserve(cells.size() * 2);
    for (const Cell& c : cells) present.insert(pack_cell(c));

    std::vector<int> comp(cells.size(), -1);
    int next = 0;
    for (size_t s = 0; s < cells.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::queue<size_t> bfs;
        bfs.push(s);
        comp[s] = next;
        while (!bfs.empty()) {
            size_t i = bfs.front();
            bfs.pop();
            for (const Cell& d : kFaceSteps) {
                Cell n = add(cells[i], d);
                if (!present.count(pack_cell(n))) continue;
                auto it = std::lower_bound(cells.begin(), cells.end(), n, CellOrder{});
                size_t j = static_cast<size_t>(it - cells.begin());
                if (comp[j] < 0) {
                    comp[j] = next;
                    bfs.push(j);
                }
            }
        }
        ++next;
    }
    return comp;
}

void validate(GridDomain& g) {
    if (g.cells.empty())
        throw InputError(ErrorKind::EmptyDomain, "domain has no cells");
    normalize(g);
    for (size_t i = 1; i < g.cells.size(); ++i)
        if (g.cells[i] == g.cells[i - 1])
            throw InputError(ErrorKind::MalformedInput, "duplicate cell in domain");
    std::vector<int> comp = face_components(g.cells);
    int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
    if (ncomp > 1) {
        std::ostringstream os;
        os << "domain is disconnected: " << ncomp << " components; representatives";
        for (int k = 0; k < ncomp; ++k) {
            size_t i = static_cast<size_t>(
                std::find(comp.begin(), comp.end(), k) - comp.begin());
            os << " (" << g.cells[i][0] << "," << g.cells[i][1];
            if (g.dim == 3) os << "," << g.cells[i][2];
            os << ")";
        }
        throw InputError(ErrorKind::Disconnected, os.str());
    }
}

GridDomain parse_ascii(const std::string& text, const std::string& name) {
    GridDomain g;
    g.name = name;
    std::vector<std::string> lines;
    {
        std::string line;
        std::istringstream is(text);
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();

    int z = 0, y = 0;
    bool multilayer = false;
    std::vector<size_t> line_no, line_len;
    for (size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& line = lines[ln];
        if (line.empty()) {
            if (y == 0)
                throw InputError(ErrorKind::MalformedInput,
                                 "line " + std::to_string(ln + 1) + ": empty layer");
            ++z;
            y = 0;
            multilayer = true;
            continue;
        }
        line_no.push_back(ln + 1);
        line_len.push_back(line.size());
        for (size_t x = 0; x < line.size(); ++x) {
            char ch = line[x];
            if (ch == '#')
                g.cells.push_back({static_cast<int32_t>(x), y, z});
            else if (ch != '.')
                throw InputError(ErrorKind::MalformedInput,
                                 "line " + std::to_string(ln + 1) + ", column " +
                                     std::to_string(x + 1) + ": expected '#' or '.'");
        }
        ++y;
    }
    if (multilayer) {
        for (size_t i = 0; i < line_len.size(); ++i)
            if (line_len[i] != line_len[0])
                throw InputError(ErrorKind::MalformedInput,
                                 "line " + std::to_string(line_no[i]) +
                                     ": ragged line length in a 3D description");
    }
    g.dim = multilayer ? 3 : 2;
    validate(g);
    return g;
}

GridDomain parse_json(const std::string& text, const std::string& name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(ErrorKind::MalformedInput, std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("cells"))
        throw InputError(ErrorKind::MalformedInput, "JSON domain needs {dim, cells}");
    GridDomain g;
    g.name = name;
    g.dim = j["dim"].get<int>();
    if (g.dim != 2 && g.dim != 3)
        throw InputError(ErrorKind::DimensionUnsupported, "dim must be 2 or 3");
    for (const auto& row : j["cells"]) {
        if (!row.is_array() || static_cast<int>(row.size()) != g.dim)
            throw InputError(ErrorKind::MalformedInput,
                             "each cell must have exactly dim coordinates");
        Cell c{0, 0, 0};
        for (int i = 0; i < g.dim; ++i) c[i] = row[i].get<int32_t>();
        g.cells.push_back(c);
    }
    validate(g);
    return g;
}

} // namespace

int GridDomain::cell_index(const Cell& c) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), c, CellOrder{});
    if (it == cells.end() || *it != c) return -1;
    return static_cast<int>(it - cells.begin());
}

GridDomain parse_domain(const std::string& text, const std::string& name) {
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return parse_json(text, name);
    return parse_ascii(text, name);
}

std::string serialize_domain(const GridDomain& g) {
    Cell mx{0, 0, 0};
    for (const Cell& c : g.cells)
        for (int i = 0; i < 3; ++i) mx[i] = std::max(mx[i], c[i]);
    std::string out;
    for (int z = 0; z <= mx[2]; ++z) {
        if (z > 0) out += '\n';
        for (int y = 0; y <= mx[1]; ++y) {
            for (int x = 0; x <= mx[0]; ++x)
                out += g.contains({x, y, z}) ? '#' : '.';
            out += '\n';
        }
    }
    return out;
}

DomainSummary domain_summary(const GridDomain& g) {
    DomainSummary s;
    s.A = g.cell_count();
    s.dim = g.dim;
    for (int i = 0; i < 3; ++i) {
        s.bbox_min[i] = 0;
        s.bbox_max[i] = 0;
    }
    for (const Cell& c : g.cells)
        for (int i = 0; i < 3; ++i) s.bbox_max[i] = std::max(s.bbox_max[i], c[i]);

    // chi of the cubical complex: count distinct corners, unit edges, unit
    // faces (and unit cubes in 3D) spanned by the plaques.
    std::unordered_set<uint64_t> verts, edges, faces;
    verts.reserve(g.cells.size() * 4);
    edges.reserve(g.cells.size() * 4);
    auto edge_id = [](int x, int y, int z, int axis) {
        return pack3(x, y, z) | static_cast<uint64_t>(axis) << 62;
    };
    if (g.dim == 2) {
        for (const Cell& c : g.cells) {
            for (int dx = 0; dx <= 1; ++dx)
                for (int dy = 0; dy <= 1; ++dy)
                    verts.insert(pack3(c[0] + dx, c[1] + dy, 0));
            edges.insert(edge_id(c[0], c[1], 0, 0));
            edges.insert(edge_id(c[0], c[1] + 1, 0, 0));
            edges.insert(edge_id(c[0], c[1], 0, 1));
            edges.insert(edge_id(c[0] + 1, c[1], 0, 1));
        }
        s.euler = static_cast<int64_t>(verts.size()) -
                  static_cast<int64_t>(edges.size()) +
                  static_cast<int64_t>(g.cells.size());
        s.holes_g = 1 - s.euler;
        assert(*s.holes_g >= 0);
    } else {
        auto face_id = [](int x, int y, int z, int normal) {
            return pack3(x, y, z) | static_cast<uint64_t>(normal) << 62;
        };
        for (const Cell& c : g.cells) {
            for (int dx = 0; dx <= 1; ++dx)
                for (int dy = 0; dy <= 1; ++dy)
                    for (int dz = 0; dz <= 1; ++dz)
                        verts.insert(pack3(c[0] + dx, c[1] + dy, c[2] + dz));
            for (int axis = 0; axis < 3; ++axis)
                for (int u = 0; u <= 1; ++u)
                    for (int v = 0; v <= 1; ++v) {
                        int d[3] = {0, 0, 0};
                        d[(axis + 1) % 3] = u;
                        d[(axis + 2) % 3] = v;
                        edges.insert(edge_id(c[0] + d[0], c[1] + d[1], c[2] + d[2], axis));
                    }
            for (int normal = 0; normal < 3; ++normal)
                for (int w = 0; w <= 1; ++w) {
                    int d[3] = {0, 0, 0};
                    d[normal] = w;
                    faces.insert(face_id(c[0] + d[0], c[1] + d[1], c[2] + d[2], normal));
                }
        }
        s.euler = static_cast<int64_t>(verts.size()) -
                  static_cast<int64_t>(edges.size()) +
                  static_cast<int64_t>(faces.size()) -
                  static_cast<int64_t>(g.cells.size());
        // A hole count from chi alone is only well defined when there is
        // nothing to count: report it for solid boxes, omit otherwise.
        int64_t volume = static_cast<int64_t>(s.bbox_max[0] + 1) *
                         (s.bbox_max[1] + 1) * (s.bbox_max[2] + 1);
        if (volume == s.A) s.holes_g = 0;
    }
    return s;
}

GridDomain box_domain(int nx, int ny, int nz) {
    if (nx < 1 || ny < 1 || nz < 1)
        throw InputError(ErrorKind::BadArgument, "box extents must be positive");
    GridDomain g;
    g.dim = nz > 1 ? 3 : 2;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) g.cells.push_back({x, y, z});
    std::ostringstream nm;
    nm << nx << "x" << ny;
    if (nz > 1) nm << "x" << nz;
    g.name = nm.str();
    return g;
}

namespace {

// Incremental chi bookkeeping for the 2D generator. Corner and edge
// membership is derived from the cell set, so only one set is maintained.
struct Growth {
    std::unordered_set<uint64_t> cells;

    bool has(int x, int y) const { return cells.count(pack3(x + 64, y + 64, 0)) > 0; }
    void put(int x, int y) { cells.insert(pack3(x + 64, y + 64, 0)); }
    void drop(int x, int y) { cells.erase(pack3(x + 64, y + 64, 0)); }

    bool corner_used(int x, int y) const {
        return has(x, y) || has(x - 1, y) || has(x, y - 1) || has(x - 1, y - 1);
    }
    bool hedge_used(int x, int y) const { return has(x, y) || has(x, y - 1); }
    bool vedge_used(int x, int y) const { return has(x, y) || has(x - 1, y); }

    // chi delta from adding plaque (x, y), assuming it is absent.
    int add_delta(int x, int y) const {
        int dv = !corner_used(x, y) + !corner_used(x + 1, y) +
                 !corner_used(x, y + 1) + !corner_used(x + 1, y + 1);
        int de = !hedge_used(x, y) + !hedge_used(x, y + 1) +
                 !vedge_used(x, y) + !vedge_used(x + 1, y);
        return dv - de + 1;
    }
    bool interior(int x, int y) const {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                if ((dx || dy) && !has(x + dx, y + dy)) return false;
        return true;
    }
};

GridDomain finish_random(std::vector<Cell> cells, int A, int g, uint64_t seed) {
    GridDomain d;
    d.dim = 2;
    d.cells = std::move(cells);
    std::ostringstream nm;
    nm << "random-A" << A << "-g" << g << "-s" << seed;
    d.name = nm.str();
    validate(d);
    return d;
}

// Deterministic fallback: a 3-row comb with g holes in the middle row,
// extended column by column to reach A cells. Exists whenever A >= 5g + 3.
GridDomain comb_domain(int A, int g, uint64_t seed) {
    std::vector<Cell> cells;
    int base_w = 2 * g + 1;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < base_w; ++x)
            if (!(y == 1 && x % 2 == 1 && x / 2 < g)) cells.push_back({x, y, 0});
    int x = base_w;
    while (static_cast<int>(cells.size()) < A) {
        for (int y = 0; y < 3 && static_cast<int>(cells.size()) < A; ++y)
            cells.push_back({x, y, 0});
        ++x;
    }
    return finish_random(std::move(cells), A, g, seed);
}

} // namespace

GridDomain random_domain(int A, int g, uint64_t seed) {
    if (A < 1) throw InputError(ErrorKind::BadArgument, "A must be >= 1");
    if (g < 0) throw InputError(ErrorKind::BadArgument, "g must be >= 0");
    if (g > 0 && A < 5 * g + 3)
        throw InputError(ErrorKind::Infeasible,
                         "A=" + std::to_string(A) + " cannot host " +
                             std::to_string(g) + " interior holes (need A >= " +
                             std::to_string(5 * g + 3) + ")");

    std::mt19937_64 rng(seed ^ 0x5eedc0de);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Growth gr;
        std::vector<Cell> placed;
        gr.put(0, 0);
        placed.push_back({0, 0, 0});
        // Grow a contractible polyomino of A + g cells: only accept boundary
        // cells whose addition keeps chi = 1.
        while (static_cast<int>(placed.size()) < A + g) {
            std::vector<Cell> cand;
            for (const Cell& c : placed)
                for (int k = 0; k < 4; ++k) {
                    int x = c[0] + kFaceSteps[k][0], y = c[1] + kFaceSteps[k][1];
                    if (!gr.has(x, y) && gr.add_delta(x, y) == 0)
                        cand.push_back({x, y, 0});
                }
            std::sort(cand.begin(), cand.end(), CellOrder{});
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
            const Cell& pick = cand[rng() % cand.size()];
            gr.put(pick[0], pick[1]);
            placed.push_back(pick);
        }
        // Punch g holes at interior cells. Punching a cell with all eight
        // neighbours present drops chi by exactly 1 and keeps connectivity;
        // the candidate rule also keeps holes pairwise non-adjacent.
        int punched = 0;
        while (punched < g) {
            std::vector<size_t> cand;
            for (size_t i = 0; i < placed.size(); ++i)
                if (placed[i][2] == 0 && gr.interior(placed[i][0], placed[i][1]))
                    cand.push_back(i);
            if (cand.empty()) break;
            size_t pick = cand[rng() % cand.size()];
            gr.drop(placed[pick][0], placed[pick][1]);
            placed[pick][2] = 1; // mark removed
            ++punched;
        }
        if (punched < g) continue;
        std::vector<Cell> cells;
        for (const Cell& c : placed)
            if (c[2] == 0) cells.push_back(c);
        GridDomain d = finish_random(std::move(cells), A, g, seed);
        DomainSummary s = domain_summary(d);
        if (s.euler == 1 - g) return d;
    }
    return comb_domain(A, g, seed);
}

} // namespace covgrid
