#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <set>
#include <string>

#include "covgrid/errors.hpp"
#include "covgrid/grid_domain.hpp"
#include "covgrid/patrol.hpp"

using namespace covgrid;

namespace {

std::optional<ErrorKind> parse_fails(const std::string& text) {
    try {
        parse_domain(text);
    } catch (const InputError& e) {
        return e.kind();
    }
    return std::nullopt;
}

} // namespace

TEST_CASE("ascii parsing normalizes to the origin in reading order") {
    GridDomain g = parse_domain(".#\n##\n");
    CHECK(g.dim == 2);
    REQUIRE(g.cell_count() == 3);
    CHECK(g.cells[0] == Cell{1, 0, 0});
    CHECK(g.cells[1] == Cell{0, 1, 0});
    CHECK(g.cells[2] == Cell{1, 1, 0});
    CHECK(g.cell_index({0, 1, 0}) == 1);
    CHECK(g.cell_index({2, 0, 0}) == -1);
    CHECK(g.contains({1, 1, 0}));
    CHECK_FALSE(g.contains({0, 0, 0}));
}

TEST_CASE("blank lines separate layers of a 3D description") {
    GridDomain g = parse_domain("##\n##\n\n##\n##\n");
    CHECK(g.dim == 3);
    CHECK(g.cell_count() == 8);
    CHECK(g.cells.front() == Cell{0, 0, 0});
    CHECK(g.cells.back() == Cell{1, 1, 1});
}

TEST_CASE("json descriptions agree with their ascii equivalents") {
    GridDomain a = parse_domain("##\n#.\n");
    GridDomain j = parse_domain(R"({"dim": 2, "cells": [[5,3],[6,3],[5,4]]})");
    CHECK(a.cells == j.cells); // offsets normalize away

    GridDomain j3 = parse_domain(R"({"dim": 3, "cells": [[0,0,0],[0,0,1]]})");
    CHECK(j3.dim == 3);
    CHECK(j3.cell_count() == 2);
}

TEST_CASE("serialization round-trips the cell set") {
    for (const char* text : {"##\n", "###\n#.#\n###\n", "#..\n###\n",
                             "##\n##\n\n##\n##\n", "#\n\n#\n\n#\n"}) {
        GridDomain g = parse_domain(text);
        GridDomain h = parse_domain(serialize_domain(g));
        CHECK(h.dim == g.dim);
        CHECK(h.cells == g.cells);
    }
}

TEST_CASE("parse errors carry a kind and a location") {
    CHECK(parse_fails("") == ErrorKind::EmptyDomain);
    CHECK(parse_fails("...\n..\n") == ErrorKind::EmptyDomain);
    CHECK(parse_fails("#.#\n") == ErrorKind::Disconnected);
    CHECK(parse_fails("#.\n\n.#\n") == ErrorKind::Disconnected); // diagonal in z
    CHECK(parse_fails("#x#\n") == ErrorKind::MalformedInput);
    CHECK(parse_fails("###\n##\n\n###\n###\n") == ErrorKind::MalformedInput);
    CHECK(parse_fails(R"({"dim": 4, "cells": [[0,0,0,0]]})") ==
          ErrorKind::DimensionUnsupported);
    CHECK(parse_fails(R"({"dim": 2})") == ErrorKind::MalformedInput);
    CHECK(parse_fails(R"({"dim": 2, "cells": [[0,0],[0,0]]})") ==
          ErrorKind::MalformedInput);
    CHECK(parse_fails(R"({"dim": 2, "cells": [[0]]})") == ErrorKind::MalformedInput);

    try {
        parse_domain("#x#\n");
        FAIL("expected a parse error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 1, column 2") != std::string::npos);
    }
}

TEST_CASE("summaries report euler characteristic and hole count") {
    DomainSummary box = domain_summary(parse_domain("##\n##\n"));
    CHECK(box.A == 4);
    CHECK(box.dim == 2);
    CHECK(box.euler == 1);
    CHECK(box.holes_g == 0);

    DomainSummary ring = domain_summary(parse_domain("###\n#.#\n###\n"));
    CHECK(ring.A == 8);
    CHECK(ring.euler == 0);
    CHECK(ring.holes_g == 1);
    CHECK(ring.bbox_max == Cell{2, 2, 0});

    DomainSummary strip = domain_summary(parse_domain("#####\n"));
    CHECK(strip.euler == 1);
    CHECK(strip.holes_g == 0);

    DomainSummary solid = domain_summary(box_domain(2, 2, 2));
    CHECK(solid.dim == 3);
    CHECK(solid.A == 8);
    CHECK(solid.euler == 1);

    // a 3x3x3 shell retracts to a sphere
    DomainSummary shell = domain_summary(parse_domain(
        "###\n###\n###\n\n###\n#.#\n###\n\n###\n###\n###\n"));
    CHECK(shell.A == 26);
    CHECK(shell.euler == 2);
}

TEST_CASE("patrol region enumerates edges, squares and cubes") {
    PatrolRegion q = patrol_region(parse_domain("###\n###\n"));
    CHECK(q.vertices.size() == 6);
    CHECK(q.edges.size() == 7);
    CHECK(q.squares.size() == 2);
    CHECK(q.K == 2);
    CHECK(q.edge_index(0, 1) >= 0);
    CHECK(q.edge_index(0, 4) == -1);
    CHECK(q.edge_index(0, 2) == -1); // same row, not adjacent
    for (const auto& s : q.squares) {
        CHECK(s.plane == 2);
        // each listed edge joins two of the square's corners
        for (int ei : s.edges) {
            const auto& e = q.edges[ei];
            int hits = 0;
            for (int c : s.corners) hits += (c == e.a) + (c == e.b);
            CHECK(hits == 2);
        }
    }

    PatrolRegion ring = patrol_region(parse_domain("###\n#.#\n###\n"));
    CHECK(ring.edges.size() == 8);
    CHECK(ring.K == 0);

    PatrolRegion cube = patrol_region(box_domain(2, 2, 2));
    CHECK(cube.edges.size() == 12);
    CHECK(cube.squares.size() == 6);
    CHECK(cube.cubes.size() == 1);
    CHECK(cube.K == 6);
    for (int si : cube.cubes[0].squares) CHECK(si >= 0);
}

TEST_CASE("crossings are maximal runs with an exact histogram") {
    CrossingSet c22 = crossings(patrol_region(parse_domain("##\n##\n")));
    CHECK(c22.histogram == std::map<int, int64_t>{{2, 4}});

    CrossingSet c23 = crossings(patrol_region(parse_domain("###\n###\n")));
    CHECK(c23.histogram == std::map<int, int64_t>{{2, 3}, {3, 2}});
    CHECK(c23.histogram_by_axis[0] == std::map<int, int64_t>{{3, 2}});
    CHECK(c23.histogram_by_axis[1] == std::map<int, int64_t>{{2, 3}});

    CrossingSet ring = crossings(patrol_region(parse_domain("###\n#.#\n###\n")));
    CHECK(ring.histogram == std::map<int, int64_t>{{1, 4}, {3, 4}});
    int degenerate = 0;
    for (const auto& x : ring.crossings) {
        if (x.degenerate) ++degenerate;
        CHECK(x.degenerate == (x.length() == 1));
        for (size_t i = 1; i < x.cells.size(); ++i)
            CHECK(x.cells[i - 1] < x.cells[i]);
    }
    CHECK(degenerate == 4);

    CrossingSet c222 = crossings(patrol_region(box_domain(2, 2, 2)));
    CHECK(c222.histogram == std::map<int, int64_t>{{2, 12}});
}

TEST_CASE("area identity holds on fixed shapes with the expected terms") {
    GridDomain g = parse_domain("###\n###\n");
    PatrolRegion q = patrol_region(g);
    CrossingSet c = crossings(q);
    AreaLemmaReport rep = check_area_lemma(domain_summary(g), c, q);
    CHECK(rep.pass);
    CHECK(rep.lhs_K == 2);
    CHECK(rep.crossing_term == 7); // 3 runs of 2 plus 2 runs of 3
    CHECK(rep.g == 0);
    CHECK(rep.rhs == 1 - 6 + 7 - 0);

    GridDomain ring = parse_domain("###\n#.#\n###\n");
    PatrolRegion rq = patrol_region(ring);
    AreaLemmaReport rrep = check_area_lemma(domain_summary(ring), crossings(rq), rq);
    CHECK(rrep.pass);
    CHECK(rrep.lhs_K == 0);
    CHECK(rrep.g == 1);
}

TEST_CASE("area identity holds across random domains") {
    int checked = 0;
    for (int g = 0; g <= 3; ++g) {
        for (int A = 5 * g + 3; A <= 40; A += 3) {
            for (uint64_t seed : {1ull, 7ull, 99ull, 1234567ull}) {
                GridDomain dom = random_domain(A, g, seed);
                REQUIRE(dom.cell_count() == A);
                DomainSummary s = domain_summary(dom);
                CHECK(s.holes_g == g);
                PatrolRegion q = patrol_region(dom);
                AreaLemmaReport rep = check_area_lemma(s, crossings(q), q);
                CHECK(rep.pass);
                ++checked;
            }
        }
    }
    CHECK(checked >= 160);
}

TEST_CASE("random domains are deterministic in their parameters") {
    GridDomain a = random_domain(12, 1, 42);
    GridDomain b = random_domain(12, 1, 42);
    CHECK(a.cells == b.cells);

    std::set<std::string> shapes;
    for (uint64_t seed = 0; seed < 6; ++seed)
        shapes.insert(serialize_domain(random_domain(12, 1, seed)));
    CHECK(shapes.size() > 1);

    CHECK_THROWS_AS(random_domain(3, 1, 0), InputError);
    try {
        random_domain(7, 1, 0);
        FAIL("7 cells cannot enclose a hole");
    } catch (const InputError& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
}

TEST_CASE("box domains have the requested extents") {
    GridDomain b = box_domain(3, 2);
    CHECK(b.dim == 2);
    CHECK(b.cell_count() == 6);
    CHECK(domain_summary(b).bbox_max == Cell{2, 1, 0});
    CHECK_THROWS_AS(box_domain(0, 2), InputError);
}
