#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <vector>

#include "covgrid/assembly.hpp"
#include "covgrid/errors.hpp"
#include "covgrid/grid_domain.hpp"
#include "covgrid/labeling.hpp"

using namespace covgrid;

namespace {

BuildResult build(const char* text, BuildOptions opt = {}) {
    return build_covering_complex(parse_domain(text), opt);
}

BuildOptions census_opt() {
    BuildOptions o;
    o.mode = BuildOptions::Mode::Census;
    return o;
}

} // namespace

TEST_CASE("labelings enumerate lexicographically") {
    LabelingStream st = enumerate_labelings(2);
    CHECK(LabelingStream::total(2) == 6);

    std::vector<std::pair<int, std::vector<uint8_t>>> got;
    Labeling L;
    while (st.next(L)) got.emplace_back(L.patroller, L.assignment);
    REQUIRE(got.size() == 6);
    CHECK(got[0] == std::pair<int, std::vector<uint8_t>>{1, {2, 3}});
    CHECK(got[1] == std::pair<int, std::vector<uint8_t>>{1, {3, 2}});
    CHECK(got[2] == std::pair<int, std::vector<uint8_t>>{2, {1, 3}});
    CHECK(got[3] == std::pair<int, std::vector<uint8_t>>{2, {3, 1}});
    CHECK(got[4] == std::pair<int, std::vector<uint8_t>>{3, {1, 2}});
    CHECK(got[5] == std::pair<int, std::vector<uint8_t>>{3, {2, 1}});

    try {
        enumerate_labelings(1);
        FAIL("one-cell domains have no movement");
    } catch (const InputError& e) {
        CHECK(e.kind() == ErrorKind::DomainTooSmall);
    }
}

TEST_CASE("rank ranges of the stream tile the full enumeration") {
    std::vector<std::vector<uint8_t>> whole;
    {
        LabelingStream st(3, 0, LabelingStream::total(3));
        Labeling L;
        while (st.next(L)) {
            std::vector<uint8_t> flat{static_cast<uint8_t>(L.patroller)};
            flat.insert(flat.end(), L.assignment.begin(), L.assignment.end());
            whole.push_back(flat);
        }
    }
    REQUIRE(whole.size() == 24);

    std::vector<std::vector<uint8_t>> pieced;
    for (auto [b, e] : {std::pair<uint64_t, uint64_t>{0, 7}, {7, 7}, {7, 20}, {20, 24}}) {
        LabelingStream st(3, b, e);
        Labeling L;
        while (st.next(L)) {
            std::vector<uint8_t> flat{static_cast<uint8_t>(L.patroller)};
            flat.insert(flat.end(), L.assignment.begin(), L.assignment.end());
            pieced.push_back(flat);
        }
    }
    CHECK(pieced == whole);
}

TEST_CASE("unranking helpers are exact") {
    CHECK(factorial(0) == 1);
    CHECK(factorial(5) == 120);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(6, 0) == 1);
    CHECK(falling(5, 2) == 20);
    CHECK(falling(5, 0) == 1);
    CHECK(perm_unrank(3, 0) == std::vector<uint8_t>{1, 2, 3});
    CHECK(perm_unrank(3, 5) == std::vector<uint8_t>{3, 2, 1});
    CHECK(comb_unrank(4, 2, 0) == std::vector<uint8_t>{1, 2});
    CHECK(comb_unrank(4, 2, 5) == std::vector<uint8_t>{3, 4});
}

TEST_CASE("overlap labels are symmetric in the two agents") {
    Labeling a{1, {2, 3}};
    Labeling b{2, {1, 3}};
    CHECK(rule_a_overlap(a, 0) == rule_a_overlap(b, 0));
    CHECK(rule_a_overlap(a, 0) !=
          rule_a_overlap(a, 1)); // different cell, different label

    // agents 1,2 on cell 0 and agent 3 on cell 1, nibble per label
    Key128 k = rule_a_overlap(a, 0);
    CHECK(k.cell_class() == CellClass::OverlapVertex);
    CHECK(k.lo == slot_nibble(1, 0) + slot_nibble(2, 0) + slot_nibble(3, 1));
}

TEST_CASE("midpoints land on the overlap of the transposed pair") {
    GridDomain g = parse_domain("##\n");
    PatrolRegion q = patrol_region(g);
    CrossingSet cs = crossings(q);
    const CrossingSet::Crossing* run = nullptr;
    for (const auto& x : cs.crossings)
        if (!x.degenerate) run = &x;
    REQUIRE(run != nullptr);
    REQUIRE(run->length() == 2);

    Key128 mid = rule_b_midpoint(*run, {1, 2, 3}, 1, 0);
    CHECK(mid == rule_a_overlap(Labeling{1, {2, 3}}, run->cells[0]));
    CHECK(mid == rule_a_overlap(Labeling{2, {1, 3}}, run->cells[0]));

    Key128 other = rule_b_midpoint(*run, {3, 1, 2}, 2, 0);
    CHECK(other == rule_a_overlap(Labeling{1, {3, 2}}, run->cells[1]));
}

TEST_CASE("single shifts land on patrol edges with the right patroller") {
    GridDomain g = parse_domain("##\n");
    PatrolRegion q = patrol_region(g);
    CrossingSet cs = crossings(q);
    const CrossingSet::Crossing* run = nullptr;
    for (const auto& x : cs.crossings)
        if (!x.degenerate) run = &x;
    REQUIRE(run != nullptr);

    Key128 shift = rule_c_single_shift(q, *run, {1, 2, 3}, 1, 0);
    int e01 = q.edge_index(run->cells[0], run->cells[1]);
    REQUIRE(e01 >= 0);
    uint64_t lo = slot_nibble(1, run->cells[0]) | slot_nibble(2, 0xF) |
                  slot_nibble(3, run->cells[1]);
    CHECK(shift == keybuild::q_edge(lo, e01));

    // the same key arises from the patrol instance of the matching labeling
    Labeling L{2, {1, 3}};
    CHECK(shift == keybuild::q_edge(assignment_lo(L) | slot_nibble(L.patroller, 0xF),
                                    e01));
}

TEST_CASE("the two-cell strip is a torus-free circle pair") {
    BuildResult r = build("##\n");
    CHECK(r.built.v_overlap == 6);
    CHECK(r.built.v_perm == 6);
    CHECK(r.built.e_q == 6);
    CHECK(r.built.e_half == 12);
    CHECK(r.built.e_swarm == 0);
    CHECK(r.built.sigma_s == 0);
    CHECK(r.built.sigma_t == 6);
    CHECK(r.built.euler() == 0);
    CHECK(r.multiplicity.ok);
    REQUIRE(r.complex.has_value());
    CHECK(r.complex->validate_boundaries().empty());
    std::vector<int64_t> b = r.complex->betti();
    REQUIRE(b.size() >= 2);
    CHECK(b[0] == 1);
    CHECK(b[1] == 1);
}

TEST_CASE("the square block matches its closed-form counts") {
    GridDomain g = parse_domain("##\n##\n");
    BuildResult r = build_covering_complex(g);
    CHECK(r.built.v() == 720);
    CHECK(r.built.e() == 1440);
    CHECK(r.built.f() == 600);
    CHECK(r.built.sigma_s == 120);
    CHECK(r.built.sigma_t == 480);
    CHECK(r.built.euler() == -120);

    PatrolRegion q = patrol_region(g);
    CountReport want = predicted_cell_counts(domain_summary(g), crossings(q), q);
    CompareReport cmp = compare_counts(r.built, want);
    CHECK(cmp.pass);
    CHECK(cmp.d_euler == 0);

    EulerPrediction ep = predicted_euler(domain_summary(g));
    CHECK(ep.chi == -120);
    CHECK_FALSE(ep.conjecture);
    CHECK(ep.chi_decimal == "-120");
}

TEST_CASE("census and full builds count the same cells") {
    for (const char* text : {"##\n", "###\n", "#.\n##\n", "##\n##\n"}) {
        BuildResult full = build(text);
        BuildResult census = build(text, census_opt());
        CHECK(census.mode == BuildOptions::Mode::Census);
        CHECK_FALSE(census.complex.has_value());
        CHECK(census.multiplicity.ok);
        CHECK(full.built.v_overlap == census.built.v_overlap);
        CHECK(full.built.v_perm == census.built.v_perm);
        CHECK(full.built.e_q == census.built.e_q);
        CHECK(full.built.e_half == census.built.e_half);
        CHECK(full.built.e_swarm == census.built.e_swarm);
        CHECK(full.built.sigma_s == census.built.sigma_s);
        CHECK(full.built.sigma_t == census.built.sigma_t);
        CHECK(full.built.cubes == census.built.cubes);
    }
}

TEST_CASE("emission multiplicities follow the gluing recipe") {
    BuildResult r = build("##\n##\n");
    CHECK(r.multiplicity.ok);
    CHECK(r.multiplicity.detail.empty());
    CHECK(r.multiplicity.ov_patrol_emissions ==
          2 * static_cast<uint64_t>(r.built.v_overlap));
    CHECK(r.multiplicity.qedge_patrol_emissions ==
          static_cast<uint64_t>(r.built.e_q));
    CHECK(r.multiplicity.qedge_shift_emissions ==
          static_cast<uint64_t>(r.built.e_q));
    // every overlap vertex sits on cells crossed by two runs here
    CHECK(r.multiplicity.ov_midpoint_emissions ==
          2 * static_cast<uint64_t>(r.built.v_overlap));
}

TEST_CASE("degenerate runs add only chi-neutral matched pairs") {
    BuildOptions with;
    with.include_degenerate = true;

    BuildResult base = build("##\n");
    BuildResult abl = build("##\n", with);
    CHECK(abl.multiplicity.ok);
    CHECK(abl.built.v() == base.built.v() + 12);
    CHECK(abl.built.e() == base.built.e() + 12);
    CHECK(abl.built.f() == base.built.f());
    CHECK(abl.built.euler() == base.built.euler());

    // no degenerate runs, no difference
    BuildResult sq = build("##\n##\n");
    BuildResult sq_abl = build("##\n##\n", with);
    CHECK(sq.built.v() == sq_abl.built.v());
    CHECK(sq.built.e() == sq_abl.built.e());
}

TEST_CASE("the build is byte-identical across thread counts") {
    GridDomain g = parse_domain("###\n###\n");
    BuildOptions one, four;
    one.threads = 1;
    four.threads = 4;
    BuildResult a = build_covering_complex(g, one);
    BuildResult b = build_covering_complex(g, four);
    CHECK(a.built.total() == b.built.total());
    std::ostringstream sa, sb;
    a.complex->serialize_binary(sa);
    b.complex->serialize_binary(sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("the cell cap trips before a full build, census sails past it") {
    GridDomain g = parse_domain("###\n###\n");
    BuildOptions tiny;
    tiny.max_cells = 1000;
    try {
        build_covering_complex(g, tiny);
        FAIL("cap should trip");
    } catch (const ResourceLimitError& e) {
        CHECK(std::string(e.what()).find("cells") != std::string::npos);
        CHECK(e.suggestion().find("census") != std::string::npos);
    }

    tiny.mode = BuildOptions::Mode::Census;
    BuildResult census = build_covering_complex(g, tiny);
    CHECK(census.built.euler() == -10080);
    CHECK(census.multiplicity.ok);
}

TEST_CASE("euler predictions stay exact far past 64 bits") {
    CHECK(predicted_euler(domain_summary(parse_domain("##\n"))).chi == 0);
    CHECK(predicted_euler(domain_summary(parse_domain("###\n###\n"))).chi == -10080);

    DomainSummary ring = domain_summary(parse_domain("###\n#.#\n###\n"));
    CHECK(predicted_euler(ring).chi == -1451520);

    EulerPrediction flat = predicted_euler(domain_summary(parse_domain("#\n\n#\n")));
    CHECK(flat.conjecture);
    CHECK(flat.chi == 0);

    EulerPrediction big = predicted_euler(domain_summary(box_domain(3, 3, 3)));
    CHECK(big.conjecture);
    CHECK_FALSE(big.chi.has_value());
    CHECK(big.chi_decimal == "-3811104307646423256268800000000");

    CHECK_THROWS_AS(predicted_euler(domain_summary(random_domain(31, 0, 1))),
                    InputError);
}

TEST_CASE("prediction guards reject what they cannot evaluate exactly") {
    GridDomain g3 = box_domain(2, 2, 2);
    PatrolRegion q3 = patrol_region(g3);
    CHECK_THROWS_AS(predicted_cell_counts(domain_summary(g3), crossings(q3), q3),
                    InputError);

    GridDomain wide = random_domain(19, 0, 5);
    PatrolRegion qw = patrol_region(wide);
    CHECK_THROWS_AS(predicted_cell_counts(domain_summary(wide), crossings(qw), qw),
                    InputError);

    try {
        build_covering_complex(parse_domain("#\n"));
        FAIL("single cells have no labelings");
    } catch (const InputError& e) {
        CHECK(e.kind() == ErrorKind::DomainTooSmall);
    }
}

TEST_CASE("count comparisons expose per-class residuals") {
    GridDomain g = parse_domain("##\n");
    PatrolRegion q = patrol_region(g);
    CountReport want = predicted_cell_counts(domain_summary(g), crossings(q), q);
    BuildResult r = build_covering_complex(g);
    CHECK(compare_counts(r.built, want).pass);

    CountReport skewed = want;
    skewed.e_half += 2;
    CompareReport cmp = compare_counts(r.built, skewed);
    CHECK_FALSE(cmp.pass);
    CHECK(cmp.d_e_half == -2);
    CHECK(cmp.d_euler == 2);
    CHECK(cmp.d_v_overlap == 0);
}
