#include "covgrid/report.hpp"

namespace covgrid::report {

Json domain_json(const GridDomain& g, const DomainSummary& s) {
    Json j;
    j["name"] = g.name;
    j["dim"] = s.dim;
    j["A"] = s.A;
    j["euler"] = s.euler;
    if (s.holes_g)
        j["holes"] = *s.holes_g;
    else
        j["holes"] = nullptr;
    j["bbox"] = {s.bbox_max[0] + 1, s.bbox_max[1] + 1, s.bbox_max[2] + 1};
    return j;
}

Json patrol_json(const PatrolRegion& q, const CrossingSet& c) {
    Json j;
    j["K"] = q.K;
    j["edges"] = q.edges.size();
    j["squares"] = q.squares.size();
    if (q.dim == 3) j["cubes"] = q.cubes.size();
    Json hist = Json::object();
    for (const auto& [len, n] : c.histogram) hist[std::to_string(len)] = n;
    j["crossings"] = {{"count", c.crossings.size()}, {"histogram", hist}};
    return j;
}

Json lemma_json(const AreaLemmaReport& r) {
    Json j;
    j["lhs"] = r.lhs_K;
    j["rhs"] = r.rhs;
    j["crossing_term"] = r.crossing_term;
    j["g"] = r.g;
    j["pass"] = r.pass;
    return j;
}

Json counts_json(const CountReport& r) {
    Json j;
    j["v_overlap"] = r.v_overlap;
    j["v_perm"] = r.v_perm;
    j["e_q"] = r.e_q;
    j["e_half"] = r.e_half;
    j["e_swarm"] = r.e_swarm;
    j["sigma_s"] = r.sigma_s;
    j["sigma_t"] = r.sigma_t;
    if (r.cubes) j["cubes"] = r.cubes;
    j["vertices"] = r.v();
    j["edges"] = r.e();
    j["faces"] = r.f();
    j["euler"] = r.euler();
    return j;
}

Json euler_prediction_json(const EulerPrediction& p) {
    Json j;
    if (p.chi)
        j["euler"] = *p.chi;
    else
        j["euler"] = p.chi_decimal; // exact value past the 64-bit range
    if (p.conjecture) j["status"] = "unverified conjecture";
    return j;
}

Json residuals_json(const CompareReport& r) {
    Json j;
    if (r.class_residuals) {
        j["v_overlap"] = r.d_v_overlap;
        j["v_perm"] = r.d_v_perm;
        j["e_q"] = r.d_e_q;
        j["e_half"] = r.d_e_half;
        j["e_swarm"] = r.d_e_swarm;
        j["sigma_s"] = r.d_sigma_s;
        j["sigma_t"] = r.d_sigma_t;
    }
    j["euler"] = r.d_euler;
    j["pass"] = r.pass;
    return j;
}

Json multiplicity_json(const MultiplicityCheck& m) {
    Json j;
    j["ok"] = m.ok;
    j["overlap_patrol_emissions"] = m.ov_patrol_emissions;
    j["overlap_midpoint_emissions"] = m.ov_midpoint_emissions;
    j["qedge_patrol_emissions"] = m.qedge_patrol_emissions;
    j["qedge_shift_emissions"] = m.qedge_shift_emissions;
    if (!m.ok) j["detail"] = m.detail;
    return j;
}

Json matching_json(const MatchingReport& v, const MorseSummary& s,
                   const CollapseSchedule& c) {
    Json j;
    j["matched"] = v.matched_faces;
    j["unmatched"] = v.faces - v.matched_faces;
    j["valid"] = v.valid;
    j["acyclic"] = v.acyclic;
    j["critical"] = {{"0", s.critical_vertices}, {"1", s.critical_edges}};
    if (s.critical_faces) j["critical"]["2"] = s.critical_faces;
    j["morse_euler"] = s.euler;
    j["morse_betti"] = s.betti;
    j["collapse"] = {{"success", c.success}, {"steps", c.steps}};
    if (!v.detail.empty()) j["detail"] = v.detail;
    if (!c.detail.empty()) j["collapse"]["detail"] = c.detail;
    return j;
}

Json interval_json(const IntervalModel& m) {
    Json j;
    j["n"] = m.n;
    j["r"] = m.r.str();
    if (m.empty) {
        j["k"] = nullptr;
        j["model"] = "Empty";
        return j;
    }
    j["k"] = m.k;
    j["model"] = "Skel_" + std::to_string(m.k) + "(Pi_" + std::to_string(m.n - 1) + ")";
    Json counts = Json::object();
    for (size_t d = 0; d < m.counts.size(); ++d) counts[std::to_string(d)] = m.counts[d];
    j["counts"] = counts;
    j["euler"] = m.euler;
    if (m.betti) j["betti"] = *m.betti;
    return j;
}

Json permutahedron_json(const FaceLattice& fl) {
    Json j;
    j["m"] = fl.m;
    j["k"] = fl.k;
    Json faces = Json::object();
    for (int d = 0; d <= fl.k; ++d) faces[std::to_string(d)] = fl.face_count(d);
    j["faces"] = faces;
    j["euler"] = fl.euler();
    return j;
}

Json document(const std::string& command, Json body) {
    Json doc;
    doc["schema_version"] = 1;
    doc["command"] = command;
    doc.update(body);
    return doc;
}

namespace {

void render_text(const Json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            render_text(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            render_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out += prefix;
        out += " = ";
        out += j.is_string() ? j.get<std::string>() : j.dump();
        out += "\n";
    }
}

} // namespace

std::string render(const Json& doc, bool as_text) {
    if (!as_text) return doc.dump(1) + "\n";
    std::string out;
    render_text(doc, "", out);
    return out;
}

} // namespace covgrid::report
