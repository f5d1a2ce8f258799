#pragma once

#include <string>

#include <json.hpp>

#include "covgrid/assembly.hpp"
#include "covgrid/grid_domain.hpp"
#include "covgrid/interval.hpp"
#include "covgrid/morse.hpp"
#include "covgrid/patrol.hpp"
#include "covgrid/permutahedron.hpp"

namespace covgrid::report {

using Json = nlohmann::ordered_json;

// Reports are byte-deterministic: insertion-ordered keys, no timestamps, no
// run-environment echoes (thread counts and the like stay out).

Json domain_json(const GridDomain& g, const DomainSummary& s);
Json patrol_json(const PatrolRegion& q, const CrossingSet& c);
Json lemma_json(const AreaLemmaReport& r);
Json counts_json(const CountReport& r);
Json euler_prediction_json(const EulerPrediction& p);
Json residuals_json(const CompareReport& r);
Json multiplicity_json(const MultiplicityCheck& m);
Json matching_json(const MatchingReport& v, const MorseSummary& s,
                   const CollapseSchedule& c);
Json interval_json(const IntervalModel& m);
Json permutahedron_json(const FaceLattice& fl);

// Wraps a report body with the schema header.
Json document(const std::string& command, Json body);

// JSON (indented) or flat "path = value" text.
std::string render(const Json& doc, bool as_text);

} // namespace covgrid::report
