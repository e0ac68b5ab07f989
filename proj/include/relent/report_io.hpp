#pragma once

// JSON / CSV emission for solver results and verification reports. Output is
// byte-identical for identical run configurations; the timestamp field is the
// only nondeterministic piece and callers omit it for deterministic runs.

#include "relent/continuity.hpp"
#include "relent/state_io.hpp"

#include <json.hpp>

namespace relent {

inline const char* to_string(Confidence c) {
    return c == Confidence::certified ? "certified" : "heuristicLower";
}

inline nlohmann::json to_json(const CertifiedValue& v, bool include_minimizer = false) {
    nlohmann::json j{{"lower", v.lower},     {"upper", v.upper},
                     {"fwGap", v.fw_gap},    {"iterations", v.iterations},
                     {"x", v.x},             {"confidence", to_string(v.confidence)},
                     {"converged", v.converged}};
    if (include_minimizer) {
        j["minimizer"] = nlohmann::json::parse(state_to_json(v.minimizer));
    }
    return j;
}

inline nlohmann::json to_json(const InequalityResult& r) {
    return {{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack},
            {"holds", r.holds}};
}

inline nlohmann::json to_json(const ContinuityReport& r) {
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& c : r.chain) chain.push_back(to_json(c));
    return {{"seed", r.seed},
            {"dims", {r.dims.dim_a, r.dims.dim_b}},
            {"T", r.trace_dist},
            {"bound", r.bound},
            {"E1", to_json(r.e1)},
            {"E2", to_json(r.e2)},
            {"deltaUpper", r.delta_upper},
            {"holds", r.holds},
            {"margin", r.margin},
            {"chain", chain},
            {"confidence", to_string(r.confidence)},
            {"skipped", r.skipped}};
}

inline nlohmann::json to_json(const BatchResult& b) {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : b.reports) reports.push_back(to_json(r));
    return {{"seed", b.seed},
            {"pairs", b.reports.size()},
            {"boundFailures", b.bound_failures},
            {"chainFailures", b.chain_failures},
            {"maxRatio", b.max_ratio},
            {"reports", reports}};
}

// CSV summary, one line per pair.
inline std::string continuity_csv(const BatchResult& b) {
    std::string out = "seed,T,bound,deltaUpper,margin,holds,confidence\n";
    for (const auto& r : b.reports) {
        out += std::to_string(r.seed);
        out += ",";
        out += detail::format_double(r.trace_dist);
        out += ",";
        out += detail::format_double(r.bound);
        out += ",";
        out += detail::format_double(r.delta_upper);
        out += ",";
        out += detail::format_double(r.margin);
        out += ",";
        out += r.holds ? "1" : "0";
        out += ",";
        out += to_string(r.confidence);
        out += "\n";
    }
    return out;
}

inline nlohmann::json to_json(const ConvergenceTrace& t) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : t.entries) {
        entries.push_back({{"n", e.n},
                           {"distToLimit", e.dist_to_limit},
                           {"minimizerDist", e.minimizer_dist},
                           {"eUpper", e.e_upper}});
    }
    return {{"family", t.family}, {"entries", entries}, {"criterionMet", t.criterion_met}};
}

inline nlohmann::json to_json(const std::vector<DensityRecord>& records) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : records) {
        out.push_back({{"n", r.n}, {"perPair", to_json(r.per_pair)}, {"reference", r.reference}});
    }
    return out;
}

}  // namespace relent
