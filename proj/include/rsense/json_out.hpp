#pragma once

// JSON views of the report types. nlohmann::json keeps object keys sorted,
// and none of these carry timestamps, so serialized reports are
// byte-for-byte reproducible for equal inputs.

#include <json.hpp>

#include "rsense/recovery.hpp"
#include "rsense/rip.hpp"
#include "rsense/sensing.hpp"
#include "rsense/verify.hpp"
#include "rsense/version.hpp"

namespace rsense {

using nlohmann::json;

inline void to_json(json& j, const CoherencePoint& c) {
    j = json{{"mu", c.mu}, {"witness_i", c.i}, {"witness_j", c.j}};
}

inline void to_json(json& j, const ParamValidation& v) {
    j = json{{"ok", v.ok},
             {"gamma", v.gamma},
             {"tau_interval", {v.tau_lo, v.tau_hi}},
             {"violations", v.violations}};
}

inline void to_json(json& j, const FlatRipReport& r) {
    j = json{{"K", r.K},
             {"theta", r.theta},
             {"witness_I", r.witness_I},
             {"witness_J", r.witness_J},
             {"mode", r.mode},
             {"pairs_evaluated", r.pairs_evaluated}};
    if (r.mode == "sampled") {
        j["trials"] = r.trials;
        j["seed"] = r.seed;
    }
}

inline void to_json(json& j, const RipDeltaReport& r) {
    j = json{{"K", r.K},
             {"delta", r.delta},
             {"witness_support", r.witness_support},
             {"supports_evaluated", r.supports_evaluated}};
}

inline void to_json(json& j, const DoubleSumReport& r) {
    j = json{{"p", r.p},
             {"k", r.k},
             {"h", r.h},
             {"s_size", r.s_size},
             {"t_size", r.t_size},
             {"pairs_checked", r.pairs_checked},
             {"measured", r.measured},
             {"bound", r.bound},
             {"bound_kind", r.bound_kind},
             {"satisfied", r.satisfied},
             {"violations", r.violations},
             {"witness_S", r.witness_S},
             {"witness_T", r.witness_T},
             {"asymptotic_caveat", r.asymptotic_caveat}};
    if (!r.case_label.empty()) {
        j["case"] = r.case_label;
        j["swapped"] = r.swapped;
        j["premise_holds"] = r.premise_holds;
        j["premise_violations"] = r.premise_violations;
    }
    if (!r.note.empty()) j["note"] = r.note;
}

inline void to_json(json& j, const PropertyPResult& r) {
    j = json{{"classes", r.classes},
             {"all_satisfied", r.all_satisfied},
             {"pairs_checked", r.pairs_checked}};
}

inline void to_json(json& j, const DoubleSumBoundResult& r) {
    j = json{{"classes", r.classes},
             {"all_satisfied", r.all_satisfied},
             {"premise_failed_somewhere", r.premise_failed_somewhere},
             {"pairs_checked", r.pairs_checked}};
}

inline void to_json(json& j, const FlatChainReport& r) {
    j = json{{"direct", r.direct},
             {"decomposed", r.decomposed},
             {"majorant", r.majorant},
             {"normalized", r.normalized},
             {"scale", r.scale},
             {"char_sum_mags", r.char_sum_mags},
             {"decomposition_residual", r.decomposition_residual},
             {"majorant_slack", r.majorant_slack},
             {"magnitude_residual", r.magnitude_residual},
             {"end_to_end_slack", r.end_to_end_slack}};
}

inline void to_json(json& j, const TauBoundCheck& r) {
    j = json{{"applicable", r.applicable},
             {"lhs", r.lhs},
             {"rhs", r.rhs},
             {"holds", r.holds}};
}

inline void to_json(json& j, const CheckAggregate& c) {
    j = json{{"name", c.name},
             {"instances", c.instances},
             {"worst", c.worst},
             {"tolerance", c.tolerance},
             {"pass", c.pass},
             {"witness", c.witness}};
}

inline void to_json(json& j, const VerifySummary& s) {
    j = json{{"p_max", s.p_max},
             {"seed", s.seed},
             {"chain_pairs", s.chain_pairs},
             {"primes_checked", s.primes.size()},
             {"pass", s.pass},
             {"checks", s.checks}};
}

inline void to_json(json& j, const ExperimentRow& r) {
    j = json{{"p", r.p},
             {"k", r.k},
             {"variant", r.variant},
             {"algorithm", r.algorithm},
             {"K", r.K},
             {"trials", r.trials},
             {"success_rate", r.success_rate},
             {"median_rel_err", r.median_rel_err},
             {"seed", r.seed}};
}

// Uniform envelope for everything the CLI emits as JSON.
inline json report_envelope(const std::string& command, json params,
                            json report) {
    return json{{"tool", kToolName},
                {"version", kToolVersion},
                {"command", command},
                {"params", std::move(params)},
                {"report", std::move(report)}};
}

}  // namespace rsense
