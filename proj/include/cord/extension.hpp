#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cord/model.hpp"
#include "cord/ordering.hpp"

namespace cord {

struct Condition {
    std::string name;
    bool holds = false;
    nlohmann::json certificate;  // matching, witness, or violating adjacencies
};

/// Outcome of one robustness check. The checks are one-directional: failed
/// conditions mean "no guarantee", never "prediction violated".
struct RobustnessVerdict {
    std::string check;  // presence_preservation | absence_preservation | self_regulating
    std::vector<Condition> conditions;
    std::vector<std::string> guarantees;  // nonempty only when all conditions hold
    bool applicable = false;

    nlohmann::json to_json() const;
};

/// If the base bipartite graph and the extension bipartite graph both have
/// perfect matchings, ancestral relations and d-connections of the base are
/// preserved in the extended model (and the extended graph has a perfect
/// matching).
RobustnessVerdict check_presence_preservation(const ExtensionSpec& ext);

/// Adds the condition that no added variable is adjacent to a base equation
/// in the extended graph (promoted identifiers appearing in base equations
/// count as adjacent); then absent ancestral relations and absent
/// d-connections are preserved too.
RobustnessVerdict check_absence_preservation(const ExtensionSpec& ext);

/// Corollary for dynamical models: when every variable of the base and of
/// the extension is self-regulating, the natural labelling yields perfect
/// matchings and the presence guarantees of the first check follow.
RobustnessVerdict check_self_regulating(const DynamicalModel& base,
                                        const DynamicalModel& ext_dyn);

struct FeedbackReport {
    /// Each cycle lists its vertices (variables and equations) in order,
    /// starting from the smallest vertex.
    std::vector<std::vector<std::string>> cycles;
    bool truncated = false;

    nlohmann::json to_json() const;
};

/// Detects feedback loops of the extended dynamical model that cross the
/// boundary between base_vars and the added variables: orients the natural
/// bipartite structure by the natural matching and enumerates simple
/// directed cycles containing variables from both sides.
FeedbackReport detect_new_feedback(const DynamicalModel& ext_dyn,
                                   const std::set<std::string>& base_vars,
                                   std::size_t max_cycles = 1000);

struct Observation {
    std::string x, y;
    std::vector<std::string> given;
    bool independent = false;
};

struct DiagnosisFinding {
    Observation observation;
    std::vector<std::string> findings;
    std::vector<std::string> assumptions;
};

struct DiagnosisReport {
    std::vector<DiagnosisFinding> findings;

    nlohmann::json to_json() const;
};

/// For every observed independence that the base Markov ordering graph
/// cannot explain (it predicts a d-connection), reports what any unobserved
/// extension must contain: a non-self-regulating variable and a new feedback
/// loop, assuming faithfulness and a correct submodel.
DiagnosisReport diagnose(const MarkovDag& base_mo, const std::vector<Observation>& observations);

}  // namespace cord
