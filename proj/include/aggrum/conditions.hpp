#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aggrum/core.hpp"

namespace aggrum {

struct OverlapWitness {
    LinearOrder order;  // support order of mu_X
    int aggregate = -1;
    std::string sandwiched;  // foreign alternative ranked inside the aggregate's block
};

struct MarginalMismatch {
    Menu menu;   // empty when the joint-distribution LP as a whole is infeasible
    Menu other;  // menu (or full-menu reference) it was compared against
    CompositionTuple tuple;
    double gap = 0.0;
};

struct ConditionReport {
    bool holds = true;
    std::vector<OverlapWitness> overlaps;
    std::vector<MarginalMismatch> mismatches;
    std::optional<MenuComposition> joint;  // tuple over every non-atomic aggregate, when menu-independent
};

inline constexpr double kMarginalTol = 1e-10;
inline constexpr long kMaxJointAtoms = 1'000'000;

ConditionReport is_non_overlapping(const PreferenceDistribution& mu_x, const AggregationCorrespondence& X);

// Block order per support order; within a block the order of X(a) is kept.
PreferenceDistribution lift_aru_to_nonoverlapping(const PreferenceDistribution& mu_a, const AggregationCorrespondence& X);

ConditionReport is_menu_independent(const CompositionDistribution& lam, const AggregationCorrespondence& X,
                                    const ChoiceDomain& dom);

// The aggregate order induced by each (joint tuple, order) pair, weighted by their product.
PreferenceDistribution collapse_to_aru(const PreferenceDistribution& mu_x, const AggregationCorrespondence& X,
                                       const CompositionDistribution& lam);

}  // namespace aggrum
