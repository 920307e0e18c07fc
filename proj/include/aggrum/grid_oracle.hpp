#pragma once

#include <optional>

#include "aggrum/core.hpp"

namespace aggrum {

struct GridWitness {
    PreferenceDistribution mu_x;
    AggregationCorrespondence X;
    CompositionDistribution lam;
    double residual = 0.0;  // max per-cell gap of the forward evaluation
};

struct GridOracleStats {
    long nodes = 0;            // support-pattern search nodes
    long lp_solves = 0;
    long patterns = 0;         // complete support patterns that reached the grid phase
    long grid_points = 0;
    bool pruned_by_support = false;  // not_found decided before any grid point was evaluated
};

struct GridOracleResult {
    bool found = false;
    std::optional<GridWitness> witness;
    GridOracleStats stats;
};

inline constexpr double kGridLpTol = 1e-7;
inline constexpr long kGridBudget = 20'000'000;

// Evidence search for a rationalization with |X(a0)| = n when a0 is the only non-atomic aggregate.
// Each menu's composition is restricted to multiples of `resolution`; the preference side is an exact LP.
// Support patterns are pruned exactly: zero cells, cells where a0 takes nothing, and a0-only cells
// restrict the admissible orders before the grid is touched.
GridOracleResult grid_oracle_ru_n(const StochasticChoice& rho, const AggregateSpace& space, int n,
                                  double resolution = 0.02, long budget = kGridBudget);

}  // namespace aggrum
