#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aggrum/core.hpp"

namespace aggrum {

enum class ViolationKind { LimitedMonotonicity, BlockMarschak, PartialRuInfeasible, AruInfeasible };

const char* violation_name(ViolationKind k) noexcept;

// lhs >= rhs is the required comparison; slack = lhs - rhs (negative when violated).
struct Violation {
    ViolationKind kind{};
    Menu menu;        // D for monotonicity, the BM menu, or empty for LP records
    Menu superset;    // D u E for monotonicity
    int item = -1;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

struct AxiomReport {
    bool passed = true;
    std::vector<Violation> violations;
    std::optional<PreferenceDistribution> certificate;
    std::vector<double> farkas;  // dual witness over the LP rows when infeasible
    std::string method;

    void add(Violation v) {
        violations.push_back(v);
        passed = false;
    }
    void absorb(const AxiomReport& other);
};

enum class PartialRuMethod { Bm, Lp, Auto };

inline constexpr double kMonotonicityTol = 1e-10;
inline constexpr double kBlockMarschakTol = 1e-10;
inline constexpr double kLpTol = 1e-9;
inline constexpr int kMaxLpAtomic = 7;

AxiomReport check_limited_monotonicity(const StochasticChoice& rho, const AggregateSpace& space);

// q(D,x) = sum over atomic E containing D of (-1)^{|E \ D|} rho(E,x).
double bm_polynomial(const StochasticChoice& rho, const AggregateSpace& space, Menu D, int x);

bool has_full_atomic_domain(const StochasticChoice& rho, const AggregateSpace& space);

AxiomReport check_partial_ru(const StochasticChoice& rho, const AggregateSpace& space,
                             PartialRuMethod method = PartialRuMethod::Auto);

AxiomReport check_ru_rational(const StochasticChoice& rho, const AggregateSpace& space,
                              PartialRuMethod method = PartialRuMethod::Auto);

AxiomReport check_aru_rational(const StochasticChoice& rho, const AggregateSpace& space);

// LP feasibility of rho on `menus` as a mixture of rankings of `ground` aggregates.
AxiomReport rum_feasibility(const StochasticChoice& rho, const AggregateSpace& space,
                            const std::vector<Menu>& menus, const std::vector<int>& ground, ViolationKind kind);

}  // namespace aggrum
