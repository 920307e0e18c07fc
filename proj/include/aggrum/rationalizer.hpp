#pragma once

#include <string>
#include <vector>

#include "aggrum/axioms.hpp"
#include "aggrum/core.hpp"

namespace aggrum {

enum class Variant { Multi, OutsideOption };

const char* variant_name(Variant v) noexcept;

// Special alternatives attached to one non-atomic aggregate, as positions within X(a).
struct SpecialAlternatives {
    int aggregate = -1;
    std::vector<int> above;  // x_a(y), indexed by atomic aggregate
    int top = -1;            // x-bar_a; -1 in the outside-option layout
    int bottom = -1;         // x-underbar_a
};

struct Rationalization {
    PreferenceDistribution mu_x;
    AggregationCorrespondence X;
    CompositionDistribution lam;
    Variant variant = Variant::Multi;
    std::vector<SpecialAlternatives> specials;
    double residual = 0.0;  // max per-cell gap of the verifying forward evaluation
};

class AxiomViolatedError : public Error {
public:
    AxiomViolatedError(const std::string& msg, AxiomReport report)
        : Error(Errc::AxiomViolated, msg), report_(std::move(report)) {}
    const AxiomReport& report() const noexcept { return report_; }

private:
    AxiomReport report_;
};

struct Extension {
    AggregationCorrespondence X;
    PreferenceDistribution mu_x;
    std::vector<SpecialAlternatives> specials;
};

// Places each x_a(y) directly above y (aggregates in index order), then every x-bar, then every x-underbar.
Extension extend_preferences(const PreferenceDistribution& mu_tilde, const AggregateSpace& space,
                             Variant variant = Variant::Multi);

// Intermediate per-aggregate constructions, for inspection in tests.
struct LambdaTrace {
    std::vector<int> y_order;                        // atomic aggregates sorted by decreasing ratio
    std::vector<double> ratios;                      // aligned with y_order
    std::vector<int> aggregates;                     // a in E with positive mass
    std::vector<std::vector<MenuComposition>> steps;  // steps[k][n] = lambda^a_n for aggregates[k]
};

MenuComposition build_lambda_for_menu(const StochasticChoice& rho, Menu D, Menu E, const Extension& ext,
                                      LambdaTrace* trace = nullptr);

Rationalization rationalize(const StochasticChoice& rho, const AggregateSpace& space,
                            Variant variant = Variant::Multi);

}  // namespace aggrum
