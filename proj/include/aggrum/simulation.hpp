#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aggrum/core.hpp"

namespace aggrum {

using UtilityMap = std::map<std::string, double, std::less<>>;

// Softmax over the menu, in menu order.
std::vector<double> logit_choice(const UtilityMap& u, std::span<const std::string> menu);

// Forward evaluation under the logit RUM over the underlying alternatives, using the closed form
// P(best of the union lies in S_a) = sum_{S_a} e^u / sum_{union} e^u.
StochasticChoice reduce_dataset(const UtilityMap& u, const AggregationCorrespondence& X,
                                const CompositionDistribution& lam, const ChoiceDomain& dom);

struct LogitObjective {
    double value = 0.0;
    std::vector<double> gradient;  // over the free (non-pinned) aggregates in space order
    std::vector<double> hessian;   // row-major
};

// Equal-weight per-menu log-likelihood of an aggregate-level logit.
LogitObjective aggregated_logit_objective(const StochasticChoice& rho, const AggregateSpace& space,
                                          const UtilityMap& u, const std::string& pinned = "a0");

struct LogitFit {
    UtilityMap u;
    int iterations = 0;
    double gradient_norm = 0.0;  // max-norm at return
    double log_likelihood = 0.0;
    std::vector<double> max_hessian_eigenvalue;  // one per iterate
};

inline constexpr double kLogitGradientTol = 1e-10;
inline constexpr int kLogitMaxIterations = 200;
inline constexpr int kLogitMaxHalvings = 40;

// Damped Newton from zero; `pinned` stays at utility 0.
LogitFit fit_aggregated_logit(const StochasticChoice& rho, const AggregateSpace& space,
                              const std::string& pinned = "a0");

// (u_hat(x) - u_hat(y)) - (u(x) - u(y))
double bias(const UtilityMap& u_hat, const UtilityMap& u_true, const std::string& x = "x",
            const std::string& y = "y");
bool ordering_reversed(const UtilityMap& u_hat, const UtilityMap& u_true, const std::string& x = "x",
                       const std::string& y = "y");

// Composition of the outside option over ({z}, {w}, {z,w}).
using Lambda3 = std::array<double, 3>;

// The three-market world: atomic x, y and an outside option a0 standing for z or w.
struct LogitWorld {
    UtilityMap u{{"x", 2.0}, {"y", 1.0}, {"z", 3.0}, {"w", 0.0}};
    Lambda3 lam_x{0.8, 0.1, 0.1};
    Lambda3 lam_y{0.8, 0.1, 0.1};
    Lambda3 lam_xy{0.8, 0.1, 0.1};
};

struct WorldResult {
    StochasticChoice rho;  // full domain of {x, y, a0}
    UtilityMap u_hat;
    double bias = 0.0;
    std::optional<double> squared_distance;
};

const AggregateSpace& logit_world_space();
const AggregationCorrespondence& logit_world_correspondence();
StochasticChoice logit_world_choice(const LogitWorld& world);
// Fits on the three markets with a0 pinned at zero; the distance uses all seven menus.
WorldResult evaluate_world(const LogitWorld& world, bool with_distance);

enum class SweepKind { Lambda, Utility };
enum class SweepMeasure { Bias, Distance, Both };
enum class WorldMenu { X, Y, XY };

struct SweepConfig {
    SweepKind kind = SweepKind::Lambda;
    WorldMenu varied = WorldMenu::X;  // which composition moves in a lambda sweep
    LogitWorld base;
    double lambda_step = 0.1;
    double u_min = -5.0, u_max = 5.0, u_step = 0.5;
    SweepMeasure measure = SweepMeasure::Both;
};

struct SweepRow {
    double h = 0.0;  // horizontal axis: lambda({z}) or u(z)
    double v = 0.0;  // vertical axis: lambda({w}) or u(w)
    std::optional<double> bias;
    std::optional<double> squared_distance;
    bool independent = false;          // all three compositions coincide
    double l1_from_independent = 0.0;  // lambda sweeps: L1 gap of the varied composition to the fixed ones
};

SweepConfig lambda_sweep_config();   // bias and distance across lambda_{x,a0}
SweepConfig utility_sweep_config();  // bias and distance across u(z), u(w)

// Rows ordered by the vertical axis, then the horizontal axis, both ascending.
std::vector<SweepRow> sweep(const SweepConfig& config, int jobs = 1);

struct MinMaxRow {
    double w = 0.0;  // lambda_{x,y,a0}({w})
    double z = 0.0;  // lambda_{x,y,a0}({z})
    double max_bias = 0.0;
    double min_bias = 0.0;
    double min_abs_bias = 0.0;
    double independent_bias = 0.0;
};

// Outer grid over lambda_{x,y,a0}; inner grid over lambda_{x,a0} x lambda_{y,a0} at the same step.
std::vector<MinMaxRow> minmax_bias(const UtilityMap& u, double step = 0.1, int jobs = 1);

// Grid points (i, j) with i + j <= steps, ordered by j then i.
std::vector<std::pair<int, int>> simplex_grid(int steps);

}  // namespace aggrum
