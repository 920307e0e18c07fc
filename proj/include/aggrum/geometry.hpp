#pragma once

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aggrum/core.hpp"

namespace aggrum {

// Every linear order over the aggregates together with its chosen cell in each menu of a domain.
class OrderTable {
public:
    OrderTable(const AggregateSpace& space, const ChoiceDomain& dom);

    const CellIndex& cells() const { return cells_; }
    const std::vector<LinearOrder>& orders() const { return orders_; }
    std::size_t menu_count() const { return cells_.menu_count(); }
    // Flat cell index of the order's choice in menu k.
    std::uint16_t follow(std::size_t order, std::size_t k) const { return follow_[order * menu_count() + k]; }
    double dot(std::size_t order, std::span<const double> g) const;
    std::vector<double> vertex(std::size_t order) const;

private:
    CellIndex cells_;
    std::vector<LinearOrder> orders_;
    std::vector<std::uint16_t> follow_;
};

struct DistanceResult {
    double squared_distance = 0.0;
    PreferenceDistribution mixture;
    StochasticChoice projection;
    double duality_gap = 0.0;
    int iterations = 0;
    bool hit_iteration_cap = false;
    std::vector<double> objective_history;  // squared distance at the start of each major cycle
};

inline constexpr double kDistanceGapTol = 1e-10;
inline constexpr int kDistanceMaxIterations = 10000;

// Squared Euclidean distance from rho to the ARU polytope on rho's domain (min-norm point over the vertices).
DistanceResult aru_distance(const StochasticChoice& rho, const AggregateSpace& space);

struct RuVertex {
    LinearOrder order;
    MenuCollectionFamily family;
    double value = 0.0;  // <gradient, vertex>
};

// Minimizes <gradient, rho^order_family> over all RU vertices; gradient is indexed like table.cells().
RuVertex ru_vertex_lmo(std::span<const double> gradient, const OrderTable& table, const AggregateSpace& space);

struct SparseApproximation {
    std::vector<RuVertex> vertices;  // uniform weights 1/k, repeats allowed
    double achieved = 0.0;           // ||rho - mean||^2 / |domain|
    double bound = 0.0;              // 1/k
    std::vector<double> fw_weights;  // Frank-Wolfe 2/(t+2) iterate over the same number of steps
    std::vector<RuVertex> fw_vertices;
    double fw_achieved = 0.0;
};

SparseApproximation approx_caratheodory(const StochasticChoice& rho, int k, const AggregateSpace& space);

struct VertexCountBound {
    boost::multiprecision::cpp_int count;        // n! 2^(2^n - C(n,2) - 1)
    boost::multiprecision::cpp_int ratio_bound;  // floor(2^(2^n - C(n,2) - 1) / (n+1))
};

VertexCountBound vertex_count_lower_bound(int n);

// Uniform on atomic menus; on {y_1..y_n, a0} the n-th item gets nothing and its share moves to a0;
// other menus with a0 copy the atomic shares and give a0 nothing.
StochasticChoice build_nesting_counterexample(const AggregateSpace& space);

}  // namespace aggrum
