#pragma once

#include <utility>
#include <vector>

namespace aggrum::lp {

// Equality system A x = b with x >= 0, stored column-wise.
class LinearSystem {
public:
    explicit LinearSystem(int rows) : b_(static_cast<std::size_t>(rows), 0.0) {}

    int rows() const { return static_cast<int>(b_.size()); }
    int cols() const { return static_cast<int>(start_.size()) - 1; }
    int add_column(const std::vector<std::pair<int, double>>& entries);
    void set_rhs(int row, double value) { b_[static_cast<std::size_t>(row)] = value; }
    const std::vector<double>& rhs() const { return b_; }

    // Column j as (row, value) ranges.
    std::size_t col_begin(int j) const { return start_[static_cast<std::size_t>(j)]; }
    std::size_t col_end(int j) const { return start_[static_cast<std::size_t>(j) + 1]; }
    int row_at(std::size_t k) const { return row_[k]; }
    double value_at(std::size_t k) const { return val_[k]; }

    std::vector<double> multiply(const std::vector<double>& x) const;

private:
    std::vector<double> b_;
    std::vector<std::size_t> start_{0};
    std::vector<int> row_;
    std::vector<double> val_;
};

struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> x;       // a basic feasible point when feasible
    std::vector<double> farkas;  // y with y.A_j <= tol for all j and y.b > 0 when infeasible
    double residual = 0.0;       // max |A x - b| of the returned point
    double phase_one = 0.0;      // optimal sum of artificial variables
    int iterations = 0;
};

// Phase-one revised simplex with Bland's rule; deterministic for a given column order.
FeasibilityResult solve_feasibility(const LinearSystem& sys, double tol = 1e-9);

}  // namespace aggrum::lp
