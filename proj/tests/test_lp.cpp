#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aggrum/lp.hpp"

using aggrum::lp::LinearSystem;
using aggrum::lp::solve_feasibility;

namespace {

double farkas_gap(const LinearSystem& sys, const std::vector<double>& y, double& worst_col) {
    worst_col = -INFINITY;
    for (int j = 0; j < sys.cols(); ++j) {
        double s = 0;
        for (std::size_t k = sys.col_begin(j); k < sys.col_end(j); ++k)
            s += y[static_cast<std::size_t>(sys.row_at(k))] * sys.value_at(k);
        worst_col = std::max(worst_col, s);
    }
    double yb = 0;
    for (int i = 0; i < sys.rows(); ++i) yb += y[static_cast<std::size_t>(i)] * sys.rhs()[static_cast<std::size_t>(i)];
    return yb;
}

}  // namespace

TEST_CASE("simple feasible and infeasible systems") {
    LinearSystem sys(2);
    sys.add_column({{0, 1.0}, {1, 1.0}});
    sys.add_column({{0, 1.0}});
    sys.set_rhs(0, 1.0);
    sys.set_rhs(1, 0.25);
    auto r = solve_feasibility(sys);
    REQUIRE(r.feasible);
    CHECK(r.x[0] == doctest::Approx(0.25));
    CHECK(r.x[1] == doctest::Approx(0.75));

    sys.set_rhs(1, 1.5);  // would need x1 < 0
    auto bad = solve_feasibility(sys);
    CHECK_FALSE(bad.feasible);
    double worst;
    CHECK(farkas_gap(sys, bad.farkas, worst) > 1e-9);
    CHECK(worst <= 1e-9);
}

TEST_CASE("negative right-hand sides are handled") {
    LinearSystem sys(1);
    sys.add_column({{0, -2.0}});
    sys.set_rhs(0, -1.0);
    auto r = solve_feasibility(sys);
    REQUIRE(r.feasible);
    CHECK(r.x[0] == doctest::Approx(0.5));
}

TEST_CASE("random planted systems are solved; perturbed ones carry valid certificates") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> bit(0, 2);
    std::exponential_distribution<double> ex(1.0);
    for (int rep = 0; rep < 200; ++rep) {
        int m = 3 + rep % 9, n = 2 * m + rep % 7;
        LinearSystem sys(m);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            std::vector<std::pair<int, double>> col;
            for (int i = 0; i < m; ++i)
                if (bit(rng) == 0) col.emplace_back(i, 1.0);
            sys.add_column(col);
            x[static_cast<std::size_t>(j)] = (bit(rng) == 0) ? 0.0 : ex(rng);
        }
        auto b = sys.multiply(x);
        for (int i = 0; i < m; ++i) sys.set_rhs(i, b[static_cast<std::size_t>(i)]);
        auto r = solve_feasibility(sys);
        REQUIRE(r.feasible);
        CHECK(r.residual <= 1e-9);
        for (double v : r.x) CHECK(v >= 0.0);

        sys.set_rhs(rep % m, b[static_cast<std::size_t>(rep % m)] - 10.0 - ex(rng) * 5);
        auto r2 = solve_feasibility(sys);
        if (!r2.feasible) {
            double worst;
            CHECK(farkas_gap(sys, r2.farkas, worst) > 1e-9);
            CHECK(worst <= 1e-9);
        }
    }
}

TEST_CASE("highly degenerate 0/1 systems terminate") {
    // All choice vertices over 4 items on all pairs: degenerate at the uniform point.
    std::vector<int> perm{0, 1, 2, 3};
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) pairs.emplace_back(a, b);
    LinearSystem sys(static_cast<int>(pairs.size()));
    do {
        std::vector<std::pair<int, double>> col;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            auto pos = [&](int v) { return std::find(perm.begin(), perm.end(), v) - perm.begin(); };
            if (pos(pairs[p].first) < pos(pairs[p].second)) col.emplace_back(static_cast<int>(p), 1.0);
        }
        sys.add_column(col);
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int i = 0; i < sys.rows(); ++i) sys.set_rhs(i, 0.5);
    auto r = solve_feasibility(sys);
    CHECK(r.feasible);
}
