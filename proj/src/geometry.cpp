#include "aggrum/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "aggrum/axioms.hpp"

namespace aggrum {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::size_t argmin_dot(const OrderTable& table, std::span<const double> g) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < table.orders().size(); ++o) {
        double v = table.dot(o, g);
        if (v < best_val) {
            best_val = v;
            best = o;
        }
    }
    return best;
}

std::vector<double> ru_vertex_vector(const RuVertex& v, const OrderTable& table) {
    const auto& cells = table.cells();
    std::vector<double> out(cells.size(), 0.0);
    for (std::size_t k = 0; k < cells.menu_count(); ++k) {
        Menu m = cells.menus()[k];
        auto dev = v.family.deviation(m);
        int pick = dev ? *dev : v.order.best(m.bits);
        out[cells.offset(k) + static_cast<std::size_t>(m.slot(pick))] = 1.0;
    }
    return out;
}

}  // namespace

OrderTable::OrderTable(const AggregateSpace& space, const ChoiceDomain& dom)
    : cells_(dom), orders_(all_orders(space.size())) {
    const std::size_t k = cells_.menu_count();
    follow_.resize(orders_.size() * k);
    for (std::size_t o = 0; o < orders_.size(); ++o)
        for (std::size_t j = 0; j < k; ++j) {
            Menu m = cells_.menus()[j];
            follow_[o * k + j] =
                static_cast<std::uint16_t>(cells_.offset(j) + static_cast<std::size_t>(m.slot(orders_[o].best(m.bits))));
        }
}

double OrderTable::dot(std::size_t order, std::span<const double> g) const {
    double s = 0.0;
    const std::uint16_t* row = &follow_[order * menu_count()];
    for (std::size_t k = 0; k < menu_count(); ++k) s += g[row[k]];
    return s;
}

std::vector<double> OrderTable::vertex(std::size_t order) const {
    std::vector<double> v(cells_.size(), 0.0);
    for (std::size_t k = 0; k < menu_count(); ++k) v[follow(order, k)] = 1.0;
    return v;
}

DistanceResult aru_distance(const StochasticChoice& rho, const AggregateSpace& space) {
    if (space.size() > kMaxEnumeratedGround) throw Error(Errc::DomainTooLarge, "ARU distance supports at most 8 aggregates");
    OrderTable table(space, rho.domain());
    const auto r = table.cells().flatten(rho);
    const auto dim = static_cast<Eigen::Index>(r.size());
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), dim);

    // Wolfe's min-norm point over the shifted vertices v - rho.
    std::vector<std::size_t> active;
    Eigen::MatrixXd P(dim, 0);
    Eigen::VectorXd w;
    auto push = [&](std::size_t o) {
        auto v = table.vertex(o);
        P.conservativeResize(Eigen::NoChange, P.cols() + 1);
        P.col(P.cols() - 1) = Eigen::Map<const Eigen::VectorXd>(v.data(), dim) - rv;
        active.push_back(o);
        w.conservativeResize(w.size() + 1);
        w(w.size() - 1) = 0.0;
    };
    auto drop = [&](Eigen::Index i) {
        const Eigen::Index last = P.cols() - 1;
        for (Eigen::Index c = i; c < last; ++c) {
            P.col(c) = P.col(c + 1);
            w(c) = w(c + 1);
        }
        P.conservativeResize(Eigen::NoChange, last);
        w.conservativeResize(last);
        active.erase(active.begin() + i);
    };

    std::vector<double> neg(r.size());
    std::transform(r.begin(), r.end(), neg.begin(), [](double v) { return -v; });
    push(argmin_dot(table, neg));
    w(0) = 1.0;

    DistanceResult out;
    Eigen::VectorXd x = P * w;
    for (;;) {
        const double fx = x.squaredNorm();
        out.objective_history.push_back(fx);
        std::vector<double> g(x.data(), x.data() + dim);
        const std::size_t j = argmin_dot(table, g);
        const double xp = table.dot(j, g) - x.dot(rv);
        out.duality_gap = 2.0 * (fx - xp);
        if (out.duality_gap <= kDistanceGapTol) break;
        if (out.iterations >= kDistanceMaxIterations) {
            out.hit_iteration_cap = true;
            break;
        }
        if (std::find(active.begin(), active.end(), j) != active.end()) break;  // numerically stalled
        ++out.iterations;
        push(j);
        const std::size_t added = j;

        bool stalled = false;
        for (;;) {
            // Affine minimizer of the active points: [P'P 1; 1' 0][a; t] = [0; 1].
            const Eigen::Index s = P.cols();
            Eigen::MatrixXd K(s + 1, s + 1);
            K.topLeftCorner(s, s) = P.transpose() * P;
            K.topRightCorner(s, 1).setOnes();
            K.bottomLeftCorner(1, s).setOnes();
            K(s, s) = 0.0;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
            rhs(s) = 1.0;
            Eigen::VectorXd alpha = K.completeOrthogonalDecomposition().solve(rhs).head(s);
            if ((alpha.array() > 1e-15).all()) {
                w = alpha / alpha.sum();
                break;
            }
            double theta = 1.0;
            for (Eigen::Index i = 0; i < s; ++i)
                if (alpha(i) <= 1e-15) theta = std::min(theta, w(i) / (w(i) - alpha(i)));
            w = w + theta * (alpha - w);
            for (Eigen::Index i = s - 1; i >= 0; --i)
                if (w(i) <= 1e-15) {
                    if (active[static_cast<std::size_t>(i)] == added) stalled = true;
                    drop(i);
                }
            w /= w.sum();
            if (stalled) break;
        }
        x = P * w;
        if (stalled) break;
    }

    std::vector<std::pair<LinearOrder, double>> mix;
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < active.size(); ++i) {
        const double wi = w(static_cast<Eigen::Index>(i));
        mix.emplace_back(table.orders()[active[i]], wi);
        auto v = table.vertex(active[i]);
        proj += wi * Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
    }
    out.mixture = PreferenceDistribution(space.ids(), std::move(mix));
    std::vector<double> pv(proj.data(), proj.data() + dim);
    out.projection = table.cells().unflatten(pv);
    out.squared_distance = (proj - rv).squaredNorm();
    return out;
}

RuVertex ru_vertex_lmo(std::span<const double> gradient, const OrderTable& table, const AggregateSpace& space) {
    const auto& cells = table.cells();
    if (gradient.size() != cells.size()) throw Error(Errc::InvalidInput, "gradient size differs from the domain");
    const std::size_t k = cells.menu_count();
    // Cheapest deviation per menu; the first non-atomic aggregate wins ties.
    std::vector<double> dev_val(k, std::numeric_limits<double>::infinity());
    std::vector<int> dev_arg(k, -1);
    for (std::size_t j = 0; j < k; ++j) {
        Menu m = cells.menus()[j];
        for (int a : m.members()) {
            if (space.is_atomic(a) || m.size() == 1) continue;
            double g = gradient[cells.offset(j) + static_cast<std::size_t>(m.slot(a))];
            if (g < dev_val[j]) {
                dev_val[j] = g;
                dev_arg[j] = a;
            }
        }
    }
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < table.orders().size(); ++o) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += std::min(gradient[table.follow(o, j)], dev_val[j]);
        if (s < best_val) {
            best_val = s;
            best = o;
        }
    }
    RuVertex out{table.orders()[best], {}, best_val};
    for (std::size_t j = 0; j < k; ++j)
        if (dev_val[j] < gradient[table.follow(best, j)]) out.family.assign(dev_arg[j], cells.menus()[j]);
    return out;
}

SparseApproximation approx_caratheodory(const StochasticChoice& rho, int k, const AggregateSpace& space) {
    if (k < 1) throw Error(Errc::InvalidInput, "k must be positive");
    if (space.size() > kMaxEnumeratedGround) throw Error(Errc::DomainTooLarge, "at most 8 aggregates");
    if (!check_ru_rational(rho, space).passed) throw Error(Errc::NotRURational, "input is not RU-rational");
    OrderTable table(space, rho.domain());
    const auto r = table.cells().flatten(rho);
    const double menus = static_cast<double>(table.menu_count());
    const std::size_t dim = r.size();

    SparseApproximation out;
    out.bound = 1.0 / k;
    // Greedy uniform average: v_{t+1} minimizes ||sum_{i<=t}(v_i - rho) + v - rho||, exact because ||v||^2 = |domain|.
    std::vector<double> e(dim, 0.0), g(dim);
    for (int t = 0; t < k; ++t) {
        for (std::size_t i = 0; i < dim; ++i) g[i] = e[i] - r[i];
        auto v = ru_vertex_lmo(g, table, space);
        auto vv = ru_vertex_vector(v, table);
        for (std::size_t i = 0; i < dim; ++i) e[i] += vv[i] - r[i];
        out.vertices.push_back(std::move(v));
    }
    out.achieved = dot(e, e) / (static_cast<double>(k) * k) / menus;

    std::vector<double> x(dim, 0.0);
    for (int t = 0; t < k; ++t) {
        for (std::size_t i = 0; i < dim; ++i) g[i] = x[i] - r[i];
        auto v = ru_vertex_lmo(g, table, space);
        auto vv = ru_vertex_vector(v, table);
        const double gamma = 2.0 / (t + 2);
        for (auto& wt : out.fw_weights) wt *= 1.0 - gamma;
        for (std::size_t i = 0; i < dim; ++i) x[i] += gamma * (vv[i] - x[i]);
        out.fw_weights.push_back(gamma);
        out.fw_vertices.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < dim; ++i) g[i] = x[i] - r[i];
    out.fw_achieved = dot(g, g) / menus;
    return out;
}

VertexCountBound vertex_count_lower_bound(int n) {
    using boost::multiprecision::cpp_int;
    if (n < 1 || n > 24) throw Error(Errc::InvalidInput, "n must lie in [1, 24]");
    const long long exponent = (1LL << n) - static_cast<long long>(n) * (n - 1) / 2 - 1;
    cpp_int power = cpp_int(1) << static_cast<unsigned>(exponent);
    cpp_int factorial = 1;
    for (int i = 2; i <= n; ++i) factorial *= i;
    return {factorial * power, power / (n + 1)};
}

StochasticChoice build_nesting_counterexample(const AggregateSpace& space) {
    if (space.non_atomic_count() != 1) throw Error(Errc::InvalidInput, "needs exactly one non-atomic aggregate");
    const int m = space.atomic_count();
    const int a0 = m;
    StochasticChoice rho;
    rho.set(Menu{Mask{1} << a0}, {1.0});
    for (Mask b = 1; b <= space.atomic_mask(); ++b) {
        Menu D{b};
        const double share = 1.0 / D.size();
        rho.set(D, std::vector<double>(static_cast<std::size_t>(D.size()), share));
        Menu full{b | (Mask{1} << a0)};
        std::vector<double> p(static_cast<std::size_t>(full.size()), share);
        const bool prefix = (b & (b + 1)) == 0;  // D = {y_1, ..., y_n}
        if (prefix) {
            p[static_cast<std::size_t>(D.size() - 1)] = 0.0;
        } else {
            p.back() = 0.0;
        }
        rho.set(full, std::move(p));
    }
    return rho;
}

}  // namespace aggrum
