#include "aggrum/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <thread>

#include <Eigen/Dense>

#include "aggrum/geometry.hpp"

namespace aggrum {

namespace {

double utility(const UtilityMap& u, const std::string& id) {
    auto it = u.find(id);
    if (it == u.end()) throw Error(Errc::MissingUtility, "no utility for " + id);
    if (!std::isfinite(it->second)) throw Error(Errc::InvalidInput, "non-finite utility for " + id);
    return it->second;
}

// Runs body(k) for k in [0, count) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(jobs, static_cast<int>(count))));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t k = t; k < count; k += workers) body(k);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

MenuComposition outside_composition(const Lambda3& lam) {
    constexpr int a0 = 2;
    MenuComposition c;
    const XMask parts[3] = {1, 2, 3};  // {z}, {w}, {z,w}
    for (int i = 0; i < 3; ++i)
        if (lam[static_cast<std::size_t>(i)] > 0) c[CompositionTuple{{{a0, parts[i]}}}] = lam[static_cast<std::size_t>(i)];
    return c;
}

Menu world_menu(WorldMenu m) {
    switch (m) {
    case WorldMenu::X: return Menu{0b101};
    case WorldMenu::Y: return Menu{0b110};
    case WorldMenu::XY: return Menu{0b111};
    }
    return Menu{};
}

StochasticChoice markets_only(const StochasticChoice& rho) {
    StochasticChoice out;
    for (WorldMenu m : {WorldMenu::X, WorldMenu::Y, WorldMenu::XY}) out.set(world_menu(m), rho.at(world_menu(m)));
    return out;
}

Lambda3& lambda_of(LogitWorld& w, WorldMenu m) {
    return m == WorldMenu::X ? w.lam_x : (m == WorldMenu::Y ? w.lam_y : w.lam_xy);
}

bool same(const Lambda3& a, const Lambda3& b) {
    for (std::size_t i = 0; i < 3; ++i)
        if (std::abs(a[i] - b[i]) > 1e-12) return false;
    return true;
}

double l1(const Lambda3& a, const Lambda3& b) {
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

Lambda3 grid_lambda(int i, int j, int steps) {
    const double z = static_cast<double>(i) / steps, w = static_cast<double>(j) / steps;
    return {z, w, static_cast<double>(steps - i - j) / steps};
}

}  // namespace

std::vector<double> logit_choice(const UtilityMap& u, std::span<const std::string> menu) {
    if (menu.empty()) throw Error(Errc::InvalidInput, "empty menu");
    std::vector<double> v;
    for (const auto& id : menu) v.push_back(utility(u, id));
    const double top = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (auto& x : v) s += (x = std::exp(x - top));
    for (auto& x : v) x /= s;
    return v;
}

StochasticChoice reduce_dataset(const UtilityMap& u, const AggregationCorrespondence& X,
                                const CompositionDistribution& lam, const ChoiceDomain& dom) {
    const auto& space = X.space();
    std::vector<double> util;
    for (const auto& x : X.underlying()) util.push_back(utility(u, x));
    const double top = *std::max_element(util.begin(), util.end());
    std::vector<double> weight;
    for (double v : util) weight.push_back(std::exp(v - top));

    auto mass = [&](int agg, XMask part) {
        double s = 0.0;
        const auto& ms = X.members(agg);
        for (std::size_t j = 0; j < ms.size(); ++j)
            if ((part >> j) & 1u) s += weight[static_cast<std::size_t>(ms[j])];
        return s;
    };
    static const MenuComposition kTrivial{{CompositionTuple{}, 1.0}};
    StochasticChoice rho;
    for (Menu m : dom.menus()) {
        const MenuComposition* comp = &kTrivial;
        if (m.bits & space.non_atomic_mask()) {
            comp = lam.find(m);
            if (!comp) throw Error(Errc::MissingLambdaForMenu, menu_label(space, m));
            validate_composition(X, m, *comp);
        }
        std::vector<double> probs(static_cast<std::size_t>(m.size()), 0.0);
        for (const auto& [t, p] : *comp) {
            std::vector<double> e;
            for (int a : m.members()) e.push_back(mass(a, space.is_atomic(a) ? XMask{1} : t.part(a)));
            const double total = std::accumulate(e.begin(), e.end(), 0.0);
            for (std::size_t i = 0; i < e.size(); ++i) probs[i] += p * e[i] / total;
        }
        rho.set(m, std::move(probs));
    }
    return rho;
}

namespace {

std::vector<int> free_aggregates(const StochasticChoice& rho, int pinned) {
    Mask seen = 0;
    for (const auto& [m, p] : rho.table()) seen |= m.bits;
    std::vector<int> out;
    for (int a : Menu{seen}.members())
        if (a != pinned) out.push_back(a);
    return out;
}

LogitObjective objective_at(const StochasticChoice& rho, const std::vector<int>& free, const std::vector<double>& util) {
    const std::size_t k = free.size();
    std::vector<int> slot(util.size(), -1);
    for (std::size_t i = 0; i < k; ++i) slot[static_cast<std::size_t>(free[i])] = static_cast<int>(i);
    LogitObjective obj;
    obj.gradient.assign(k, 0.0);
    obj.hessian.assign(k * k, 0.0);
    for (const auto& [m, shares] : rho.table()) {
        auto members = m.members();
        std::vector<double> v;
        for (int a : members) v.push_back(util[static_cast<std::size_t>(a)]);
        const double top = *std::max_element(v.begin(), v.end());
        double s = 0.0;
        for (double x : v) s += std::exp(x - top);
        const double lse = top + std::log(s);
        std::vector<double> p;
        for (double x : v) p.push_back(std::exp(x - lse));
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (shares[i] > 0) obj.value += shares[i] * (v[i] - lse);
            const int si = slot[static_cast<std::size_t>(members[i])];
            if (si < 0) continue;
            obj.gradient[static_cast<std::size_t>(si)] += shares[i] - p[i];
            for (std::size_t j = 0; j < members.size(); ++j) {
                const int sj = slot[static_cast<std::size_t>(members[j])];
                if (sj < 0) continue;
                obj.hessian[static_cast<std::size_t>(si) * k + static_cast<std::size_t>(sj)] -=
                    (i == j ? p[i] : 0.0) - p[i] * p[j];
            }
        }
    }
    return obj;
}

}  // namespace

LogitObjective aggregated_logit_objective(const StochasticChoice& rho, const AggregateSpace& space, const UtilityMap& u,
                                          const std::string& pinned) {
    const int pin = space.index(pinned);
    const auto free = free_aggregates(rho, pin);
    std::vector<double> util(static_cast<std::size_t>(space.size()), 0.0);
    for (int a : free) util[static_cast<std::size_t>(a)] = utility(u, space.id(a));
    return objective_at(rho, free, util);
}

LogitFit fit_aggregated_logit(const StochasticChoice& rho, const AggregateSpace& space, const std::string& pinned) {
    const int pin = space.index(pinned);
    const auto free = free_aggregates(rho, pin);
    // Every aggregate must connect to the pinned one through shared menus.
    Mask reached = Mask{1} << pin;
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [m, p] : rho.table())
            if ((m.bits & reached) && (m.bits & ~reached)) {
                reached |= m.bits;
                grew = true;
            }
    }
    for (int a : free)
        if (!((reached >> a) & 1u)) throw Error(Errc::NotIdentified, space.id(a) + " is not linked to " + pinned);

    const std::size_t k = free.size();
    std::vector<double> util(static_cast<std::size_t>(space.size()), 0.0);
    LogitFit fit;
    auto write_back = [&] {
        fit.u.clear();
        fit.u[pinned] = 0.0;
        for (int a : free) fit.u[space.id(a)] = util[static_cast<std::size_t>(a)];
    };
    for (int it = 0; it <= kLogitMaxIterations; ++it) {
        auto obj = objective_at(rho, free, util);
        const Eigen::Map<const Eigen::MatrixXd> H(obj.hessian.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        const Eigen::Map<const Eigen::VectorXd> g(obj.gradient.data(), static_cast<Eigen::Index>(k));
        fit.max_hessian_eigenvalue.push_back(k ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff() : 0.0);
        fit.iterations = it;
        fit.log_likelihood = obj.value;
        fit.gradient_norm = k ? g.cwiseAbs().maxCoeff() : 0.0;
        if (fit.gradient_norm <= kLogitGradientTol) {
            write_back();
            return fit;
        }
        if (it == kLogitMaxIterations) break;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(-H);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw Error(Errc::NotIdentified, "log-likelihood is not strictly concave");
        const Eigen::VectorXd d = ldlt.solve(g);
        double t = 1.0;
        bool moved = false;
        for (int h = 0; h <= kLogitMaxHalvings; ++h, t *= 0.5) {
            auto cand = util;
            for (std::size_t i = 0; i < k; ++i)
                cand[static_cast<std::size_t>(free[i])] += t * d(static_cast<Eigen::Index>(i));
            if (objective_at(rho, free, cand).value >= obj.value - 1e-15 * std::max(1.0, std::abs(obj.value))) {
                util = std::move(cand);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    throw Error(Errc::NoConvergence, "Newton iterations did not reach the gradient tolerance");
}

double bias(const UtilityMap& u_hat, const UtilityMap& u_true, const std::string& x, const std::string& y) {
    return (utility(u_hat, x) - utility(u_hat, y)) - (utility(u_true, x) - utility(u_true, y));
}

bool ordering_reversed(const UtilityMap& u_hat, const UtilityMap& u_true, const std::string& x, const std::string& y) {
    return (utility(u_hat, x) - utility(u_hat, y)) * (utility(u_true, x) - utility(u_true, y)) < 0;
}

const AggregateSpace& logit_world_space() {
    static const AggregateSpace space({"x", "y"}, {"a0"});
    return space;
}

const AggregationCorrespondence& logit_world_correspondence() {
    static const auto X = AggregationCorrespondence::with_atomic_identity(logit_world_space(), {{"z", "w"}});
    return X;
}

StochasticChoice logit_world_choice(const LogitWorld& world) {
    const auto& space = logit_world_space();
    CompositionDistribution lam;
    lam.set(Menu{0b100}, outside_composition({0.0, 0.0, 1.0}));
    lam.set(world_menu(WorldMenu::X), outside_composition(world.lam_x));
    lam.set(world_menu(WorldMenu::Y), outside_composition(world.lam_y));
    lam.set(world_menu(WorldMenu::XY), outside_composition(world.lam_xy));
    return reduce_dataset(world.u, logit_world_correspondence(), lam, ChoiceDomain::full(space));
}

WorldResult evaluate_world(const LogitWorld& world, bool with_distance) {
    WorldResult r;
    r.rho = logit_world_choice(world);
    r.u_hat = fit_aggregated_logit(markets_only(r.rho), logit_world_space(), "a0").u;
    r.bias = bias(r.u_hat, world.u);
    if (with_distance) r.squared_distance = aru_distance(r.rho, logit_world_space()).squared_distance;
    return r;
}

SweepConfig lambda_sweep_config() {
    SweepConfig c;
    c.kind = SweepKind::Lambda;
    c.varied = WorldMenu::X;
    return c;
}

SweepConfig utility_sweep_config() {
    SweepConfig c;
    c.kind = SweepKind::Utility;
    c.base.lam_x = {0.8, 0.1, 0.1};
    c.base.lam_y = {0.1, 0.8, 0.1};
    c.base.lam_xy = {0.8, 0.1, 0.1};
    return c;
}

std::vector<std::pair<int, int>> simplex_grid(int steps) {
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j <= steps; ++j)
        for (int i = 0; i + j <= steps; ++i) out.emplace_back(i, j);
    return out;
}

std::vector<SweepRow> sweep(const SweepConfig& config, int jobs) {
    const bool want_bias = config.measure != SweepMeasure::Distance;
    const bool want_distance = config.measure != SweepMeasure::Bias;
    std::vector<LogitWorld> worlds;
    std::vector<SweepRow> rows;
    if (config.kind == SweepKind::Lambda) {
        const int steps = static_cast<int>(std::lround(1.0 / config.lambda_step));
        if (steps < 1 || std::abs(steps * config.lambda_step - 1.0) > 1e-9)
            throw Error(Errc::InvalidInput, "lambda step must divide 1");
        for (auto [i, j] : simplex_grid(steps)) {
            LogitWorld w = config.base;
            lambda_of(w, config.varied) = grid_lambda(i, j, steps);
            SweepRow row;
            row.h = static_cast<double>(i) / steps;
            row.v = static_cast<double>(j) / steps;
            row.independent = same(w.lam_x, w.lam_y) && same(w.lam_y, w.lam_xy);
            const WorldMenu other = config.varied == WorldMenu::XY ? WorldMenu::X : WorldMenu::XY;
            row.l1_from_independent = l1(lambda_of(w, config.varied), lambda_of(w, other));
            worlds.push_back(w);
            rows.push_back(row);
        }
    } else {
        if (!(config.u_step > 0) || config.u_max < config.u_min) throw Error(Errc::InvalidInput, "bad utility grid");
        const int n = static_cast<int>(std::lround((config.u_max - config.u_min) / config.u_step)) + 1;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                LogitWorld w = config.base;
                w.u["z"] = config.u_min + i * config.u_step;
                w.u["w"] = config.u_min + j * config.u_step;
                SweepRow row;
                row.h = w.u["z"];
                row.v = w.u["w"];
                row.independent = same(w.lam_x, w.lam_y) && same(w.lam_y, w.lam_xy);
                worlds.push_back(w);
                rows.push_back(row);
            }
    }
    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        auto r = evaluate_world(worlds[k], want_distance);
        if (want_bias) rows[k].bias = r.bias;
        if (want_distance) rows[k].squared_distance = r.squared_distance;
    });
    return rows;
}

std::vector<MinMaxRow> minmax_bias(const UtilityMap& u, double step, int jobs) {
    const int steps = static_cast<int>(std::lround(1.0 / step));
    if (steps < 1 || std::abs(steps * step - 1.0) > 1e-9) throw Error(Errc::InvalidInput, "step must divide 1");
    const auto grid = simplex_grid(steps);
    std::vector<MinMaxRow> rows(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t k) {
        // Outer axes: horizontal lambda({w}), vertical lambda({z}).
        const auto [iw, iz] = grid[k];
        LogitWorld w;
        w.u = u;
        w.lam_xy = grid_lambda(iz, iw, steps);
        MinMaxRow row;
        row.w = static_cast<double>(iw) / steps;
        row.z = static_cast<double>(iz) / steps;
        row.max_bias = -INFINITY;
        row.min_bias = INFINITY;
        row.min_abs_bias = INFINITY;
        for (auto [i1, j1] : grid) {
            w.lam_x = grid_lambda(i1, j1, steps);
            for (auto [i2, j2] : grid) {
                w.lam_y = grid_lambda(i2, j2, steps);
                const double b = evaluate_world(w, false).bias;
                row.max_bias = std::max(row.max_bias, b);
                row.min_bias = std::min(row.min_bias, b);
                row.min_abs_bias = std::min(row.min_abs_bias, std::abs(b));
            }
        }
        w.lam_x = w.lam_y = w.lam_xy;
        row.independent_bias = evaluate_world(w, false).bias;
        rows[k] = row;
    });
    return rows;
}

}  // namespace aggrum
