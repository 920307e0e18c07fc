#include "aggrum/grid_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "aggrum/lp.hpp"
#include "aggrum/model.hpp"

namespace aggrum {

namespace {

constexpr double kZeroCell = 1e-12;

struct ConstrainedMenu {
    Menu menu;     // D u {a0}
    XMask d_set = 0;  // D as positions in the underlying order
    std::vector<int> items;  // D members (aggregate index = underlying position)
    std::vector<double> share;  // rho over items, a0 last
    int kind = 0;  // 0 = a0 takes everything, 1 = a0 takes nothing, 2 = general
};

class Search {
public:
    Search(const StochasticChoice& rho, const AggregateSpace& space, int n, double resolution, long budget)
        : rho_(rho), space_(space), m_(space.atomic_count()), n_(n), budget_(budget) {
        steps_ = static_cast<int>(std::lround(1.0 / resolution));
        if (steps_ < 1 || std::abs(steps_ * resolution - 1.0) > 1e-9)
            throw Error(Errc::InvalidInput, "resolution must divide 1");
        orders_ = all_orders(m_ + n_);
        const int a0 = m_;
        for (const auto& [menu, p] : rho.table()) {
            if (!menu.contains(a0)) {
                if (menu.size() >= 2) atomic_.push_back(menu);
                continue;
            }
            if (menu.size() == 1) continue;
            ConstrainedMenu cm;
            cm.menu = menu;
            cm.items = Menu{menu.bits & space.atomic_mask()}.members();
            for (int y : cm.items) cm.d_set |= XMask{1} << y;
            cm.share = p;
            const double a0_share = p.back();
            cm.kind = a0_share >= 1.0 - kZeroCell ? 0 : (a0_share <= kZeroCell ? 1 : 2);
            menus_.push_back(std::move(cm));
        }
        std::stable_sort(menus_.begin(), menus_.end(), [](const auto& x, const auto& y) { return x.kind < y.kind; });
        for (std::size_t k = 0; k < menus_.size(); ++k) {
            const auto& cm = menus_[k];
            if (cm.kind == 1 && first_bottom_ < 0) first_bottom_ = static_cast<int>(k);
        }
        const int subsets = (1 << n_) - 1;
        for (int k = 1; k < (1 << subsets); ++k) general_supports_.push_back(k);
        std::stable_sort(general_supports_.begin(), general_supports_.end(),
                         [](int x, int y) { return std::popcount(unsigned(x)) < std::popcount(unsigned(y)); });
        choice_.assign(menus_.size(), 0);
    }

    GridOracleResult run() {
        std::vector<int> all(orders_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        if (atomic_feasible(all)) dfs(0, all);
        result_.stats.pruned_by_support = !result_.found && result_.stats.grid_points == 0;
        return std::move(result_);
    }

private:
    XMask z_of(int subset) const { return static_cast<XMask>(subset) << m_; }

    // Support Sigma is a bitmask over subsets 1..2^n-1 (bit s-1 for subset s).
    std::vector<int> subsets_of(int sigma) const {
        std::vector<int> out;
        for (int s = 1; s < (1 << n_); ++s)
            if ((sigma >> (s - 1)) & 1) out.push_back(s);
        return out;
    }

    std::vector<int> candidates(std::size_t level) const {
        const auto& cm = menus_[level];
        const int full = (1 << n_) - 1;
        if (cm.kind == 0) return {1 << (full - 1)};
        if (cm.kind == 1) {
            // One singleton suffices; the first such menu may use z_1 by relabeling.
            std::vector<int> out;
            for (int j = 0; j < n_; ++j) {
                out.push_back(1 << ((1 << j) - 1));
                if (static_cast<int>(level) == first_bottom_) break;
            }
            return out;
        }
        return general_supports_;
    }

    // Outcome slot in the menu for the order's choice from D u S: index into items, or items.size() for a0.
    std::size_t outcome(const LinearOrder& o, const ConstrainedMenu& cm, int subset) const {
        int w = o.best(cm.d_set | z_of(subset));
        if (w >= m_) return cm.items.size();
        return static_cast<std::size_t>(std::find(cm.items.begin(), cm.items.end(), w) - cm.items.begin());
    }

    bool tight(const ConstrainedMenu& cm, std::size_t i) const {
        const double base = rho_.prob(Menu{static_cast<Mask>(cm.d_set)}, cm.items[i]);
        return base > kZeroCell && std::abs(cm.share[i] - base) <= kZeroCell;
    }

    std::vector<int> filter(const std::vector<int>& O, const ConstrainedMenu& cm, const std::vector<int>& subs) const {
        std::vector<int> out;
        for (int oi : O) {
            const auto& o = orders_[static_cast<std::size_t>(oi)];
            const std::size_t top = outcome(o, cm, 0);  // best of D alone
            const bool top_tight = tight(cm, top);
            bool ok = true;
            for (int s : subs) {
                std::size_t w = outcome(o, cm, s);
                if (cm.share[w] <= kZeroCell || (top_tight && w != top)) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(oi);
        }
        return out;
    }

    bool positive_cells_reachable(const std::vector<int>& O, const ConstrainedMenu& cm, const std::vector<int>& subs) const {
        std::vector<bool> hit(cm.share.size(), false);
        for (int oi : O)
            for (int s : subs) hit[outcome(orders_[static_cast<std::size_t>(oi)], cm, s)] = true;
        for (std::size_t i = 0; i < cm.share.size(); ++i)
            if (cm.share[i] > kZeroCell && !hit[i]) return false;
        return true;
    }

    void tick() {
        if (++result_.stats.nodes + result_.stats.grid_points > budget_)
            throw Error(Errc::TooLarge, "grid oracle exceeded its evaluation budget");
    }

    bool atomic_feasible(const std::vector<int>& O) {
        if (O.empty()) return false;
        lp::LinearSystem sys(atomic_rows() + 1);
        for (int oi : O) {
            std::vector<std::pair<int, double>> col;
            add_atomic_entries(orders_[static_cast<std::size_t>(oi)], col);
            col.emplace_back(atomic_rows(), 1.0);
            sys.add_column(col);
        }
        set_atomic_rhs(sys);
        sys.set_rhs(atomic_rows(), 1.0);
        ++result_.stats.lp_solves;
        return lp::solve_feasibility(sys, kGridLpTol).feasible;
    }

    int atomic_rows() const {
        int r = 0;
        for (Menu d : atomic_) r += d.size();
        return r;
    }

    void add_atomic_entries(const LinearOrder& o, std::vector<std::pair<int, double>>& col) const {
        int row = 0;
        for (Menu d : atomic_) {
            col.emplace_back(row + d.slot(o.best(d.bits)), 1.0);
            row += d.size();
        }
    }

    void set_atomic_rhs(lp::LinearSystem& sys) const {
        int row = 0;
        for (Menu d : atomic_)
            for (double p : rho_.at(d)) sys.set_rhs(row++, p);
    }

    bool dfs(std::size_t level, const std::vector<int>& O) {
        if (level == menus_.size()) return grid_phase(O);
        const auto& cm = menus_[level];
        for (int sigma : candidates(level)) {
            tick();
            auto subs = subsets_of(sigma);
            auto next = filter(O, cm, subs);
            if (next.empty() || !positive_cells_reachable(next, cm, subs)) continue;
            if (next.size() != O.size() && !atomic_feasible(next)) continue;
            choice_[level] = sigma;
            if (dfs(level + 1, next)) return true;
        }
        return false;
    }

    // All compositions of steps_ into `parts` positive integers.
    static std::vector<std::vector<int>> compositions(int total, int parts) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur(static_cast<std::size_t>(parts), 0);
        auto rec = [&](auto&& self, int i, int left) -> void {
            if (i == parts - 1) {
                cur[static_cast<std::size_t>(i)] = left;
                out.push_back(cur);
                return;
            }
            for (int v = 1; v <= left - (parts - 1 - i); ++v) {
                cur[static_cast<std::size_t>(i)] = v;
                self(self, i + 1, left - v);
            }
        };
        if (total >= parts) rec(rec, 0, total);
        return out;
    }

    bool grid_phase(const std::vector<int>& O) {
        ++result_.stats.patterns;
        std::vector<std::vector<int>> subs(menus_.size());
        std::vector<std::vector<std::vector<int>>> grids(menus_.size());
        for (std::size_t k = 0; k < menus_.size(); ++k) {
            subs[k] = subsets_of(choice_[k]);
            grids[k] = compositions(steps_, static_cast<int>(subs[k].size()));
            if (grids[k].empty()) return false;
        }
        std::vector<std::size_t> idx(menus_.size(), 0);
        for (;;) {
            ++result_.stats.grid_points;
            tick();
            if (solve_point(O, subs, grids, idx)) return true;
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == grids[k].size()) idx[k++] = 0;
            if (k == idx.size()) return false;
        }
    }

    bool solve_point(const std::vector<int>& O, const std::vector<std::vector<int>>& subs,
                     const std::vector<std::vector<std::vector<int>>>& grids, const std::vector<std::size_t>& idx) {
        int rows = atomic_rows();
        std::vector<int> menu_row(menus_.size());
        for (std::size_t k = 0; k < menus_.size(); ++k) {
            menu_row[k] = rows;
            rows += static_cast<int>(menus_[k].items.size());
        }
        lp::LinearSystem sys(rows + 1);
        for (int oi : O) {
            const auto& o = orders_[static_cast<std::size_t>(oi)];
            std::vector<std::pair<int, double>> col;
            add_atomic_entries(o, col);
            for (std::size_t k = 0; k < menus_.size(); ++k) {
                std::vector<double> mass(menus_[k].items.size() + 1, 0.0);
                const auto& g = grids[k][idx[k]];
                for (std::size_t s = 0; s < subs[k].size(); ++s)
                    mass[outcome(o, menus_[k], subs[k][s])] += static_cast<double>(g[s]) / steps_;
                for (std::size_t i = 0; i < menus_[k].items.size(); ++i)
                    if (mass[i] != 0.0) col.emplace_back(menu_row[k] + static_cast<int>(i), mass[i]);
            }
            col.emplace_back(rows, 1.0);
            sys.add_column(col);
        }
        set_atomic_rhs(sys);
        for (std::size_t k = 0; k < menus_.size(); ++k)
            for (std::size_t i = 0; i < menus_[k].items.size(); ++i)
                sys.set_rhs(menu_row[k] + static_cast<int>(i), menus_[k].share[i]);
        sys.set_rhs(rows, 1.0);
        ++result_.stats.lp_solves;
        auto sol = lp::solve_feasibility(sys, kGridLpTol);
        if (!sol.feasible) return false;
        build_witness(O, subs, grids, idx, sol.x);
        return true;
    }

    void build_witness(const std::vector<int>& O, const std::vector<std::vector<int>>& subs,
                       const std::vector<std::vector<std::vector<int>>>& grids, const std::vector<std::size_t>& idx,
                       const std::vector<double>& x) {
        const int a0 = m_;
        std::vector<std::string> zs;
        for (int j = 1; j <= n_; ++j) zs.push_back(space_.id(a0) + "::" + std::to_string(j));
        std::vector<std::string> ground = space_.atomic_ids();
        ground.insert(ground.end(), zs.begin(), zs.end());
        std::vector<std::pair<LinearOrder, double>> weighted;
        for (std::size_t c = 0; c < O.size(); ++c)
            if (x[c] > 0) weighted.emplace_back(orders_[static_cast<std::size_t>(O[c])], x[c]);
        PreferenceDistribution mu(ground, std::move(weighted));
        std::vector<std::vector<std::string>> sets{zs};
        auto X = AggregationCorrespondence::with_atomic_identity(space_, sets);

        CompositionDistribution lam;
        const XMask full = X.full_part(a0);
        lam.set(Menu{Mask{1} << a0}, {{CompositionTuple{{{a0, full}}}, 1.0}});
        for (std::size_t k = 0; k < menus_.size(); ++k) {
            MenuComposition comp;
            const auto& g = grids[k][idx[k]];
            for (std::size_t s = 0; s < subs[k].size(); ++s)
                comp[CompositionTuple{{{a0, static_cast<XMask>(subs[k][s])}}}] += static_cast<double>(g[s]) / steps_;
            lam.set(menus_[k].menu, comp);
        }
        auto fwd = forward_evaluate(mu, X, lam, rho_.domain());
        const double residual = max_abs_diff(fwd, rho_);
        result_.found = true;
        result_.witness = GridWitness{std::move(mu), std::move(X), std::move(lam), residual};
    }

    const StochasticChoice& rho_;
    const AggregateSpace& space_;
    int m_, n_;
    long budget_;
    int steps_ = 0;
    int first_bottom_ = -1;
    std::vector<LinearOrder> orders_;
    std::vector<Menu> atomic_;
    std::vector<ConstrainedMenu> menus_;
    std::vector<int> general_supports_;
    std::vector<int> choice_;
    GridOracleResult result_;
};

}  // namespace

GridOracleResult grid_oracle_ru_n(const StochasticChoice& rho, const AggregateSpace& space, int n, double resolution,
                                  long budget) {
    if (space.non_atomic_count() != 1) throw Error(Errc::InvalidInput, "grid oracle needs exactly one non-atomic aggregate");
    if (n < 2) throw Error(Errc::InvalidInput, "a non-atomic aggregate needs at least two alternatives");
    if (space.atomic_count() > 3 || n > 3)
        throw Error(Errc::TooLarge, "grid oracle supports at most 3 atomic aggregates and n <= 3");
    return Search(rho, space, n, resolution, budget).run();
}

}  // namespace aggrum
