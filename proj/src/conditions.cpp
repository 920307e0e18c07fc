#include "aggrum/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "aggrum/lp.hpp"

namespace aggrum {

namespace {

std::vector<int> ground_positions(const PreferenceDistribution& mu, const AggregationCorrespondence& X) {
    std::vector<int> pos;
    for (const auto& x : X.underlying()) {
        auto p = mu.find(x);
        if (!p) throw Error(Errc::GroundMismatch, "preference ground set lacks " + x);
        pos.push_back(*p);
    }
    return pos;
}

// Restrict a joint tuple (over all non-atomic aggregates) to the non-atomic members of m.
CompositionTuple restrict(const CompositionTuple& t, Menu m) {
    CompositionTuple out;
    for (const auto& [a, s] : t.parts)
        if (m.contains(a)) out.parts.emplace_back(a, s);
    return out;
}

MenuComposition marginal(const MenuComposition& joint, Menu m) {
    MenuComposition out;
    for (const auto& [t, p] : joint) out[restrict(t, m)] += p;
    return out;
}

// Largest absolute gap between two compositions, with the tuple attaining it.
std::pair<double, CompositionTuple> max_gap(const MenuComposition& a, const MenuComposition& b) {
    std::pair<double, CompositionTuple> worst{0.0, {}};
    auto consider = [&](const CompositionTuple& t) {
        double pa = a.count(t) ? a.at(t) : 0.0, pb = b.count(t) ? b.at(t) : 0.0;
        if (std::abs(pa - pb) > worst.first) worst = {std::abs(pa - pb), t};
    };
    for (const auto& [t, p] : a) consider(t);
    for (const auto& [t, p] : b) consider(t);
    return worst;
}

std::vector<CompositionTuple> joint_atoms(const AggregationCorrespondence& X) {
    const auto& space = X.space();
    std::vector<CompositionTuple> atoms{CompositionTuple{}};
    for (int a = space.atomic_count(); a < space.size(); ++a) {
        std::vector<CompositionTuple> next;
        for (const auto& t : atoms)
            for (XMask s = 1; s <= X.full_part(a); ++s) {
                auto u = t;
                u.parts.emplace_back(a, s);
                next.push_back(std::move(u));
            }
        atoms = std::move(next);
    }
    return atoms;
}

}  // namespace

ConditionReport is_non_overlapping(const PreferenceDistribution& mu_x, const AggregationCorrespondence& X) {
    const auto pos = ground_positions(mu_x, X);
    const auto& space = X.space();
    ConditionReport rep;
    for (const auto& [order, w] : mu_x.support()) {
        for (int a = space.atomic_count(); a < space.size(); ++a) {
            std::vector<bool> inside(mu_x.ground().size(), false);
            int lo = order.size(), hi = -1;
            for (int x : X.members(a)) {
                int p = pos[static_cast<std::size_t>(x)];
                inside[static_cast<std::size_t>(p)] = true;
                lo = std::min(lo, order.rank(p));
                hi = std::max(hi, order.rank(p));
            }
            for (int r = lo + 1; r < hi; ++r) {
                int item = order.at(r);
                if (!inside[static_cast<std::size_t>(item)])
                    rep.overlaps.push_back({order, a, mu_x.ground()[static_cast<std::size_t>(item)]});
            }
        }
    }
    rep.holds = rep.overlaps.empty();
    return rep;
}

PreferenceDistribution lift_aru_to_nonoverlapping(const PreferenceDistribution& mu_a, const AggregationCorrespondence& X) {
    const auto& space = X.space();
    std::vector<int> agg_of;
    for (const auto& id : mu_a.ground()) agg_of.push_back(space.index(id));
    if (static_cast<int>(agg_of.size()) != space.size())
        throw Error(Errc::GroundMismatch, "aggregate preference must rank every aggregate");
    std::vector<std::pair<LinearOrder, double>> lifted;
    for (const auto& [order, w] : mu_a.support()) {
        std::vector<int> ranking;
        for (int p : order.ranking())
            for (int x : X.members(agg_of[static_cast<std::size_t>(p)])) ranking.push_back(x);
        lifted.emplace_back(LinearOrder(std::move(ranking)), w);
    }
    return PreferenceDistribution(X.underlying(), std::move(lifted));
}

ConditionReport is_menu_independent(const CompositionDistribution& lam, const AggregationCorrespondence& X,
                                    const ChoiceDomain& dom) {
    const auto& space = X.space();
    std::vector<std::pair<Menu, const MenuComposition*>> entries;
    for (Menu m : dom.menus()) {
        if (!(m.bits & space.non_atomic_mask())) continue;
        const auto* c = lam.find(m);
        if (!c) throw Error(Errc::MissingLambdaForMenu, menu_label(space, m));
        validate_composition(X, m, *c);
        entries.emplace_back(m, c);
    }
    ConditionReport rep;
    const Menu non_atomic{space.non_atomic_mask()};
    auto record = [&](Menu m, Menu other, const MenuComposition& want, const MenuComposition& have) {
        auto [gap, t] = max_gap(want, have);
        if (gap > kMarginalTol) rep.mismatches.push_back({m, other, t, gap});
    };

    // A menu containing every non-atomic aggregate pins down the joint directly.
    auto full = std::find_if(entries.begin(), entries.end(),
                             [&](const auto& e) { return (e.first.bits & non_atomic.bits) == non_atomic.bits; });
    if (entries.empty()) {
        rep.joint = MenuComposition{{full_tuple(X, non_atomic), 1.0}};
    } else if (full != entries.end()) {
        const MenuComposition& joint = *full->second;
        for (const auto& [m, c] : entries) record(m, full->first, *c, marginal(joint, m));
        if (rep.mismatches.empty()) rep.joint = joint;
    } else {
        const auto atoms = joint_atoms(X);
        if (space.non_atomic_count() > 3 || static_cast<long>(atoms.size()) > kMaxJointAtoms)
            throw Error(Errc::TooLarge, "joint composition space too large for the LP route");
        for (int a = space.atomic_count(); a < space.size(); ++a)
            if (X.members(a).size() > 4) throw Error(Errc::TooLarge, "LP route supports at most 4 alternatives per aggregate");
        // One row per (menu, marginal tuple), plus normalization.
        std::vector<std::map<CompositionTuple, int>> row_of(entries.size());
        int rows = 0;
        for (std::size_t k = 0; k < entries.size(); ++k)
            for (const auto& atom : atoms) {
                auto t = restrict(atom, entries[k].first);
                if (!row_of[k].count(t)) row_of[k][t] = rows++;
            }
        lp::LinearSystem sys(rows + 1);
        for (const auto& atom : atoms) {
            std::vector<std::pair<int, double>> col;
            for (std::size_t k = 0; k < entries.size(); ++k) col.emplace_back(row_of[k].at(restrict(atom, entries[k].first)), 1.0);
            col.emplace_back(rows, 1.0);
            sys.add_column(col);
        }
        for (std::size_t k = 0; k < entries.size(); ++k)
            for (const auto& [t, p] : *entries[k].second) sys.set_rhs(row_of[k].at(t), p);
        sys.set_rhs(rows, 1.0);
        auto sol = lp::solve_feasibility(sys);
        if (sol.feasible) {
            MenuComposition joint;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                if (sol.x[i] > 0) joint[atoms[i]] = sol.x[i];
            rep.joint = std::move(joint);
        } else {
            rep.mismatches.push_back({Menu{}, Menu{}, CompositionTuple{}, sol.residual});
        }
    }
    rep.holds = rep.mismatches.empty();
    if (!rep.holds) rep.joint.reset();
    return rep;
}

PreferenceDistribution collapse_to_aru(const PreferenceDistribution& mu_x, const AggregationCorrespondence& X,
                                       const CompositionDistribution& lam) {
    std::vector<Menu> menus;
    for (const auto& [m, c] : lam.per_menu()) menus.push_back(m);
    auto rep = is_menu_independent(lam, X, ChoiceDomain::custom(menus));
    if (!rep.holds) throw Error(Errc::NotMenuIndependent, "composition distribution is menu-dependent");
    const auto pos = ground_positions(mu_x, X);
    const auto& space = X.space();

    std::vector<std::pair<LinearOrder, double>> out;
    for (const auto& [tuple, q] : *rep.joint) {
        std::vector<XMask> sets(static_cast<std::size_t>(space.size()), 0);
        for (int a = 0; a < space.size(); ++a) {
            XMask part = space.is_atomic(a) ? XMask{1} : tuple.part(a);
            const auto& ms = X.members(a);
            for (std::size_t j = 0; j < ms.size(); ++j)
                if ((part >> j) & 1u) sets[static_cast<std::size_t>(a)] |= XMask{1} << pos[static_cast<std::size_t>(ms[j])];
        }
        for (const auto& [order, w] : mu_x.support()) {
            std::vector<int> aggs(static_cast<std::size_t>(space.size()));
            std::vector<int> top(aggs.size());
            for (int a = 0; a < space.size(); ++a) {
                aggs[static_cast<std::size_t>(a)] = a;
                top[static_cast<std::size_t>(a)] = order.rank(order.best(sets[static_cast<std::size_t>(a)]));
            }
            std::sort(aggs.begin(), aggs.end(), [&](int x, int y) {
                return top[static_cast<std::size_t>(x)] < top[static_cast<std::size_t>(y)];
            });
            out.emplace_back(LinearOrder(std::move(aggs)), q * w);
        }
    }
    return PreferenceDistribution(space.ids(), std::move(out));
}

}  // namespace aggrum
