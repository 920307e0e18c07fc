#include "aggrum/model.hpp"

#include <algorithm>

namespace aggrum {

double rum_prob(const PreferenceDistribution& mu, XMask menu, int item) {
    if (((menu >> item) & 1u) == 0) throw Error(Errc::ItemNotInMenu, "item is not in the menu");
    double p = 0.0;
    for (const auto& [order, w] : mu.support())
        if (order.best(menu) == item) p += w;
    return p;
}

double rum_prob(const PreferenceDistribution& mu, std::span<const std::string> menu, std::string_view item) {
    XMask set = 0;
    for (const auto& id : menu) set |= XMask{1} << mu.index(id);
    auto it = std::find(menu.begin(), menu.end(), item);
    if (it == menu.end()) throw Error(Errc::ItemNotInMenu, std::string(item) + " is not in the menu");
    return rum_prob(mu, set, mu.index(item));
}

StochasticChoice forward_evaluate(const PreferenceDistribution& mu_x, const AggregationCorrespondence& X,
                                  const CompositionDistribution& lam, const ChoiceDomain& dom) {
    const auto& space = X.space();
    // Position of each underlying alternative inside mu's ground set.
    std::vector<int> pos;
    for (const auto& x : X.underlying()) pos.push_back(mu_x.index(x));
    std::vector<int> owner_at(mu_x.ground().size(), -1);
    for (std::size_t x = 0; x < pos.size(); ++x)
        owner_at[static_cast<std::size_t>(pos[x])] = X.owner(static_cast<int>(x));

    auto part_mask = [&](int agg, XMask local) {
        XMask out = 0;
        const auto& ms = X.members(agg);
        for (std::size_t j = 0; j < ms.size(); ++j)
            if ((local >> j) & 1u) out |= XMask{1} << pos[static_cast<std::size_t>(ms[j])];
        return out;
    };

    static const MenuComposition kTrivial{{CompositionTuple{}, 1.0}};
    StochasticChoice rho;
    for (Menu m : dom.menus()) {
        const bool has_non_atomic = (m.bits & space.non_atomic_mask()) != 0;
        const MenuComposition* comp = &kTrivial;
        if (has_non_atomic) {
            comp = lam.find(m);
            if (!comp) throw Error(Errc::MissingLambdaForMenu, menu_label(space, m));
            validate_composition(X, m, *comp);
        }
        std::vector<double> probs(static_cast<std::size_t>(m.size()), 0.0);
        for (const auto& [tuple, weight] : *comp) {
            XMask uni = 0;
            for (int a : m.members())
                uni |= space.is_atomic(a) ? part_mask(a, 1) : part_mask(a, tuple.part(a));
            for (const auto& [order, w] : mu_x.support()) {
                int winner = owner_at[static_cast<std::size_t>(order.best(uni))];
                probs[static_cast<std::size_t>(m.slot(winner))] += weight * w;
            }
        }
        rho.set(m, std::move(probs));
    }
    return rho;
}

std::vector<int> aggregate_positions(const PreferenceDistribution& mu_a, const AggregateSpace& space) {
    if (static_cast<int>(mu_a.ground().size()) != space.size())
        throw Error(Errc::GroundMismatch, "preference ground set differs from the aggregate space");
    std::vector<int> agg_of;
    for (const auto& id : mu_a.ground()) {
        auto a = space.find(id);
        if (!a) throw Error(Errc::GroundMismatch, "unknown aggregate " + id + " in preference ground set");
        agg_of.push_back(*a);
    }
    return agg_of;
}

StochasticChoice aru_evaluate(const PreferenceDistribution& mu_a, const AggregateSpace& space,
                              const ChoiceDomain& dom) {
    auto agg_of = aggregate_positions(mu_a, space);
    std::vector<int> pos_of(agg_of.size());
    for (std::size_t p = 0; p < agg_of.size(); ++p) pos_of[static_cast<std::size_t>(agg_of[p])] = static_cast<int>(p);

    StochasticChoice rho;
    for (Menu m : dom.menus()) {
        XMask set = 0;
        for (int a : m.members()) set |= XMask{1} << pos_of[static_cast<std::size_t>(a)];
        std::vector<double> probs(static_cast<std::size_t>(m.size()), 0.0);
        for (const auto& [order, w] : mu_a.support()) {
            int winner = agg_of[static_cast<std::size_t>(order.best(set))];
            probs[static_cast<std::size_t>(m.slot(winner))] += w;
        }
        rho.set(m, std::move(probs));
    }
    return rho;
}

int vertex_pick(const LinearOrder& order, const MenuCollectionFamily& family, Menu m) {
    if (auto dev = family.deviation(m)) {
        if (!m.contains(*dev)) throw Error(Errc::AggregateNotInMenu, "deviation target is not in the menu");
        return *dev;
    }
    return order.best(m.bits);
}

StochasticChoice vertex_choice(const AggregateSpace& space, const LinearOrder& order,
                               const MenuCollectionFamily& family, const ChoiceDomain& dom) {
    if (order.size() != space.size()) throw Error(Errc::GroundMismatch, "order must rank every aggregate");
    for (const auto& [m, a] : family.assignments())
        if (!dom.contains(m)) throw Error(Errc::InvalidInput, "family menu outside the domain");
    StochasticChoice rho;
    for (Menu m : dom.menus()) {
        std::vector<double> probs(static_cast<std::size_t>(m.size()), 0.0);
        probs[static_cast<std::size_t>(m.slot(vertex_pick(order, family, m)))] = 1.0;
        rho.set(m, std::move(probs));
    }
    return rho;
}

}  // namespace aggrum
