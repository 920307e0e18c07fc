#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "aggrum/core.hpp"
#include "aggrum/model.hpp"

namespace testkit {

using namespace aggrum;
using Rng = std::mt19937_64;

inline AggregateSpace make_space(int n_atomic, int n_non_atomic) {
    std::vector<std::string> at, na;
    const char* names[] = {"x", "y", "v", "u", "t", "s", "r", "q"};
    for (int i = 0; i < n_atomic; ++i) at.emplace_back(names[i]);
    for (int i = 0; i < n_non_atomic; ++i) na.push_back("a" + std::to_string(i));
    return AggregateSpace(at, na);
}

inline std::vector<double> random_simplex(Rng& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double s = 0;
    for (auto& v : w) s += (v = e(rng));
    for (auto& v : w) v /= s;
    return w;
}

inline LinearOrder random_order(Rng& rng, int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    std::iota(r.begin(), r.end(), 0);
    std::shuffle(r.begin(), r.end(), rng);
    return LinearOrder(r);
}

inline PreferenceDistribution random_preference(Rng& rng, std::vector<std::string> ground, int support) {
    auto w = random_simplex(rng, static_cast<std::size_t>(support));
    std::vector<std::pair<LinearOrder, double>> pairs;
    for (int i = 0; i < support; ++i)
        pairs.emplace_back(random_order(rng, static_cast<int>(ground.size())), w[static_cast<std::size_t>(i)]);
    return PreferenceDistribution(std::move(ground), std::move(pairs));
}

// Correspondence with k underlying alternatives per non-atomic aggregate.
inline AggregationCorrespondence random_correspondence(const AggregateSpace& space, Rng& rng, int lo = 2, int hi = 3) {
    std::uniform_int_distribution<int> size(lo, hi);
    std::vector<std::vector<std::string>> sets;
    for (int a = space.atomic_count(); a < space.size(); ++a) {
        std::vector<std::string> s;
        int k = size(rng);
        for (int j = 0; j < k; ++j) s.push_back(space.id(a) + "_" + std::to_string(j));
        sets.push_back(s);
    }
    return AggregationCorrespondence::with_atomic_identity(space, sets);
}

inline CompositionTuple random_tuple(Rng& rng, const AggregationCorrespondence& X, Menu m) {
    CompositionTuple t;
    for (int a : m.members()) {
        if (X.space().is_atomic(a)) continue;
        std::uniform_int_distribution<XMask> pick(1, X.full_part(a));
        t.parts.emplace_back(a, pick(rng));
    }
    return t;
}

inline MenuComposition random_menu_composition(Rng& rng, const AggregationCorrespondence& X, Menu m, int max_tuples) {
    std::uniform_int_distribution<int> count(1, max_tuples);
    int k = count(rng);
    auto w = random_simplex(rng, static_cast<std::size_t>(k));
    MenuComposition comp;
    for (int i = 0; i < k; ++i) comp[random_tuple(rng, X, m)] += w[static_cast<std::size_t>(i)];
    return comp;
}

inline CompositionDistribution random_composition(Rng& rng, const AggregationCorrespondence& X,
                                                  const ChoiceDomain& dom, int max_tuples = 3) {
    CompositionDistribution lam;
    for (Menu m : dom.menus())
        if (m.bits & X.space().non_atomic_mask()) lam.set(m, random_menu_composition(rng, X, m, max_tuples));
    return lam;
}

inline MenuCollectionFamily random_family(Rng& rng, const AggregateSpace& space, const ChoiceDomain& dom) {
    MenuCollectionFamily fam;
    std::bernoulli_distribution coin(0.5);
    for (Menu m : dom.menus()) {
        std::vector<int> na;
        for (int a : m.members())
            if (!space.is_atomic(a)) na.push_back(a);
        if (na.empty() || !coin(rng)) continue;
        std::uniform_int_distribution<std::size_t> pick(0, na.size() - 1);
        fam.assign(na[pick(rng)], m);
    }
    return fam;
}

inline StochasticChoice mix(const std::vector<StochasticChoice>& parts, const std::vector<double>& w) {
    StochasticChoice out;
    for (const auto& [m, p0] : parts.front().table()) {
        std::vector<double> acc(p0.size(), 0.0);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto& p = parts[i].at(m);
            for (std::size_t j = 0; j < p.size(); ++j) acc[j] += w[i] * p[j];
        }
        out.set(m, acc);
    }
    return out;
}

inline StochasticChoice random_vertex_mixture(Rng& rng, const AggregateSpace& space, const ChoiceDomain& dom,
                                              int count) {
    std::vector<StochasticChoice> vs;
    for (int i = 0; i < count; ++i)
        vs.push_back(vertex_choice(space, random_order(rng, space.size()), random_family(rng, space, dom), dom));
    return mix(vs, random_simplex(rng, static_cast<std::size_t>(count)));
}

// Literal rationalization formula: a wins iff some x in S_a beats every y in the other parts.
inline StochasticChoice forward_oracle(const PreferenceDistribution& mu, const AggregationCorrespondence& X,
                                       const CompositionDistribution& lam, const ChoiceDomain& dom) {
    const auto& space = X.space();
    StochasticChoice rho;
    for (Menu m : dom.menus()) {
        MenuComposition trivial{{CompositionTuple{}, 1.0}};
        const MenuComposition& comp = (m.bits & space.non_atomic_mask()) ? *lam.find(m) : trivial;
        std::vector<double> probs(static_cast<std::size_t>(m.size()), 0.0);
        for (const auto& [t, wt] : comp) {
            std::vector<std::vector<std::string>> sets;
            for (int a : m.members()) {
                std::vector<std::string> s;
                const auto& ms = X.members(a);
                XMask part = space.is_atomic(a) ? 1 : t.part(a);
                for (std::size_t j = 0; j < ms.size(); ++j)
                    if ((part >> j) & 1u) s.push_back(X.underlying()[static_cast<std::size_t>(ms[j])]);
                sets.push_back(s);
            }
            for (const auto& [order, w] : mu.support()) {
                auto rank_of = [&](const std::string& id) { return order.rank(mu.index(id)); };
                for (std::size_t i = 0; i < sets.size(); ++i) {
                    bool wins = std::any_of(sets[i].begin(), sets[i].end(), [&](const std::string& x) {
                        for (std::size_t k = 0; k < sets.size(); ++k) {
                            if (k == i) continue;
                            for (const auto& y : sets[k])
                                if (rank_of(x) > rank_of(y)) return false;
                        }
                        return true;
                    });
                    if (wins) probs[i] += wt * w;
                }
            }
        }
        rho.set(m, probs);
    }
    return rho;
}

}  // namespace testkit
