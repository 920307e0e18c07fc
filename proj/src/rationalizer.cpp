#include "aggrum/rationalizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "aggrum/model.hpp"

namespace aggrum {

namespace {

constexpr double kZeroMass = 1e-13;
constexpr double kRatioSlack = 2e-9;

XMask bit(int pos) { return XMask{1} << pos; }

}  // namespace

const char* variant_name(Variant v) noexcept {
    return v == Variant::Multi ? "multi" : "outside_option";
}

Extension extend_preferences(const PreferenceDistribution& mu_tilde, const AggregateSpace& space, Variant variant) {
    if (mu_tilde.support().empty()) throw Error(Errc::EmptySupport, "certificate has no support");
    const int m = space.atomic_count();
    if (variant == Variant::OutsideOption && space.non_atomic_count() != 1)
        throw Error(Errc::VariantUnavailable, "outside-option layout needs exactly one non-atomic aggregate");
    if (static_cast<int>(mu_tilde.ground().size()) != m)
        throw Error(Errc::GroundMismatch, "certificate must rank the atomic aggregates");
    std::vector<int> atomic_of;
    for (const auto& id : mu_tilde.ground()) {
        auto a = space.find(id);
        if (!a || !space.is_atomic(*a)) throw Error(Errc::GroundMismatch, "certificate ranks a non-atomic id " + id);
        atomic_of.push_back(*a);
    }

    std::vector<std::vector<std::string>> sets;
    std::vector<SpecialAlternatives> specials;
    for (int a = 0; a < space.size(); ++a) {
        if (space.is_atomic(a)) {
            sets.push_back({space.id(a)});
            continue;
        }
        SpecialAlternatives sp;
        sp.aggregate = a;
        std::vector<std::string> xs;
        for (int y = 0; y < m; ++y) {
            sp.above.push_back(static_cast<int>(xs.size()));
            xs.push_back(space.id(a) + "::" + space.id(y));
        }
        if (variant == Variant::Multi) {
            sp.top = static_cast<int>(xs.size());
            xs.push_back(space.id(a) + "::hi");
        }
        sp.bottom = static_cast<int>(xs.size());
        xs.push_back(space.id(a) + "::lo");
        for (const auto& x : xs)
            if (space.find(x)) throw Error(Errc::InvalidInput, "synthetic id " + x + " collides with an aggregate id");
        sets.push_back(std::move(xs));
        specials.push_back(std::move(sp));
    }
    AggregationCorrespondence X(space, std::move(sets));

    std::vector<std::pair<LinearOrder, double>> weighted;
    for (const auto& [order, w] : mu_tilde.support()) {
        std::vector<int> ranking;
        for (int pos : order.ranking()) {
            int y = atomic_of[static_cast<std::size_t>(pos)];
            for (const auto& sp : specials)
                ranking.push_back(X.members(sp.aggregate)[static_cast<std::size_t>(sp.above[static_cast<std::size_t>(y)])]);
            ranking.push_back(X.members(y)[0]);
        }
        for (const auto& sp : specials)
            if (sp.top >= 0) ranking.push_back(X.members(sp.aggregate)[static_cast<std::size_t>(sp.top)]);
        for (const auto& sp : specials)
            ranking.push_back(X.members(sp.aggregate)[static_cast<std::size_t>(sp.bottom)]);
        weighted.emplace_back(LinearOrder(std::move(ranking)), w);
    }
    PreferenceDistribution mu_x(X.underlying(), std::move(weighted));
    return {std::move(X), std::move(mu_x), std::move(specials)};
}

MenuComposition build_lambda_for_menu(const StochasticChoice& rho, Menu D, Menu E, const Extension& ext,
                                      LambdaTrace* trace) {
    const auto& space = ext.X.space();
    if (E.empty() || (E.bits & space.atomic_mask()) || (D.bits & ~space.atomic_mask()))
        throw Error(Errc::InvalidInput, "menu split must be atomic D and nonempty non-atomic E");
    const Menu full{D.bits | E.bits};
    auto special_of = [&](int a) -> const SpecialAlternatives& {
        for (const auto& sp : ext.specials)
            if (sp.aggregate == a) return sp;
        throw Error(Errc::InvalidInput, "no special alternatives for " + space.id(a));
    };
    auto bottom_tuple = [&]() {
        CompositionTuple t;
        for (int b : E.members()) t.parts.emplace_back(b, bit(special_of(b).bottom));
        return t;
    };
    // a takes all of X(a); the others sit at the bottom.
    auto absorbing_tuple = [&](int a) {
        CompositionTuple t;
        for (int b : E.members())
            t.parts.emplace_back(b, b == a ? ext.X.full_part(b) : bit(special_of(b).bottom));
        return t;
    };

    MenuComposition lam;
    if (full.size() == 1) {
        lam[bottom_tuple()] = 1.0;
        return lam;
    }
    const auto& shares = rho.at(full);
    double agg_mass = 0.0;
    for (int a : E.members()) agg_mass += shares[static_cast<std::size_t>(full.slot(a))];

    if (D.empty()) {
        for (int a : E.members()) {
            double w = shares[static_cast<std::size_t>(full.slot(a))];
            if (w > 0) lam[absorbing_tuple(a)] += w;
        }
        return lam;
    }
    if (agg_mass <= kZeroMass) {
        lam[bottom_tuple()] = 1.0;
        return lam;
    }

    // Ratios rho(D u E, y) / rho(D, y) with rho(D, .) taken from the extension itself.
    std::vector<int> ys = D.members();
    std::vector<double> ratio(static_cast<std::size_t>(space.size()), 0.0);
    XMask d_set = 0;
    for (int y : ys) d_set |= bit(ext.mu_x.index(space.id(y)));
    for (int y : ys) {
        double base = rum_prob(ext.mu_x, d_set, ext.mu_x.index(space.id(y)));
        double num = shares[static_cast<std::size_t>(full.slot(y))];
        if (num > base + kRatioSlack)
            throw Error(Errc::AxiomViolated, "limited monotonicity fails for " + space.id(y) + " on " +
                                                 menu_label(space, full));
        ratio[static_cast<std::size_t>(y)] = base > 0 ? std::min(1.0, num / base) : 0.0;
    }
    std::stable_sort(ys.begin(), ys.end(), [&](int p, int q) {
        return ratio[static_cast<std::size_t>(p)] > ratio[static_cast<std::size_t>(q)];
    });
    std::vector<double> r;
    for (int y : ys) r.push_back(ratio[static_cast<std::size_t>(y)]);
    const std::size_t d = ys.size();
    if (trace) {
        trace->y_order = ys;
        trace->ratios = r;
    }

    for (int a : E.members()) {
        const double share = shares[static_cast<std::size_t>(full.slot(a))];
        if (share <= 0) continue;
        const double weight = share / agg_mass;
        const auto& sp = special_of(a);
        const int base_pos = sp.top >= 0 ? sp.top : sp.bottom;

        // lambda^a_n: the residual on the absorbing tuple, then a chain of nested parts. After step n the
        // part holding x_a(y_i) for j < i <= n carries r_j - r_{j+1}, and the bare base part carries r_n.
        auto step = [&](std::size_t n) {
            MenuComposition out;
            if (1.0 - r[0] > 0) out[absorbing_tuple(a)] += 1.0 - r[0];
            for (std::size_t j = 0; j <= n; ++j) {
                double mass = (j < n ? r[j] - r[j + 1] : r[n]);
                if (mass <= 0) continue;
                XMask part = bit(base_pos);
                for (std::size_t i = j + 1; i <= n; ++i)
                    part |= bit(sp.above[static_cast<std::size_t>(ys[i])]);
                CompositionTuple t;
                for (int b : E.members()) t.parts.emplace_back(b, b == a ? part : bit(special_of(b).bottom));
                out[t] += mass;
            }
            return out;
        };
        if (trace) {
            trace->aggregates.push_back(a);
            trace->steps.emplace_back();
            for (std::size_t n = 0; n < d; ++n) trace->steps.back().push_back(step(n));
        }
        for (const auto& [t, p] : step(d - 1)) lam[t] += weight * p;
    }
    return lam;
}

Rationalization rationalize(const StochasticChoice& rho, const AggregateSpace& space, Variant variant) {
    if (variant == Variant::OutsideOption && space.non_atomic_count() != 1)
        throw Error(Errc::VariantUnavailable, "outside-option variant needs exactly one non-atomic aggregate");
    AxiomReport report = check_ru_rational(rho, space);
    if (!report.passed) throw AxiomViolatedError("input is not RU-rational", report);
    AxiomReport partial = check_partial_ru(rho, space, PartialRuMethod::Lp);
    if (!partial.passed || !partial.certificate)
        throw AxiomViolatedError("no partial RU certificate", partial);

    Extension ext = extend_preferences(*partial.certificate, space, variant);
    CompositionDistribution lam;
    for (const auto& [m, p] : rho.table()) {
        Menu E{m.bits & space.non_atomic_mask()};
        if (E.empty()) continue;
        lam.set(m, build_lambda_for_menu(rho, Menu{m.bits & space.atomic_mask()}, E, ext));
    }
    Rationalization out{ext.mu_x, ext.X, std::move(lam), variant, ext.specials, 0.0};
    auto check = forward_evaluate(out.mu_x, out.X, out.lam, rho.domain());
    out.residual = max_abs_diff(check, rho);
    if (!(out.residual <= 1e-9))
        throw std::logic_error("rationalization failed verification, residual " + std::to_string(out.residual));
    return out;
}

}  // namespace aggrum
