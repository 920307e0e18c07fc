#include "aggrum/axioms.hpp"

#include <algorithm>
#include <cmath>

#include "aggrum/lp.hpp"

namespace aggrum {

const char* violation_name(ViolationKind k) noexcept {
    switch (k) {
    case ViolationKind::LimitedMonotonicity: return "limited_monotonicity";
    case ViolationKind::BlockMarschak: return "block_marschak";
    case ViolationKind::PartialRuInfeasible: return "partial_ru_infeasible";
    case ViolationKind::AruInfeasible: return "aru_infeasible";
    }
    return "unknown";
}

void AxiomReport::absorb(const AxiomReport& other) {
    for (const auto& v : other.violations) add(v);
    if (!other.farkas.empty()) farkas = other.farkas;
    if (other.certificate) certificate = other.certificate;
}

AxiomReport check_limited_monotonicity(const StochasticChoice& rho, const AggregateSpace& space) {
    AxiomReport rep;
    rep.method = "limited_monotonicity";
    for (const auto& [m, probs] : rho.table()) {
        Menu d{m.bits & space.atomic_mask()};
        if (d.empty() || d == m) continue;
        if (!rho.has(d))
            throw Error(Errc::DomainClosureViolated,
                        menu_label(space, m) + " present but " + menu_label(space, d) + " missing");
        for (int b : d.members()) {
            double lhs = rho.prob(d, b), rhs = rho.prob(m, b);
            if (lhs < rhs - kMonotonicityTol) rep.add({ViolationKind::LimitedMonotonicity, d, m, b, lhs, rhs, lhs - rhs});
        }
    }
    std::stable_sort(rep.violations.begin(), rep.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.menu < b.menu; });
    return rep;
}

double bm_polynomial(const StochasticChoice& rho, const AggregateSpace& space, Menu D, int x) {
    const Mask atoms = space.atomic_mask();
    if (D.empty() || (D.bits & ~atoms) != 0) throw Error(Errc::InvalidInput, "BM menu must be atomic");
    if (!D.contains(x)) throw Error(Errc::ItemNotInMenu, "BM item outside menu");
    const Mask rest = atoms & ~D.bits;
    // Accumulate by |E \ D| to limit cancellation.
    std::vector<double> by_size(static_cast<std::size_t>(std::popcount(rest)) + 1, 0.0);
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
        Menu e{D.bits | sub};
        if (!rho.has(e)) throw Error(Errc::IncompleteDomain, "BM needs " + menu_label(space, e));
        by_size[static_cast<std::size_t>(std::popcount(sub))] += rho.prob(e, x);
        if (sub == 0) break;
    }
    double q = 0.0;
    for (std::size_t k = 0; k < by_size.size(); ++k) q += (k % 2 == 0 ? 1.0 : -1.0) * by_size[k];
    return q;
}

bool has_full_atomic_domain(const StochasticChoice& rho, const AggregateSpace& space) {
    for (Mask b = 1; b <= space.atomic_mask(); ++b)
        if (!rho.has(Menu{b})) return false;
    return true;
}

AxiomReport rum_feasibility(const StochasticChoice& rho, const AggregateSpace& space,
                            const std::vector<Menu>& menus, const std::vector<int>& ground, ViolationKind kind) {
    const int n = static_cast<int>(ground.size());
    if (n > kMaxEnumeratedGround) throw Error(Errc::DomainTooLarge, "too many alternatives to enumerate orders");
    std::vector<int> pos_of(static_cast<std::size_t>(space.size()), -1);
    for (int p = 0; p < n; ++p) pos_of[static_cast<std::size_t>(ground[static_cast<std::size_t>(p)])] = p;

    // Rows: one per (menu, member) cell; singleton menus hold trivially and are skipped.
    std::vector<Menu> rows_menus;
    std::vector<int> row_offset;
    int rows = 0;
    for (Menu m : menus) {
        if (m.size() < 2) continue;
        rows_menus.push_back(m);
        row_offset.push_back(rows);
        rows += m.size();
    }
    lp::LinearSystem sys(rows + 1);
    for (std::size_t i = 0; i < rows_menus.size(); ++i)
        for (int a : rows_menus[i].members())
            sys.set_rhs(row_offset[i] + rows_menus[i].slot(a), rho.prob(rows_menus[i], a));
    sys.set_rhs(rows, 1.0);

    std::vector<XMask> menu_pos;
    for (Menu m : rows_menus) {
        XMask s = 0;
        for (int a : m.members()) s |= XMask{1} << pos_of[static_cast<std::size_t>(a)];
        menu_pos.push_back(s);
    }
    auto orders = all_orders(n);
    std::vector<std::pair<int, double>> col;
    for (const auto& o : orders) {
        col.clear();
        for (std::size_t i = 0; i < rows_menus.size(); ++i) {
            int winner = ground[static_cast<std::size_t>(o.best(menu_pos[i]))];
            col.emplace_back(row_offset[i] + rows_menus[i].slot(winner), 1.0);
        }
        col.emplace_back(rows, 1.0);
        sys.add_column(col);
    }
    auto res = lp::solve_feasibility(sys, kLpTol);

    AxiomReport rep;
    rep.method = "lp";
    std::vector<std::string> ids;
    for (int a : ground) ids.push_back(space.id(a));
    if (res.feasible) {
        std::vector<std::pair<LinearOrder, double>> w;
        double total = 0;
        for (std::size_t j = 0; j < orders.size(); ++j)
            if (res.x[j] > 0) total += res.x[j];
        for (std::size_t j = 0; j < orders.size(); ++j)
            if (res.x[j] > 0) w.emplace_back(orders[j], res.x[j] / total);
        rep.certificate = PreferenceDistribution(ids, std::move(w));
    } else {
        rep.add({kind, Menu{}, Menu{}, -1, -res.phase_one, 0.0, -res.phase_one});
        rep.farkas = res.farkas;
    }
    return rep;
}

AxiomReport check_partial_ru(const StochasticChoice& rho, const AggregateSpace& space, PartialRuMethod method) {
    const bool full = has_full_atomic_domain(rho, space);
    if (method == PartialRuMethod::Auto) method = full ? PartialRuMethod::Bm : PartialRuMethod::Lp;

    if (method == PartialRuMethod::Bm) {
        if (!full) throw Error(Errc::IncompleteDomain, "Block-Marschak route needs every atomic menu");
        AxiomReport rep;
        rep.method = "bm";
        for (Mask b = 1; b <= space.atomic_mask(); ++b) {
            Menu d{b};
            for (int x : d.members()) {
                double q = bm_polynomial(rho, space, d, x);
                if (q < -kBlockMarschakTol) rep.add({ViolationKind::BlockMarschak, d, Menu{}, x, q, 0.0, q});
            }
        }
        std::stable_sort(rep.violations.begin(), rep.violations.end(),
                         [](const Violation& a, const Violation& b) { return a.menu < b.menu; });
        return rep;
    }

    if (space.atomic_count() > kMaxLpAtomic) throw Error(Errc::DomainTooLarge, "LP route supports at most 7 atomic aggregates");
    std::vector<Menu> menus;
    for (const auto& [m, p] : rho.table())
        if ((m.bits & ~space.atomic_mask()) == 0) menus.push_back(m);
    std::vector<int> ground;
    for (int a = 0; a < space.atomic_count(); ++a) ground.push_back(a);
    return rum_feasibility(rho, space, menus, ground, ViolationKind::PartialRuInfeasible);
}

AxiomReport check_ru_rational(const StochasticChoice& rho, const AggregateSpace& space, PartialRuMethod method) {
    AxiomReport rep = check_limited_monotonicity(rho, space);
    AxiomReport partial = check_partial_ru(rho, space, method);
    rep.absorb(partial);
    rep.method = "limited_monotonicity+" + partial.method;
    return rep;
}

AxiomReport check_aru_rational(const StochasticChoice& rho, const AggregateSpace& space) {
    if (space.size() > kMaxEnumeratedGround) throw Error(Errc::DomainTooLarge, "ARU check supports at most 8 aggregates");
    std::vector<Menu> menus;
    for (const auto& [m, p] : rho.table()) menus.push_back(m);
    std::vector<int> ground;
    for (int a = 0; a < space.size(); ++a) ground.push_back(a);
    return rum_feasibility(rho, space, menus, ground, ViolationKind::AruInfeasible);
}

}  // namespace aggrum
