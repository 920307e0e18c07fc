#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aggrum/axioms.hpp"
#include "aggrum/conditions.hpp"
#include "aggrum/geometry.hpp"
#include "aggrum/rationalizer.hpp"
#include "support.hpp"

using namespace aggrum;
using testkit::Rng;

namespace {

Menu M(const AggregateSpace& sp, std::initializer_list<const char*> l) {
    std::vector<std::string> v(l.begin(), l.end());
    return menu_of(sp, v);
}

PreferenceDistribution order_of(std::vector<std::string> ground, std::vector<std::string> ranked) {
    std::vector<int> r;
    for (const auto& id : ranked) r.push_back(static_cast<int>(std::find(ground.begin(), ground.end(), id) - ground.begin()));
    return PreferenceDistribution::degenerate(std::move(ground), LinearOrder(r));
}

// Joint over every non-atomic aggregate, then each menu's lambda is its marginal.
std::pair<MenuComposition, CompositionDistribution> independent_lambda(Rng& rng, const AggregationCorrespondence& X,
                                                                       const ChoiceDomain& dom, int tuples) {
    const auto& sp = X.space();
    Menu all{sp.all_mask()};
    auto joint = testkit::random_menu_composition(rng, X, all, tuples);
    CompositionDistribution lam;
    for (Menu m : dom.menus()) {
        if (!(m.bits & sp.non_atomic_mask())) continue;
        MenuComposition c;
        for (const auto& [t, p] : joint) {
            CompositionTuple r;
            for (const auto& [a, s] : t.parts)
                if (m.contains(a)) r.parts.emplace_back(a, s);
            c[r] += p;
        }
        lam.set(m, c);
    }
    return {joint, lam};
}

}  // namespace

TEST_CASE("non-overlap examples") {
    AggregateSpace sp({"x"}, {"a0"});
    AggregationCorrespondence X(sp, {{"x"}, {"z", "w"}});
    std::vector<std::string> g{"x", "z", "w"};
    CHECK(is_non_overlapping(order_of(g, {"z", "w", "x"}), X).holds);
    auto bad = is_non_overlapping(order_of(g, {"z", "x", "w"}), X);
    REQUIRE_FALSE(bad.holds);
    REQUIRE(bad.overlaps.size() == 1);
    CHECK(bad.overlaps[0].aggregate == 1);
    CHECK(bad.overlaps[0].sandwiched == "x");
    CHECK_THROWS_AS(is_non_overlapping(PreferenceDistribution::uniform({"x", "z"}), X), Error);

    AggregateSpace two({"x", "y"}, {"a0"});
    auto ext = extend_preferences(PreferenceDistribution::uniform({"x", "y"}), two);
    CHECK_FALSE(is_non_overlapping(ext.mu_x, ext.X).holds);
}

TEST_CASE("lift examples") {
    AggregateSpace sp({"x"}, {"a0"});
    AggregationCorrespondence X(sp, {{"x"}, {"z", "w"}});
    auto lifted = lift_aru_to_nonoverlapping(order_of({"x", "a0"}, {"x", "a0"}), X);
    REQUIRE(lifted.support().size() == 1);
    CHECK(lifted.support()[0].first.ranking() == std::vector<int>{0, 1, 2});

    auto uni = lift_aru_to_nonoverlapping(PreferenceDistribution::uniform({"x", "a0"}), X);
    REQUIRE(uni.support().size() == 2);
    for (const auto& [o, w] : uni.support()) CHECK(w == doctest::Approx(0.5));
}

TEST_CASE("lifted preferences make every composition irrelevant") {
    Rng rng(51);
    for (int s = 0; s < 50; ++s) {
        auto sp = testkit::make_space(1 + s % 3, 1 + s % 2);
        auto dom = ChoiceDomain::full(sp);
        auto X = testkit::random_correspondence(sp, rng);
        auto mu_a = testkit::random_preference(rng, sp.ids(), 1 + s % 5);
        auto lifted = lift_aru_to_nonoverlapping(mu_a, X);
        CHECK(is_non_overlapping(lifted, X).holds);
        auto target = aru_evaluate(mu_a, sp, dom);
        auto f1 = forward_evaluate(lifted, X, testkit::random_composition(rng, X, dom), dom);
        auto f2 = forward_evaluate(lifted, X, testkit::random_composition(rng, X, dom), dom);
        CHECK(max_abs_diff(f1, target) <= 1e-12);
        CHECK(max_abs_diff(f1, f2) <= 1e-12);
        CHECK(check_aru_rational(f1, sp).passed);
    }
}

TEST_CASE("menu independence, single aggregate") {
    AggregateSpace sp({"x", "y"}, {"a0"});
    AggregationCorrespondence X(sp, {{"x"}, {"y"}, {"z", "w"}});
    auto dom = ChoiceDomain::full(sp);
    MenuComposition c{{CompositionTuple{{{2, 1}}}, 0.3}, {CompositionTuple{{{2, 3}}}, 0.7}};
    CompositionDistribution lam;
    for (Menu m : dom.menus())
        if (m.contains(2)) lam.set(m, c);
    CHECK(is_menu_independent(lam, X, dom).holds);

    lam.set(M(sp, {"x", "a0"}), {{CompositionTuple{{{2, 1}}}, 0.5}, {CompositionTuple{{{2, 3}}}, 0.5}});
    auto rep = is_menu_independent(lam, X, dom);
    REQUIRE_FALSE(rep.holds);
    CHECK(rep.mismatches[0].menu == M(sp, {"x", "a0"}));
    CHECK(rep.mismatches[0].gap == doctest::Approx(0.2));
    CHECK_THROWS_AS(collapse_to_aru(PreferenceDistribution::uniform(X.underlying()), X, lam), Error);
}

TEST_CASE("menu independence allows correlation across aggregates") {
    AggregateSpace sp({"x"}, {"a0", "a1"});
    AggregationCorrespondence X(sp, {{"x"}, {"p", "q"}, {"r", "s"}});
    MenuComposition joint{{CompositionTuple{{{1, 1}, {2, 1}}}, 0.5}, {CompositionTuple{{{1, 2}, {2, 2}}}, 0.5}};
    auto dom = ChoiceDomain::full(sp);
    CompositionDistribution lam;
    for (Menu m : dom.menus()) {
        if (!(m.bits & sp.non_atomic_mask())) continue;
        MenuComposition c;
        for (const auto& [t, p] : joint) {
            CompositionTuple r;
            for (const auto& [a, s] : t.parts)
                if (m.contains(a)) r.parts.emplace_back(a, s);
            c[r] += p;
        }
        lam.set(m, c);
    }
    CHECK(is_menu_independent(lam, X, dom).holds);

    // Without a menu holding both aggregates the joint comes from the LP over 9 atoms.
    auto partial = ChoiceDomain::custom({M(sp, {"x", "a0"}), M(sp, {"x", "a1"}), M(sp, {"a0"})});
    auto rep = is_menu_independent(lam, X, partial);
    REQUIRE(rep.holds);
    REQUIRE(rep.joint.has_value());
    double total = 0;
    for (const auto& [t, p] : *rep.joint) total += p;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("pairwise-consistent but jointly impossible compositions fail the LP") {
    AggregateSpace sp({"x"}, {"a0", "a1", "a2"});
    AggregationCorrespondence X(sp, {{"x"}, {"p0", "q0"}, {"p1", "q1"}, {"p2", "q2"}});
    CompositionDistribution lam;
    // Every pair disagrees on which of its two alternatives is present: impossible for three aggregates.
    auto pair = [&](int a, int b) {
        Menu m{(Mask{1} << a) | (Mask{1} << b)};
        lam.set(m, {{CompositionTuple{{{a, 1}, {b, 2}}}, 0.5}, {CompositionTuple{{{a, 2}, {b, 1}}}, 0.5}});
        return m;
    };
    auto dom = ChoiceDomain::custom({pair(1, 2), pair(2, 3), pair(1, 3)});
    auto rep = is_menu_independent(lam, X, dom);
    CHECK_FALSE(rep.holds);
    CHECK_FALSE(rep.joint.has_value());

    CompositionDistribution ok;
    auto agree = [&](int a, int b) {
        Menu m{(Mask{1} << a) | (Mask{1} << b)};
        ok.set(m, {{CompositionTuple{{{a, 1}, {b, 1}}}, 0.5}, {CompositionTuple{{{a, 2}, {b, 2}}}, 0.5}});
        return m;
    };
    CHECK(is_menu_independent(ok, X, ChoiceDomain::custom({agree(1, 2), agree(2, 3), agree(1, 3)})).holds);
}

TEST_CASE("collapse examples") {
    AggregateSpace sp({"x"}, {"a0"});
    AggregationCorrespondence X(sp, {{"x"}, {"z", "w"}});
    auto mu = order_of({"x", "z", "w"}, {"z", "x", "w"});
    CompositionDistribution both;
    both.set(M(sp, {"x", "a0"}), {{CompositionTuple{{{1, 3}}}, 1.0}});
    auto c1 = collapse_to_aru(mu, X, both);
    REQUIRE(c1.support().size() == 1);
    CHECK(c1.support()[0].first.ranking() == std::vector<int>{1, 0});

    CompositionDistribution split;
    split.set(M(sp, {"x", "a0"}), {{CompositionTuple{{{1, 1}}}, 0.5}, {CompositionTuple{{{1, 2}}}, 0.5}});
    auto c2 = collapse_to_aru(mu, X, split);
    REQUIRE(c2.support().size() == 2);
    for (const auto& [o, w] : c2.support()) CHECK(w == doctest::Approx(0.5));

    // Non-overlapping preferences collapse to their block projection.
    auto block = lift_aru_to_nonoverlapping(order_of({"x", "a0"}, {"a0", "x"}), X);
    auto c3 = collapse_to_aru(block, X, split);
    REQUIRE(c3.support().size() == 1);
    CHECK(c3.support()[0].first.ranking() == std::vector<int>{1, 0});
}

TEST_CASE("menu-independent compositions collapse to an ARU representation") {
    Rng rng(52);
    for (int s = 0; s < 50; ++s) {
        auto sp = testkit::make_space(1 + s % 3, 1 + s % 2);
        auto dom = ChoiceDomain::full(sp);
        auto X = testkit::random_correspondence(sp, rng);
        auto mu = testkit::random_preference(rng, X.underlying(), 1 + s % 5);
        auto [joint, lam] = independent_lambda(rng, X, dom, 3);
        CHECK(is_menu_independent(lam, X, dom).holds);
        auto rho = forward_evaluate(mu, X, lam, dom);
        auto mu_a = collapse_to_aru(mu, X, lam);
        CHECK(max_abs_diff(aru_evaluate(mu_a, sp, dom), rho) <= 1e-9);
        CHECK(aru_distance(rho, sp).squared_distance <= 1e-8);
    }
}

TEST_CASE("random menu-dependent compositions are usually flagged") {
    Rng rng(53);
    int flagged = 0;
    for (int s = 0; s < 20; ++s) {
        auto sp = testkit::make_space(2, 1);
        auto dom = ChoiceDomain::full(sp);
        auto X = testkit::random_correspondence(sp, rng);
        flagged += !is_menu_independent(testkit::random_composition(rng, X, dom), X, dom).holds;
    }
    CHECK(flagged == 20);
}
