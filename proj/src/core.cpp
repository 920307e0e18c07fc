#include "aggrum/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace aggrum {

const char* errc_name(Errc c) noexcept {
    switch (c) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::ItemNotInMenu: return "ItemNotInMenu";
    case Errc::GroundMismatch: return "GroundMismatch";
    case Errc::MissingLambdaForMenu: return "MissingLambdaForMenu";
    case Errc::InvalidTuple: return "InvalidTuple";
    case Errc::AggregateNotInMenu: return "AggregateNotInMenu";
    case Errc::DomainClosureViolated: return "DomainClosureViolated";
    case Errc::IncompleteDomain: return "IncompleteDomain";
    case Errc::DomainTooLarge: return "DomainTooLarge";
    case Errc::AxiomViolated: return "AxiomViolated";
    case Errc::VariantUnavailable: return "VariantUnavailable";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::NotRURational: return "NotRURational";
    case Errc::TooLarge: return "TooLarge";
    case Errc::NotMenuIndependent: return "NotMenuIndependent";
    case Errc::MissingUtility: return "MissingUtility";
    case Errc::NotIdentified: return "NotIdentified";
    case Errc::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

namespace {

// Validates a probability vector in place; renormalizes only beyond rounding noise so that repeated
// construction from the same values is idempotent.
void normalize_probs(std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double& v : p) {
        if (!std::isfinite(v) || v < -kInputTol)
            throw Error(Errc::InvalidInput, std::string(what) + ": negative or non-finite probability");
        if (v < 0.0) v = 0.0;
        sum += v;
    }
    if (std::abs(sum - 1.0) > kInputTol)
        throw Error(Errc::InvalidInput, std::string(what) + ": probabilities sum to " + std::to_string(sum));
    if (std::abs(sum - 1.0) > 1e-14)
        for (double& v : p) v /= sum;
}

}  // namespace

AggregateSpace::AggregateSpace(std::vector<std::string> atomic, std::vector<std::string> non_atomic)
    : n_atomic_(static_cast<int>(atomic.size())) {
    ids_ = std::move(atomic);
    ids_.insert(ids_.end(), non_atomic.begin(), non_atomic.end());
    if (ids_.empty()) throw Error(Errc::InvalidInput, "aggregate space is empty");
    if (size() > kMaxAggregates) throw Error(Errc::DomainTooLarge, "too many aggregates");
    std::set<std::string> seen;
    for (const auto& id : ids_) {
        if (id.empty()) throw Error(Errc::InvalidInput, "empty aggregate id");
        if (!seen.insert(id).second) throw Error(Errc::InvalidInput, "duplicate aggregate id " + id);
    }
}

std::vector<std::string> AggregateSpace::atomic_ids() const {
    return {ids_.begin(), ids_.begin() + n_atomic_};
}

std::vector<std::string> AggregateSpace::non_atomic_ids() const {
    return {ids_.begin() + n_atomic_, ids_.end()};
}

std::optional<int> AggregateSpace::find(std::string_view id) const {
    for (int i = 0; i < size(); ++i)
        if (ids_[static_cast<std::size_t>(i)] == id) return i;
    return std::nullopt;
}

int AggregateSpace::index(std::string_view id) const {
    auto i = find(id);
    if (!i) throw Error(Errc::InvalidInput, "unknown aggregate " + std::string(id));
    return *i;
}

std::vector<int> Menu::members() const {
    std::vector<int> out;
    for (Mask b = bits; b; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
}

std::strong_ordering operator<=>(Menu x, Menu y) {
    Mask d = x.bits ^ y.bits;
    if (d == 0) return std::strong_ordering::equal;
    int i = std::countr_zero(d);
    Mask above = ~((Mask{2} << i) - 1);
    // The menu holding i is smaller unless the other one has run out of members.
    if (x.contains(i)) return (y.bits & above) ? std::strong_ordering::less : std::strong_ordering::greater;
    return (x.bits & above) ? std::strong_ordering::greater : std::strong_ordering::less;
}

Menu menu_of(const AggregateSpace& space, std::span<const std::string> ids) {
    Menu m;
    for (const auto& id : ids) {
        int a = space.index(id);
        if (m.contains(a)) throw Error(Errc::InvalidInput, "duplicate menu member " + id);
        m.bits |= Mask{1} << a;
    }
    if (m.empty()) throw Error(Errc::InvalidInput, "empty menu");
    return m;
}

std::string menu_label(const AggregateSpace& space, Menu m) {
    std::string s = "{";
    bool first = true;
    for (int a : m.members()) {
        if (!first) s += ",";
        s += space.id(a);
        first = false;
    }
    return s + "}";
}

ChoiceDomain ChoiceDomain::full(const AggregateSpace& space) {
    ChoiceDomain d;
    d.kind_ = DomainKind::Full;
    for (Mask b = 1; b <= space.all_mask(); ++b) d.menus_.push_back(Menu{b});
    std::sort(d.menus_.begin(), d.menus_.end());
    return d;
}

ChoiceDomain ChoiceDomain::containing(const AggregateSpace& space, int agg) {
    ChoiceDomain d;
    d.kind_ = DomainKind::ContainingAggregate;
    for (Mask b = 1; b <= space.all_mask(); ++b) {
        Menu m{b};
        if (m.contains(agg) || (b & ~space.atomic_mask()) == 0) d.menus_.push_back(m);
    }
    std::sort(d.menus_.begin(), d.menus_.end());
    return d;
}

ChoiceDomain ChoiceDomain::custom(std::vector<Menu> menus) {
    ChoiceDomain d;
    std::sort(menus.begin(), menus.end());
    menus.erase(std::unique(menus.begin(), menus.end()), menus.end());
    for (Menu m : menus)
        if (m.empty()) throw Error(Errc::InvalidInput, "empty menu in domain");
    d.menus_ = std::move(menus);
    return d;
}

bool ChoiceDomain::contains(Menu m) const {
    return std::binary_search(menus_.begin(), menus_.end(), m);
}

void StochasticChoice::set(Menu m, std::vector<double> probs) {
    if (m.empty()) throw Error(Errc::InvalidInput, "empty menu");
    if (static_cast<int>(probs.size()) != m.size())
        throw Error(Errc::InvalidInput, "probability vector does not match menu size");
    normalize_probs(probs, "stochastic choice");
    table_[m] = std::move(probs);
}

const std::vector<double>& StochasticChoice::at(Menu m) const {
    auto it = table_.find(m);
    if (it == table_.end()) throw Error(Errc::IncompleteDomain, "menu missing from choice data");
    return it->second;
}

double StochasticChoice::prob(Menu m, int a) const {
    if (!m.contains(a)) return 0.0;
    return at(m)[static_cast<std::size_t>(m.slot(a))];
}

ChoiceDomain StochasticChoice::domain() const {
    std::vector<Menu> ms;
    ms.reserve(table_.size());
    for (const auto& [m, p] : table_) ms.push_back(m);
    return ChoiceDomain::custom(std::move(ms));
}

std::size_t StochasticChoice::cell_count() const {
    std::size_t n = 0;
    for (const auto& [m, p] : table_) n += p.size();
    return n;
}

double max_abs_diff(const StochasticChoice& a, const StochasticChoice& b) {
    if (a.table().size() != b.table().size()) return INFINITY;
    double worst = 0.0;
    for (const auto& [m, pa] : a.table()) {
        if (!b.has(m)) return INFINITY;
        const auto& pb = b.at(m);
        for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - pb[i]));
    }
    return worst;
}

LinearOrder::LinearOrder(std::vector<int> ranking) : ranking_(std::move(ranking)) {
    rank_.assign(ranking_.size(), -1);
    for (std::size_t pos = 0; pos < ranking_.size(); ++pos) {
        int x = ranking_[pos];
        if (x < 0 || static_cast<std::size_t>(x) >= ranking_.size() || rank_[static_cast<std::size_t>(x)] != -1)
            throw Error(Errc::InvalidInput, "ranking is not a permutation");
        rank_[static_cast<std::size_t>(x)] = static_cast<int>(pos);
    }
}

LinearOrder LinearOrder::identity(int n) {
    std::vector<int> r(static_cast<std::size_t>(n));
    std::iota(r.begin(), r.end(), 0);
    return LinearOrder(std::move(r));
}

int LinearOrder::best(XMask set) const {
    int top = -1;
    int top_rank = size();
    for (; set; set &= set - 1) {
        int x = std::countr_zero(set);
        if (rank_[static_cast<std::size_t>(x)] < top_rank) {
            top_rank = rank_[static_cast<std::size_t>(x)];
            top = x;
        }
    }
    return top;
}

std::vector<LinearOrder> all_orders(int n) {
    if (n > kMaxEnumeratedGround)
        throw Error(Errc::DomainTooLarge, "refusing to enumerate " + std::to_string(n) + "! orders");
    std::vector<int> r(static_cast<std::size_t>(n));
    std::iota(r.begin(), r.end(), 0);
    std::vector<LinearOrder> out;
    do {
        out.emplace_back(r);
    } while (std::next_permutation(r.begin(), r.end()));
    return out;
}

PreferenceDistribution::PreferenceDistribution(std::vector<std::string> ground,
                                               std::vector<std::pair<LinearOrder, double>> weights)
    : ground_(std::move(ground)) {
    std::set<std::string> seen(ground_.begin(), ground_.end());
    if (seen.size() != ground_.size()) throw Error(Errc::InvalidInput, "duplicate ground id");
    std::map<LinearOrder, double> merged;
    for (auto& [order, w] : weights) {
        if (order.size() != static_cast<int>(ground_.size()))
            throw Error(Errc::GroundMismatch, "order size differs from ground set");
        merged[order] += w;
    }
    std::vector<double> ws;
    for (auto& [o, w] : merged) ws.push_back(w);
    if (ws.empty()) throw Error(Errc::EmptySupport, "preference distribution has no support");
    normalize_probs(ws, "preference distribution");
    std::size_t i = 0;
    for (auto& [o, w] : merged) {
        if (ws[i] > 0.0) support_.emplace_back(o, ws[i]);
        ++i;
    }
}

PreferenceDistribution PreferenceDistribution::degenerate(std::vector<std::string> ground, LinearOrder order) {
    return PreferenceDistribution(std::move(ground), {{std::move(order), 1.0}});
}

PreferenceDistribution PreferenceDistribution::uniform(std::vector<std::string> ground) {
    auto orders = all_orders(static_cast<int>(ground.size()));
    std::vector<std::pair<LinearOrder, double>> w;
    const double p = 1.0 / static_cast<double>(orders.size());
    for (auto& o : orders) w.emplace_back(std::move(o), p);
    return PreferenceDistribution(std::move(ground), std::move(w));
}

std::optional<int> PreferenceDistribution::find(std::string_view id) const {
    for (std::size_t i = 0; i < ground_.size(); ++i)
        if (ground_[i] == id) return static_cast<int>(i);
    return std::nullopt;
}

int PreferenceDistribution::index(std::string_view id) const {
    auto i = find(id);
    if (!i) throw Error(Errc::GroundMismatch, "id " + std::string(id) + " not in ground set");
    return *i;
}

AggregationCorrespondence::AggregationCorrespondence(AggregateSpace space,
                                                     std::vector<std::vector<std::string>> per_aggregate)
    : space_(std::move(space)) {
    if (static_cast<int>(per_aggregate.size()) != space_.size())
        throw Error(Errc::InvalidInput, "correspondence must list every aggregate");
    std::set<std::string> seen;
    members_.resize(per_aggregate.size());
    for (int a = 0; a < space_.size(); ++a) {
        const auto& xs = per_aggregate[static_cast<std::size_t>(a)];
        if (space_.is_atomic(a) && xs.size() != 1)
            throw Error(Errc::InvalidInput, "atomic aggregate " + space_.id(a) + " needs exactly one alternative");
        if (!space_.is_atomic(a) && xs.size() < 2)
            throw Error(Errc::InvalidInput, "non-atomic aggregate " + space_.id(a) + " needs at least two alternatives");
        for (const auto& x : xs) {
            if (!seen.insert(x).second) throw Error(Errc::InvalidInput, "alternative " + x + " assigned twice");
            members_[static_cast<std::size_t>(a)].push_back(static_cast<int>(underlying_.size()));
            underlying_.push_back(x);
            owner_.push_back(a);
        }
    }
    if (underlying_.size() > 64) throw Error(Errc::TooLarge, "more than 64 underlying alternatives");
}

AggregationCorrespondence AggregationCorrespondence::with_atomic_identity(
    AggregateSpace space, std::vector<std::vector<std::string>> non_atomic_sets) {
    if (static_cast<int>(non_atomic_sets.size()) != space.non_atomic_count())
        throw Error(Errc::InvalidInput, "one set per non-atomic aggregate expected");
    std::vector<std::vector<std::string>> all;
    for (int a = 0; a < space.atomic_count(); ++a) all.push_back({space.id(a)});
    for (auto& s : non_atomic_sets) all.push_back(std::move(s));
    return AggregationCorrespondence(std::move(space), std::move(all));
}

std::optional<int> AggregationCorrespondence::find(std::string_view x) const {
    for (std::size_t i = 0; i < underlying_.size(); ++i)
        if (underlying_[i] == x) return static_cast<int>(i);
    return std::nullopt;
}

XMask CompositionTuple::part(int agg) const {
    for (const auto& [a, s] : parts)
        if (a == agg) return s;
    return 0;
}

void CompositionDistribution::set(Menu m, MenuComposition comp) {
    std::vector<double> w;
    for (const auto& [t, p] : comp) w.push_back(p);
    if (w.empty()) throw Error(Errc::InvalidInput, "empty composition for a menu");
    normalize_probs(w, "composition distribution");
    MenuComposition clean;
    std::size_t i = 0;
    for (auto& [t, p] : comp) {
        if (w[i] > 0.0) clean.emplace(t, w[i]);
        ++i;
    }
    per_menu_[m] = std::move(clean);
}

const MenuComposition* CompositionDistribution::find(Menu m) const {
    auto it = per_menu_.find(m);
    return it == per_menu_.end() ? nullptr : &it->second;
}

void validate_composition(const AggregationCorrespondence& X, Menu m, const MenuComposition& comp) {
    const auto& space = X.space();
    for (const auto& [t, p] : comp) {
        std::size_t k = 0;
        int prev = -1;
        for (int a : m.members()) {
            if (space.is_atomic(a)) continue;
            if (k >= t.parts.size() || t.parts[k].first != a)
                throw Error(Errc::InvalidTuple, "tuple does not cover " + space.id(a) + " in " + menu_label(space, m));
            XMask s = t.parts[k].second;
            if (s == 0 || (s & ~X.full_part(a)) != 0)
                throw Error(Errc::InvalidTuple, "invalid part for " + space.id(a));
            if (a <= prev) throw Error(Errc::InvalidTuple, "tuple parts out of order");
            prev = a;
            ++k;
        }
        if (k != t.parts.size())
            throw Error(Errc::InvalidTuple, "tuple has parts outside " + menu_label(space, m));
    }
}

CompositionTuple full_tuple(const AggregationCorrespondence& X, Menu m) {
    CompositionTuple t;
    for (int a : m.members())
        if (!X.space().is_atomic(a)) t.parts.emplace_back(a, X.full_part(a));
    return t;
}

void MenuCollectionFamily::assign(int agg, Menu m) {
    if (!m.contains(agg)) throw Error(Errc::AggregateNotInMenu, "deviation target is not in the menu");
    auto [it, inserted] = assigned_.emplace(m, agg);
    if (!inserted && it->second != agg)
        throw Error(Errc::InvalidInput, "menu assigned to two aggregates");
}

std::optional<int> MenuCollectionFamily::deviation(Menu m) const {
    auto it = assigned_.find(m);
    if (it == assigned_.end()) return std::nullopt;
    return it->second;
}

std::vector<Menu> MenuCollectionFamily::menus_for(int agg) const {
    std::vector<Menu> out;
    for (const auto& [m, a] : assigned_)
        if (a == agg) out.push_back(m);
    return out;
}

CellIndex::CellIndex(const ChoiceDomain& dom) : menus_(dom.menus()) {
    for (Menu m : menus_) {
        offsets_.push_back(cells_.size());
        for (int a : m.members()) cells_.emplace_back(m, a);
    }
}

std::vector<double> CellIndex::flatten(const StochasticChoice& rho) const {
    std::vector<double> v;
    v.reserve(cells_.size());
    for (Menu m : menus_) {
        const auto& p = rho.at(m);
        v.insert(v.end(), p.begin(), p.end());
    }
    return v;
}

StochasticChoice CellIndex::unflatten(std::span<const double> v) const {
    StochasticChoice rho;
    for (std::size_t i = 0; i < menus_.size(); ++i) {
        std::size_t n = static_cast<std::size_t>(menus_[i].size());
        rho.set(menus_[i], std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                                               v.begin() + static_cast<std::ptrdiff_t>(offsets_[i] + n)));
    }
    return rho;
}

}  // namespace aggrum
