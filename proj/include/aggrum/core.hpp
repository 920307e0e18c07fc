#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aggrum/error.hpp"

namespace aggrum {

// Sets of aggregate indices and of underlying-alternative positions.
using Mask = std::uint32_t;
using XMask = std::uint64_t;

inline constexpr int kMaxAggregates = 24;
inline constexpr int kMaxEnumeratedGround = 8;
inline constexpr double kInputTol = 1e-12;

class AggregateSpace {
public:
    AggregateSpace() = default;
    AggregateSpace(std::vector<std::string> atomic, std::vector<std::string> non_atomic);

    int size() const { return static_cast<int>(ids_.size()); }
    int atomic_count() const { return n_atomic_; }
    int non_atomic_count() const { return size() - n_atomic_; }
    bool is_atomic(int a) const { return a < n_atomic_; }

    const std::string& id(int a) const { return ids_.at(static_cast<std::size_t>(a)); }
    const std::vector<std::string>& ids() const { return ids_; }
    std::vector<std::string> atomic_ids() const;
    std::vector<std::string> non_atomic_ids() const;

    std::optional<int> find(std::string_view id) const;
    int index(std::string_view id) const;

    Mask atomic_mask() const { return (Mask{1} << n_atomic_) - 1; }
    Mask all_mask() const { return (Mask{1} << size()) - 1; }
    Mask non_atomic_mask() const { return all_mask() & ~atomic_mask(); }

    bool operator==(const AggregateSpace&) const = default;

private:
    std::vector<std::string> ids_;  // atomic first, then non-atomic
    int n_atomic_ = 0;
};

// Nonempty set of aggregates. Ordered lexicographically over the sorted member indices.
struct Menu {
    Mask bits = 0;

    bool contains(int a) const { return ((bits >> a) & 1u) != 0; }
    int size() const { return std::popcount(bits); }
    bool empty() const { return bits == 0; }
    std::vector<int> members() const;
    // Position of aggregate a among the sorted members.
    int slot(int a) const { return std::popcount(bits & ((Mask{1} << a) - 1)); }

    friend bool operator==(Menu, Menu) = default;
    friend std::strong_ordering operator<=>(Menu x, Menu y);
};

Menu menu_of(const AggregateSpace& space, std::span<const std::string> ids);
std::string menu_label(const AggregateSpace& space, Menu m);

enum class DomainKind { Full, ContainingAggregate, Custom };

class ChoiceDomain {
public:
    static ChoiceDomain full(const AggregateSpace& space);
    // Every menu containing `agg`, plus every nonempty atomic menu (keeps the closure property).
    static ChoiceDomain containing(const AggregateSpace& space, int agg);
    static ChoiceDomain custom(std::vector<Menu> menus);

    DomainKind kind() const { return kind_; }
    const std::vector<Menu>& menus() const { return menus_; }
    bool contains(Menu m) const;
    std::size_t size() const { return menus_.size(); }

private:
    DomainKind kind_ = DomainKind::Custom;
    std::vector<Menu> menus_;
};

// rho(A, .) stored as a vector aligned with A's members in index order.
class StochasticChoice {
public:
    void set(Menu m, std::vector<double> probs);
    bool has(Menu m) const { return table_.count(m) != 0; }
    const std::vector<double>& at(Menu m) const;
    double prob(Menu m, int a) const;
    const std::map<Menu, std::vector<double>>& table() const { return table_; }
    ChoiceDomain domain() const;
    std::size_t cell_count() const;

    bool operator==(const StochasticChoice&) const = default;

private:
    std::map<Menu, std::vector<double>> table_;
};

double max_abs_diff(const StochasticChoice& a, const StochasticChoice& b);

class LinearOrder {
public:
    LinearOrder() = default;
    explicit LinearOrder(std::vector<int> ranking);
    static LinearOrder identity(int n);

    int size() const { return static_cast<int>(ranking_.size()); }
    const std::vector<int>& ranking() const { return ranking_; }
    int at(int pos) const { return ranking_[static_cast<std::size_t>(pos)]; }
    int rank(int item) const { return rank_[static_cast<std::size_t>(item)]; }
    bool prefers(int a, int b) const { return rank(a) < rank(b); }
    // Best element of a nonempty set of ground positions; -1 for the empty set.
    int best(XMask set) const;

    friend bool operator==(const LinearOrder& x, const LinearOrder& y) { return x.ranking_ == y.ranking_; }
    friend auto operator<=>(const LinearOrder& x, const LinearOrder& y) { return x.ranking_ <=> y.ranking_; }

private:
    std::vector<int> ranking_;
    std::vector<int> rank_;
};

// All n! orders in lexicographic order of their rankings.
std::vector<LinearOrder> all_orders(int n);

class PreferenceDistribution {
public:
    PreferenceDistribution() = default;
    PreferenceDistribution(std::vector<std::string> ground,
                           std::vector<std::pair<LinearOrder, double>> weights);
    static PreferenceDistribution degenerate(std::vector<std::string> ground, LinearOrder order);
    static PreferenceDistribution uniform(std::vector<std::string> ground);

    const std::vector<std::string>& ground() const { return ground_; }
    const std::vector<std::pair<LinearOrder, double>>& support() const { return support_; }
    std::optional<int> find(std::string_view id) const;
    int index(std::string_view id) const;

    bool operator==(const PreferenceDistribution&) const = default;

private:
    std::vector<std::string> ground_;
    std::vector<std::pair<LinearOrder, double>> support_;  // sorted by order, positive weights
};

// X: aggregate -> disjoint set of underlying alternatives.
class AggregationCorrespondence {
public:
    AggregationCorrespondence() = default;
    AggregationCorrespondence(AggregateSpace space, std::vector<std::vector<std::string>> per_aggregate);
    // Atomic aggregates map to themselves; non-atomic ones to the given sets.
    static AggregationCorrespondence with_atomic_identity(
        AggregateSpace space, std::vector<std::vector<std::string>> non_atomic_sets);

    const AggregateSpace& space() const { return space_; }
    const std::vector<std::string>& underlying() const { return underlying_; }
    const std::vector<int>& members(int agg) const { return members_.at(static_cast<std::size_t>(agg)); }
    int owner(int x) const { return owner_.at(static_cast<std::size_t>(x)); }
    std::optional<int> find(std::string_view x) const;
    XMask full_part(int agg) const { return (XMask{1} << members(agg).size()) - 1; }

    bool operator==(const AggregationCorrespondence&) const = default;

private:
    AggregateSpace space_;
    std::vector<std::string> underlying_;
    std::vector<std::vector<int>> members_;
    std::vector<int> owner_;
};

// (S_a) for the non-atomic members of a menu. A part is a bit set over positions within X(a).
struct CompositionTuple {
    std::vector<std::pair<int, XMask>> parts;

    XMask part(int agg) const;
    auto operator<=>(const CompositionTuple&) const = default;
};

using MenuComposition = std::map<CompositionTuple, double>;

class CompositionDistribution {
public:
    void set(Menu m, MenuComposition comp);
    const MenuComposition* find(Menu m) const;
    const std::map<Menu, MenuComposition>& per_menu() const { return per_menu_; }

    bool operator==(const CompositionDistribution&) const = default;

private:
    std::map<Menu, MenuComposition> per_menu_;
};

// Checks that a composition is valid for menu m under X; throws InvalidTuple.
void validate_composition(const AggregationCorrespondence& X, Menu m, const MenuComposition& comp);

// Tuple with every non-atomic member of m taking its full set X(a).
CompositionTuple full_tuple(const AggregationCorrespondence& X, Menu m);

// Menus in E_a for each non-atomic a; the rest of the domain is the follow set.
class MenuCollectionFamily {
public:
    void assign(int agg, Menu m);
    std::optional<int> deviation(Menu m) const;
    const std::map<Menu, int>& assignments() const { return assigned_; }
    std::vector<Menu> menus_for(int agg) const;
    bool empty() const { return assigned_.empty(); }

    bool operator==(const MenuCollectionFamily&) const = default;

private:
    std::map<Menu, int> assigned_;
};

// Flat indexing of the (menu, member) cells of a domain, in menu order then member order.
class CellIndex {
public:
    CellIndex() = default;
    explicit CellIndex(const ChoiceDomain& dom);

    std::size_t size() const { return cells_.size(); }
    std::size_t menu_count() const { return menus_.size(); }
    const std::vector<Menu>& menus() const { return menus_; }
    std::size_t offset(std::size_t menu_pos) const { return offsets_[menu_pos]; }
    const std::pair<Menu, int>& cell(std::size_t i) const { return cells_[i]; }

    std::vector<double> flatten(const StochasticChoice& rho) const;
    StochasticChoice unflatten(std::span<const double> v) const;

private:
    std::vector<Menu> menus_;
    std::vector<std::size_t> offsets_;
    std::vector<std::pair<Menu, int>> cells_;
};

}  // namespace aggrum
