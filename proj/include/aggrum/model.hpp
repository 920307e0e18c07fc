#pragma once

#include <span>
#include <string>
#include <string_view>

#include "aggrum/core.hpp"

namespace aggrum {

// Probability that `item` is the best element of `menu` under mu.
double rum_prob(const PreferenceDistribution& mu, std::span<const std::string> menu, std::string_view item);
// Same, with ground positions.
double rum_prob(const PreferenceDistribution& mu, XMask menu, int item);

// Choice over aggregates induced by preferences over underlying alternatives and per-menu compositions.
StochasticChoice forward_evaluate(const PreferenceDistribution& mu_x, const AggregationCorrespondence& X,
                                  const CompositionDistribution& lam, const ChoiceDomain& dom);

// Random utility evaluation directly over aggregates.
StochasticChoice aru_evaluate(const PreferenceDistribution& mu_a, const AggregateSpace& space,
                              const ChoiceDomain& dom);

// Deterministic choice: max of `order` on follow menus, the assigned aggregate on deviating menus.
StochasticChoice vertex_choice(const AggregateSpace& space, const LinearOrder& order,
                               const MenuCollectionFamily& family, const ChoiceDomain& dom);

// Chosen aggregate of a menu under a menu-effect vertex.
int vertex_pick(const LinearOrder& order, const MenuCollectionFamily& family, Menu m);

// Maps each ground position of mu to the aggregate index of the same id; throws GroundMismatch.
std::vector<int> aggregate_positions(const PreferenceDistribution& mu_a, const AggregateSpace& space);

}  // namespace aggrum
