#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ikf/data.hpp"
#include "ikf/forest.hpp"
#include "ikf/rng.hpp"

namespace ikf {

struct PvimParams {
  /// Evaluation rows; empty means each tree's out-of-bag rows.
  std::optional<std::vector<std::size_t>> holdout;
  int n_permutations = 1;
};

class EmptyEvaluationSet : public std::runtime_error {
 public:
  EmptyEvaluationSet()
      : std::runtime_error("PVIM evaluation set is empty (bootstrap covered every sample)") {}
};

/// Loss of one prediction: squared error or 0/1 misclassification.
double prediction_loss(double y, double prediction, Task task) noexcept;

/// Eq.-style permutation importance of `variable` for one tree on rows
/// `eval`, with the variable's values reassigned as
/// x*[eval[k]] = x[eval[permutation[k]]].
double permutation_importance(const KingTree& tree, const Dataset& data, std::size_t variable,
                              std::span<const std::size_t> eval,
                              std::span<const std::size_t> permutation);

/// Mean over params.n_permutations random permutations within the
/// evaluation set. Throws EmptyEvaluationSet when there is nothing to score.
double kings_pvim(const KingTree& tree, const Dataset& data, std::size_t king,
                  const PvimParams& params, Rng& rng);

/// Per-tree King's PVIM, stored into tree.pvim and returned. Tree j uses
/// seeds.stream(j). Trees with no evaluation rows score 0 and are counted
/// in forest.empty_oob_trees.
std::vector<double> forest_pvims(KingForest& forest, const Dataset& data,
                                 const PvimParams& params, const SeedContext& seeds);

namespace serial {
std::vector<double> forest_pvims(KingForest& forest, const Dataset& data,
                                 const PvimParams& params, const SeedContext& seeds);
}  // namespace serial

enum class ProfileAggregate { Mean, Sum };

/// One entry per forest (forest d has max depth d): mean or sum of the
/// per-tree PVIMs already stored in the trees.
std::vector<double> depth_profile(std::span<const KingForest> forests, ProfileAggregate agg);

/// Computes per-tree PVIMs for every forest, then the mean profile.
std::vector<double> depth_profile_pvim(std::span<KingForest> forests, const Dataset& data,
                                       const PvimParams& params, const SeedContext& seeds);

}  // namespace ikf
