#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ikf/data.hpp"
#include "ikf/rng.hpp"

namespace ikf {

struct TreeParams {
  std::size_t mtry = 0;  ///< 0 selects ceil(sqrt(|pool|)).
  std::size_t min_leaf = 5;
  bool bootstrap = true;
};

struct Node {
  int variable = -1;  ///< -1 marks a leaf.
  double threshold = 0.0;  ///< rows with value < threshold go left.
  int left = -1;
  int right = -1;
  int depth = 1;  ///< root is depth 1.
  double value = 0.0;  ///< inbag mean (regression) or majority class.
  std::uint32_t samples = 0;

  bool is_leaf() const noexcept { return variable < 0; }
  bool operator==(const Node&) const = default;
};

struct KingTree {
  std::vector<Node> nodes;  ///< preorder, nodes[0] is the root.
  std::optional<std::size_t> king;
  std::vector<std::uint32_t> inbag;  ///< sorted, with repeats.
  std::vector<std::uint32_t> oob;    ///< sorted, distinct.
  double pvim = 0.0;

  double predict(const Dataset& data, std::size_t row) const;
  /// Prediction with column `variable` of `row` replaced by `value`.
  double predict_with(const Dataset& data, std::size_t row, std::size_t variable,
                      double value) const;

  /// Distinct split variables, ascending.
  std::vector<std::size_t> split_variables() const;
  bool splits_on(std::size_t variable) const;

  bool operator==(const KingTree&) const = default;
};

/// Everything that shapes tree growth except the random stream.
struct GrowSpec {
  std::optional<std::size_t> king;  ///< empty: unconstrained root.
  std::vector<double> weights;      ///< length p, nonnegative.
  std::vector<std::size_t> pool;    ///< candidate variables; must hold the king.
  int max_depth = 1;
  TreeParams params;
};

struct KingForest {
  std::vector<KingTree> trees;
  std::optional<std::size_t> king;
  int max_depth = 1;
  std::vector<std::size_t> pool;
  std::vector<double> weights_used;
  std::size_t empty_oob_trees = 0;  ///< set by forest_pvims.

  bool operator==(const KingForest&) const = default;
};

struct PathRecord {
  std::vector<std::size_t> vars;  ///< split variables from the root down.
  std::size_t reproduction_count = 0;
  double pvim_sum = 0.0;

  std::size_t depth() const noexcept { return vars.size(); }
  double avg_pvim() const noexcept {
    return reproduction_count == 0 ? 0.0 : pvim_sum / static_cast<double>(reproduction_count);
  }
  bool operator==(const PathRecord&) const = default;
};

/// Weighted impurity removed by a split: |P|var(P) - |L|var(L) - |R|var(R)
/// for regression, Gini in place of variance for classification.
double impurity_decrease(std::span<const double> parent, std::span<const double> left,
                         std::span<const double> right, Task task);

/// Draws up to `mtry` distinct variables from `eligible`, each draw
/// proportional to its weight among those not yet drawn. Zero-weight
/// variables are never drawn unless every eligible weight is zero, in which
/// case the draw is uniform.
std::vector<std::size_t> sample_candidates(std::span<const double> weights,
                                           std::span<const std::size_t> eligible,
                                           std::size_t mtry, Rng& rng);

KingTree build_tree(const Dataset& data, const GrowSpec& spec, Rng& rng);

/// Tree j is grown from seeds.stream(j). Parallel over trees.
KingForest build_forest(const Dataset& data, const GrowSpec& spec, std::size_t n_trees,
                        const SeedContext& seeds);

namespace serial {
KingForest build_forest(const Dataset& data, const GrowSpec& spec, std::size_t n_trees,
                        const SeedContext& seeds);
}  // namespace serial

/// Calls `visit` once per split node at exactly `depth`, with the split
/// variables on the way down to it (root first).
void for_each_path(const KingTree& tree, int depth,
                   const std::function<void(std::span<const std::size_t>)>& visit);

/// Distinct depth-d paths across the forest with reproduction counts,
/// sorted lexicographically by variable tuple. pvim_sum is left at zero.
std::vector<PathRecord> extract_paths(const KingForest& forest, int depth);

/// Indented one-node-per-line rendering.
std::string dump_tree(const KingTree& tree, const std::vector<std::string>& names);

namespace diagnostics {
std::uint64_t trees_built() noexcept;
void reset_trees_built() noexcept;
}  // namespace diagnostics

}  // namespace ikf
