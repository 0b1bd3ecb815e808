#include "ikf/pvim.hpp"

#include <numeric>

#include "ikf/parallel.hpp"

namespace ikf {

namespace {

std::vector<std::size_t> evaluation_rows(const KingTree& tree, const PvimParams& params) {
  if (params.holdout) return *params.holdout;
  return {tree.oob.begin(), tree.oob.end()};
}

double tree_pvim(KingForest& forest, std::size_t j, const Dataset& data,
                 const PvimParams& params, const SeedContext& seeds, bool& empty) {
  KingTree& tree = forest.trees[j];
  empty = false;
  if (!forest.king) throw std::invalid_argument("forest_pvims needs a King forest");
  Rng rng = seeds.stream(j);
  try {
    return kings_pvim(tree, data, *forest.king, params, rng);
  } catch (const EmptyEvaluationSet&) {
    empty = true;
    return 0.0;
  }
}

}  // namespace

double prediction_loss(double y, double prediction, Task task) noexcept {
  if (task == Task::Regression) return (y - prediction) * (y - prediction);
  return y == prediction ? 0.0 : 1.0;
}

double permutation_importance(const KingTree& tree, const Dataset& data, std::size_t variable,
                              std::span<const std::size_t> eval,
                              std::span<const std::size_t> permutation) {
  if (eval.empty()) throw EmptyEvaluationSet();
  if (permutation.size() != eval.size())
    throw std::invalid_argument("permutation length must match the evaluation set");
  const auto y = data.y();
  const auto column = data.column(variable);
  double base = 0.0;
  double permuted = 0.0;
  for (std::size_t k = 0; k < eval.size(); ++k) {
    const std::size_t row = eval[k];
    base += prediction_loss(y[row], tree.predict(data, row), data.task());
    const double swapped = column[eval[permutation[k]]];
    permuted += prediction_loss(y[row], tree.predict_with(data, row, variable, swapped), data.task());
  }
  return (permuted - base) / static_cast<double>(eval.size());
}

double kings_pvim(const KingTree& tree, const Dataset& data, std::size_t king,
                  const PvimParams& params, Rng& rng) {
  if (params.n_permutations < 1) throw std::invalid_argument("n_permutations must be >= 1");
  const auto eval = evaluation_rows(tree, params);
  if (eval.empty()) throw EmptyEvaluationSet();
  if (!tree.splits_on(king)) return 0.0;
  double total = 0.0;
  for (int rep = 0; rep < params.n_permutations; ++rep) {
    const auto perm = random_permutation(eval.size(), rng);
    total += permutation_importance(tree, data, king, eval, perm);
  }
  return total / params.n_permutations;
}

std::vector<double> forest_pvims(KingForest& forest, const Dataset& data,
                                 const PvimParams& params, const SeedContext& seeds) {
  std::vector<double> out(forest.trees.size());
  std::vector<char> empty(forest.trees.size(), 0);
  parallel_for(forest.trees.size(), [&](std::size_t j) {
    bool e = false;
    out[j] = tree_pvim(forest, j, data, params, seeds, e);
    empty[j] = e;
  });
  forest.empty_oob_trees = 0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    forest.trees[j].pvim = out[j];
    forest.empty_oob_trees += static_cast<std::size_t>(empty[j]);
  }
  return out;
}

namespace serial {
std::vector<double> forest_pvims(KingForest& forest, const Dataset& data,
                                 const PvimParams& params, const SeedContext& seeds) {
  std::vector<double> out(forest.trees.size());
  forest.empty_oob_trees = 0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    bool e = false;
    out[j] = tree_pvim(forest, j, data, params, seeds, e);
    forest.trees[j].pvim = out[j];
    forest.empty_oob_trees += static_cast<std::size_t>(e);
  }
  return out;
}
}  // namespace serial

std::vector<double> depth_profile(std::span<const KingForest> forests, ProfileAggregate agg) {
  std::vector<double> profile;
  profile.reserve(forests.size());
  for (const auto& forest : forests) {
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += tree.pvim;
    const double n = static_cast<double>(forest.trees.size());
    profile.push_back(agg == ProfileAggregate::Sum || n == 0 ? sum : sum / n);
  }
  return profile;
}

std::vector<double> depth_profile_pvim(std::span<KingForest> forests, const Dataset& data,
                                       const PvimParams& params, const SeedContext& seeds) {
  for (std::size_t d = 0; d < forests.size(); ++d) forest_pvims(forests[d], data, params, seeds.child(d));
  return depth_profile(forests, ProfileAggregate::Mean);
}

}  // namespace ikf
