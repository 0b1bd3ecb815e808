#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ikf/data.hpp"
#include "ikf/forest.hpp"
#include "ikf/pvim.hpp"
#include "ikf/rng.hpp"

namespace ikf {

/// How a path's PVIM sum counts a tree that contains the path more than once.
enum class PvimSumMode { PerOccurrence, PerTree };

enum class PathMetric { PvimSum, ReproductionCount };

struct KingParams {
  std::size_t n_trees = 100;
  int max_depth = 4;
  int n_iter = 7;
  std::size_t n_candidates = 0;  ///< 0 selects floor(n / (2 ln n)).
  std::size_t n_top = 20;
  TreeParams tree;
  PvimParams pvim;
  PvimSumMode sum_mode = PvimSumMode::PerOccurrence;
};

/// floor(n / (2 ln n)), never below 1.
std::size_t default_candidate_pool_size(std::size_t n);

struct PathShortlist {
  int depth = 2;
  std::vector<PathRecord> by_pvim;
  std::vector<PathRecord> by_count;
};

struct KingReport {
  std::size_t king = 0;
  std::vector<double> weights;           ///< after the last weight-update iteration.
  std::vector<double> pvim_profile;      ///< mean per-tree PVIM, depth 1..D.
  std::vector<double> pvim_profile_sum;  ///< summed per-tree PVIM, depth 1..D.
  std::vector<std::size_t> pool;
  std::vector<PathShortlist> shortlists;       ///< depth 2..D.
  std::vector<std::vector<PathRecord>> paths;  ///< full scored universe, depth 2..D.
  std::size_t n_trees = 0;
  std::size_t empty_oob_trees = 0;

  /// Full record universe at depth d, or empty when d is out of range.
  std::span<const PathRecord> paths_at(int depth) const;
  const PathShortlist* shortlist_at(int depth) const;
};

/// w_i + sum_j PVIM_j * I(PVIM_j > 0) * I(x_i splits some node of tree j).
std::vector<double> update_weights(std::span<const double> w_prev, const KingForest& forest);

/// Variable indices by descending weight; equal weights keep ascending index.
std::vector<std::size_t> rank_variables(std::span<const double> w);

/// Top-n_c variables by weight with the King forced in, ascending order.
std::vector<std::size_t> select_pool(std::span<const double> w, std::size_t king,
                                     std::size_t n_candidates);

/// Depth-d path universe with counts and PVIM sums from the per-tree PVIMs.
std::vector<PathRecord> score_paths(const KingForest& forest, int depth, PvimSumMode mode);

/// Sorted by the metric descending, ties by ascending variable tuple, then
/// truncated to n_top.
std::vector<PathRecord> top_paths(std::span<const PathRecord> records, PathMetric metric,
                                  std::size_t n_top);

KingReport run_kings_forests(const Dataset& data, std::size_t king, std::span<const double> w_init,
                             const KingParams& params, const SeedContext& seeds);

}  // namespace ikf
