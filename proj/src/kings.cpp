#include "ikf/kings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ikf {

std::size_t default_candidate_pool_size(std::size_t n) {
  if (n < 2) return 1;
  const double nd = static_cast<double>(n);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(nd / (2.0 * std::log(nd)))));
}

std::span<const PathRecord> KingReport::paths_at(int depth) const {
  if (depth < 2 || static_cast<std::size_t>(depth - 2) >= paths.size()) return {};
  return paths[static_cast<std::size_t>(depth - 2)];
}

const PathShortlist* KingReport::shortlist_at(int depth) const {
  for (const auto& s : shortlists)
    if (s.depth == depth) return &s;
  return nullptr;
}

std::vector<double> update_weights(std::span<const double> w_prev, const KingForest& forest) {
  std::vector<double> increment(w_prev.size(), 0.0);
  for (const auto& tree : forest.trees) {
    if (!(tree.pvim > 0.0)) continue;
    for (auto v : tree.split_variables()) increment[v] += tree.pvim;
  }
  std::vector<double> w(w_prev.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = w_prev[i] + increment[i];
  return w;
}

std::vector<std::size_t> rank_variables(std::span<const double> w) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  return order;
}

std::vector<std::size_t> select_pool(std::span<const double> w, std::size_t king,
                                     std::size_t n_candidates) {
  const auto ranked = rank_variables(w);
  const std::size_t k = std::clamp<std::size_t>(n_candidates, 1, ranked.size());
  std::vector<std::size_t> pool(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
  if (std::find(pool.begin(), pool.end(), king) == pool.end()) pool.back() = king;
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<PathRecord> score_paths(const KingForest& forest, int depth, PvimSumMode mode) {
  std::map<std::vector<std::size_t>, PathRecord> records;
  std::map<std::vector<std::size_t>, bool> seen_in_tree;
  for (const auto& tree : forest.trees) {
    seen_in_tree.clear();
    for_each_path(tree, depth, [&](std::span<const std::size_t> vars) {
      std::vector<std::size_t> key(vars.begin(), vars.end());
      auto& rec = records[key];
      if (rec.vars.empty()) rec.vars = key;
      ++rec.reproduction_count;
      if (mode == PvimSumMode::PerOccurrence) {
        rec.pvim_sum += tree.pvim;
      } else if (!seen_in_tree[key]) {
        seen_in_tree[key] = true;
        rec.pvim_sum += tree.pvim;
      }
    });
  }
  std::vector<PathRecord> out;
  out.reserve(records.size());
  for (auto& [key, rec] : records) out.push_back(std::move(rec));
  return out;
}

std::vector<PathRecord> top_paths(std::span<const PathRecord> records, PathMetric metric,
                                  std::size_t n_top) {
  std::vector<PathRecord> sorted(records.begin(), records.end());
  auto cmp = [metric](const PathRecord& a, const PathRecord& b) {
    if (metric == PathMetric::PvimSum) {
      if (a.pvim_sum != b.pvim_sum) return a.pvim_sum > b.pvim_sum;
    } else if (a.reproduction_count != b.reproduction_count) {
      return a.reproduction_count > b.reproduction_count;
    }
    return a.vars < b.vars;
  };
  std::sort(sorted.begin(), sorted.end(), cmp);
  if (sorted.size() > n_top) sorted.resize(n_top);
  return sorted;
}

KingReport run_kings_forests(const Dataset& data, std::size_t king, std::span<const double> w_init,
                             const KingParams& params, const SeedContext& seeds) {
  const std::size_t p = data.p();
  if (king >= p) throw std::invalid_argument("king out of range");
  if (w_init.size() != p) throw std::invalid_argument("initial weights must have length p");
  if (params.n_trees < 1 || params.max_depth < 1 || params.n_iter < 1 || params.n_top < 1)
    throw std::invalid_argument("forest size, depth, iterations and shortlist length must be >= 1");
  if (std::none_of(w_init.begin(), w_init.end(), [](double w) { return w > 0.0; }))
    throw std::invalid_argument("initial weights must be positive on at least one variable");

  std::vector<std::size_t> all(p);
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::vector<double> w(w_init.begin(), w_init.end());
  for (int t = 1; t <= params.n_iter; ++t) {
    GrowSpec spec{king, w, all, params.max_depth, params.tree};
    const auto tt = static_cast<std::uint64_t>(t);
    KingForest forest = build_forest(data, spec, params.n_trees, seeds.child({0, tt}));
    forest_pvims(forest, data, params.pvim, seeds.child({1, tt}));
    w = update_weights(w, forest);
  }

  KingReport report;
  report.king = king;
  report.weights = w;
  report.n_trees = params.n_trees;
  const std::size_t n_c =
      params.n_candidates > 0 ? params.n_candidates : default_candidate_pool_size(data.n());
  report.pool = select_pool(w, king, std::min(n_c, p));

  std::vector<KingForest> finals;
  finals.reserve(static_cast<std::size_t>(params.max_depth));
  for (int d = 1; d <= params.max_depth; ++d) {
    GrowSpec spec{king, w, report.pool, d, params.tree};
    const auto dd = static_cast<std::uint64_t>(d);
    KingForest forest = build_forest(data, spec, params.n_trees, seeds.child({2, dd}));
    forest_pvims(forest, data, params.pvim, seeds.child({3, dd}));
    report.empty_oob_trees += forest.empty_oob_trees;
    finals.push_back(std::move(forest));
  }
  report.pvim_profile = depth_profile(finals, ProfileAggregate::Mean);
  report.pvim_profile_sum = depth_profile(finals, ProfileAggregate::Sum);

  for (int d = 2; d <= params.max_depth; ++d) {
    auto records = score_paths(finals[static_cast<std::size_t>(d - 1)], d, params.sum_mode);
    PathShortlist lists;
    lists.depth = d;
    lists.by_pvim = top_paths(records, PathMetric::PvimSum, params.n_top);
    lists.by_count = top_paths(records, PathMetric::ReproductionCount, params.n_top);
    report.shortlists.push_back(std::move(lists));
    report.paths.push_back(std::move(records));
  }
  return report;
}

}  // namespace ikf
