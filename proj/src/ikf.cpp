#include "ikf/ikf.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ikf/parallel.hpp"
#include "ikf/pvim.hpp"

namespace ikf {

std::string to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::Accompanied: return "Accompanied";
    case InteractionKind::Synergistic: return "Synergistic";
    case InteractionKind::Hierarchical: return "Hierarchical";
  }
  return "?";
}

InteractionKind parse_interaction_kind(const std::string& text) {
  if (text == "Accompanied") return InteractionKind::Accompanied;
  if (text == "Synergistic") return InteractionKind::Synergistic;
  if (text == "Hierarchical") return InteractionKind::Hierarchical;
  throw std::invalid_argument("unknown interaction kind '" + text + "'");
}

std::size_t default_stop_size(std::size_t p) {
  return std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(0.02 * static_cast<double>(p))));
}

void validate(const IkfParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (params.max_kings && *params.max_kings < 1) throw std::invalid_argument("max_kings must be >= 1");
  if (params.tau_dir < 0.0) throw std::invalid_argument("tau_dir must be >= 0");
  if (params.tau_main && *params.tau_main < 0.0) throw std::invalid_argument("tau_main must be >= 0");
  if (params.tau_order && *params.tau_order < 0.0) throw std::invalid_argument("tau_order must be >= 0");
  if (params.king.n_trees < 1 || params.king.max_depth < 1 || params.king.n_iter < 1 ||
      params.king.n_top < 1)
    throw std::invalid_argument("forest size, depth, iterations and shortlist length must be >= 1");
  if (params.king.pvim.n_permutations < 1) throw std::invalid_argument("n_permutations must be >= 1");
  if (params.king.tree.min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
}

std::vector<std::size_t> IkfReport::ranking() const { return rank_variables(W); }

std::vector<PathRecord> IkfReport::concatenated_shortlist(int depth, PathMetric metric) const {
  std::vector<PathRecord> out;
  for (const auto& k : kings) {
    if (const auto* s = k.shortlist_at(depth)) {
      const auto& list = metric == PathMetric::PvimSum ? s->by_pvim : s->by_count;
      out.insert(out.end(), list.begin(), list.end());
    }
  }
  return out;
}

std::size_t choose_first_king(const Dataset& data, const IkfParams& params,
                              const SeedContext& seeds) {
  switch (params.first_king.mode) {
    case FirstKingMode::Named:
      return data.resolve_variable(params.first_king.name);
    case FirstKingMode::Random: {
      Rng rng = seeds.stream(0);
      std::uniform_int_distribution<std::size_t> pick(0, data.p() - 1);
      return pick(rng);
    }
    case FirstKingMode::Auto:
      break;
  }

  // Unconstrained-root forest, uniform weights; standard OOB permutation
  // importance per variable, averaged over trees.
  std::vector<std::size_t> all(data.p());
  std::iota(all.begin(), all.end(), std::size_t{0});
  GrowSpec spec{std::nullopt, std::vector<double>(data.p(), 1.0), all, params.king.max_depth,
                params.king.tree};
  KingForest forest = build_forest(data, spec, params.king.n_trees, seeds.child(1));
  std::vector<std::vector<std::pair<std::size_t, double>>> per_tree(forest.trees.size());
  const SeedContext pvim_seeds = seeds.child(2);
  parallel_for(forest.trees.size(), [&](std::size_t j) {
    const KingTree& tree = forest.trees[j];
    const SeedContext tree_seeds = pvim_seeds.child(j);
    for (auto v : tree.split_variables()) {
      Rng rng = tree_seeds.stream(v);
      try {
        per_tree[j].emplace_back(v, kings_pvim(tree, data, v, params.king.pvim, rng));
      } catch (const EmptyEvaluationSet&) {
      }
    }
  });
  std::vector<double> importance(data.p(), 0.0);
  for (const auto& entries : per_tree)
    for (auto [v, value] : entries) importance[v] += value;
  return rank_variables(importance).front();
}

TypingThresholds typing_thresholds(std::span<const KingReport> kings, const IkfParams& params) {
  double max_main = 0.0;
  for (const auto& k : kings)
    if (!k.pvim_profile.empty()) max_main = std::max(max_main, k.pvim_profile.front());
  TypingThresholds t;
  t.tau_dir = params.tau_dir;
  t.tau_main = params.tau_main.value_or(std::max(0.25 * max_main, params.tau_dir));
  return t;
}

double order_threshold(std::span<const double> profile, const IkfParams& params) {
  if (params.tau_order) return *params.tau_order;
  const double peak = profile.empty() ? 0.0 : *std::max_element(profile.begin(), profile.end());
  return std::max(0.1 * std::max(peak, 0.0), params.tau_dir);
}

std::vector<int> infer_orders(std::span<const double> profile, double tau) {
  std::vector<int> orders;
  for (std::size_t d = 0; d < profile.size(); ++d) {
    const double step = d == 0 ? profile[0] : profile[d] - profile[d - 1];
    if (step > tau) orders.push_back(static_cast<int>(d + 1));
  }
  return orders;
}

TypedInteraction classify_interaction(std::vector<std::size_t> vars,
                                      std::vector<DirectionEvidence> directions,
                                      std::vector<std::optional<double>> main_pvims,
                                      const TypingThresholds& thresholds) {
  TypedInteraction out;
  out.order = static_cast<int>(vars.size());
  out.vars = std::move(vars);
  out.directions = std::move(directions);
  out.main_pvims = std::move(main_pvims);
  out.thresholds = thresholds;

  const bool has_main = std::any_of(out.main_pvims.begin(), out.main_pvims.end(),
                                    [&](const auto& m) { return m && *m > thresholds.tau_main; });
  if (has_main) {
    out.kind = InteractionKind::Accompanied;
    return out;
  }

  std::vector<const DirectionEvidence*> strong;
  for (const auto& d : out.directions)
    if (d.avg_pvim > thresholds.tau_dir) strong.push_back(&d);

  if (strong.size() == out.directions.size() && !strong.empty()) {
    out.kind = InteractionKind::Synergistic;
  } else if (!strong.empty()) {
    out.kind = InteractionKind::Hierarchical;
    std::stable_sort(strong.begin(), strong.end(),
                     [](const auto* a, const auto* b) { return a->avg_pvim > b->avg_pvim; });
    for (const auto* d : strong) out.dominant.push_back(d->lead);
  } else {
    out.kind = InteractionKind::Synergistic;
    out.low_confidence = true;
  }
  return out;
}

std::vector<TypedInteraction> type_interactions(std::span<const KingReport> kings,
                                                const TypingThresholds& thresholds) {
  std::map<std::vector<std::size_t>, int> candidates;
  for (const auto& k : kings) {
    for (const auto& lists : k.shortlists) {
      for (const auto* list : {&lists.by_pvim, &lists.by_count}) {
        for (const auto& rec : *list) {
          auto key = rec.vars;
          std::sort(key.begin(), key.end());
          candidates.emplace(std::move(key), lists.depth);
        }
      }
    }
  }

  std::map<std::size_t, const KingReport*> by_king;
  for (const auto& k : kings) by_king.emplace(k.king, &k);

  std::vector<TypedInteraction> out;
  out.reserve(candidates.size());
  for (const auto& [vars, depth] : candidates) {
    std::vector<DirectionEvidence> directions;
    std::vector<std::optional<double>> mains;
    for (auto member : vars) {
      DirectionEvidence dir;
      dir.lead = member;
      std::optional<double> main;
      if (auto it = by_king.find(member); it != by_king.end()) {
        const KingReport& kr = *it->second;
        if (!kr.pvim_profile.empty()) main = kr.pvim_profile.front();
        for (const auto& rec : kr.paths_at(depth)) {
          auto key = rec.vars;
          std::sort(key.begin(), key.end());
          if (key != vars) continue;
          dir.count += rec.reproduction_count;
          dir.pvim_sum += rec.pvim_sum;
        }
        dir.observed = dir.count > 0;
        if (dir.observed) dir.avg_pvim = dir.pvim_sum / static_cast<double>(dir.count);
      }
      directions.push_back(dir);
      mains.push_back(main);
    }
    out.push_back(classify_interaction(vars, std::move(directions), std::move(mains), thresholds));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.order != b.order) return a.order < b.order;
    return a.vars < b.vars;
  });
  return out;
}

IkfReport run_ikf(const Dataset& data, const IkfParams& params, const SeedContext& seeds) {
  validate(params);
  const std::size_t p = data.p();
  IkfReport report;
  report.W.assign(p, 0.0);
  report.stop_size = params.stop_size > 0 ? params.stop_size : default_stop_size(p);

  std::vector<std::size_t> survived(p);
  std::iota(survived.begin(), survived.end(), std::size_t{0});
  std::vector<char> is_king(p, 0);
  const std::vector<double> ones(p, 1.0);

  std::size_t king = choose_first_king(data, params, seeds.child(0));
  for (std::size_t i = 1;; ++i) {
    is_king[king] = 1;
    KingReport kr = run_kings_forests(data, king, ones, params.king, seeds.child(100 + i));

    std::vector<std::size_t> top;
    if (params.restrict_to_survivors) {
      std::vector<double> masked(p, -std::numeric_limits<double>::infinity());
      for (auto v : survived) masked[v] = kr.weights[v];
      const auto keep = static_cast<std::size_t>(
          std::ceil((1.0 - params.alpha) * static_cast<double>(survived.size()) - 1e-9));
      const auto ranked = rank_variables(masked);
      top.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep));
    } else {
      const auto keep = static_cast<std::size_t>(
          std::ceil((1.0 - params.alpha) * static_cast<double>(p) - 1e-9));
      const auto ranked = rank_variables(kr.weights);
      top.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(top.begin(), top.end());
    std::vector<std::size_t> next;
    std::set_intersection(survived.begin(), survived.end(), top.begin(), top.end(),
                          std::back_inserter(next));
    survived = std::move(next);
    report.survived.push_back(survived);

    for (std::size_t v = 0; v < p; ++v) report.W[v] += kr.weights[v];
    report.kings.push_back(std::move(kr));

    if (survived.size() <= report.stop_size) break;
    if (params.max_kings && report.kings.size() >= *params.max_kings) break;
    if (report.kings.size() >= p) break;

    std::size_t best = p;
    for (std::size_t v = 0; v < p; ++v) {
      if (is_king[v]) continue;
      if (best == p || report.W[v] > report.W[best]) best = v;
    }
    king = best;
  }

  report.thresholds = typing_thresholds(report.kings, params);
  for (const auto& k : report.kings) {
    const double tau = order_threshold(k.pvim_profile, params);
    report.order_taus.push_back(tau);
    report.orders.push_back(infer_orders(k.pvim_profile, tau));
  }
  report.interactions = type_interactions(report.kings, report.thresholds);
  return report;
}

}  // namespace ikf
