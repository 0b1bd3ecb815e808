#include "ikf/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ikf/io.hpp"
#include "ikf/parallel.hpp"

namespace ikf {

namespace {

std::atomic<std::uint64_t> g_trees_built{0};

constexpr double kGainEps = 1e-12;

struct Split {
  int variable = -1;
  double threshold = 0.0;
  double gain = -std::numeric_limits<double>::infinity();
};

bool better(const Split& a, const Split& b) {
  if (a.variable < 0) return false;
  if (b.variable < 0) return true;
  if (a.gain != b.gain) return a.gain > b.gain;
  return a.variable < b.variable;
}

double midpoint(double lo, double hi) {
  double mid = 0.5 * lo + 0.5 * hi;
  return mid > lo ? mid : hi;
}

std::size_t resolve_mtry(const TreeParams& params, std::size_t pool_size) {
  if (params.mtry > 0) return params.mtry;
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(pool_size))));
}

void validate(const Dataset& data, const GrowSpec& spec) {
  if (spec.pool.empty()) throw std::invalid_argument("candidate pool is empty");
  if (spec.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (spec.params.min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
  if (spec.weights.size() != data.p()) throw std::invalid_argument("weights must have length p");
  for (double w : spec.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and >= 0");
  }
  for (auto v : spec.pool) {
    if (v >= data.p()) throw std::invalid_argument("pool variable out of range");
  }
  if (spec.king) {
    if (*spec.king >= data.p()) throw std::invalid_argument("king out of range");
    if (std::find(spec.pool.begin(), spec.pool.end(), *spec.king) == spec.pool.end())
      throw std::invalid_argument("king must belong to the candidate pool");
  }
  if (data.n() < 2 * spec.params.min_leaf)
    throw std::invalid_argument("n < 2*min_leaf: no split can satisfy the leaf size");
}

class Grower {
 public:
  Grower(const Dataset& data, const GrowSpec& spec, Rng& rng)
      : data_(data), spec_(spec), rng_(rng), y_(data.y()),
        mtry_(resolve_mtry(spec.params, spec.pool.size())),
        on_path_(data.p(), 0) {}

  std::vector<Node> grow(std::vector<std::uint32_t> rows) {
    grow_node(rows, 1);
    return std::move(nodes_);
  }

 private:
  double leaf_value(std::span<const std::uint32_t> rows) const {
    if (data_.task() == Task::Regression) {
      double sum = 0.0;
      for (auto r : rows) sum += y_[r];
      return sum / static_cast<double>(rows.size());
    }
    std::size_t ones = 0;
    for (auto r : rows) ones += y_[r] == 1.0;
    return 2 * ones > rows.size() ? 1.0 : 0.0;
  }

  bool pure(std::span<const std::uint32_t> rows) const {
    const double first = y_[rows.front()];
    return std::all_of(rows.begin(), rows.end(), [&](auto r) { return y_[r] == first; });
  }

  double impurity(std::span<const std::uint32_t> rows) const {
    const double n = static_cast<double>(rows.size());
    if (data_.task() == Task::Regression) {
      double sum = 0.0;
      for (auto r : rows) sum += y_[r];
      const double mean = sum / n;
      double sse = 0.0;
      for (auto r : rows) sse += (y_[r] - mean) * (y_[r] - mean);
      return sse;
    }
    double ones = 0.0;
    for (auto r : rows) ones += y_[r];
    return 2.0 * ones * (n - ones) / n;
  }

  Split best_split_for(std::size_t var, std::span<const std::uint32_t> rows) {
    const auto column = data_.column(var);
    pairs_.clear();
    for (auto r : rows) pairs_.emplace_back(column[r], y_[r]);
    std::sort(pairs_.begin(), pairs_.end());

    const std::size_t n = pairs_.size();
    const std::size_t min_leaf = spec_.params.min_leaf;
    const double nd = static_cast<double>(n);
    double total = 0.0;
    for (const auto& pr : pairs_) total += pr.second;

    Split best;
    double left_sum = 0.0;
    const bool regression = data_.task() == Task::Regression;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += pairs_[i].second;
      const std::size_t nl = i + 1;
      if (n - nl < min_leaf) break;
      if (nl < min_leaf || pairs_[i].first == pairs_[i + 1].first) continue;
      const double l = static_cast<double>(nl);
      const double r = nd - l;
      double gain;
      if (regression) {
        const double diff = left_sum / l - (total - left_sum) / r;
        gain = l * r / nd * diff * diff;
      } else {
        const double right_ones = total - left_sum;
        gain = 2.0 * (total * (nd - total) / nd - left_sum * (l - left_sum) / l -
                      right_ones * (r - right_ones) / r);
      }
      if (gain > best.gain) {
        best.gain = gain;
        best.variable = static_cast<int>(var);
        best.threshold = midpoint(pairs_[i].first, pairs_[i + 1].first);
      }
    }
    return best;
  }

  int grow_node(std::vector<std::uint32_t>& rows, int depth) {
    Node node;
    node.depth = depth;
    node.samples = static_cast<std::uint32_t>(rows.size());
    node.value = leaf_value(rows);
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    if (depth > spec_.max_depth || rows.size() < 2 * spec_.params.min_leaf || pure(rows))
      return index;

    Split best;
    if (depth == 1 && spec_.king) {
      best = best_split_for(*spec_.king, rows);
    } else {
      eligible_.clear();
      for (auto v : spec_.pool)
        if (!on_path_[v]) eligible_.push_back(v);
      if (eligible_.empty()) return index;
      for (auto v : sample_candidates(spec_.weights, eligible_, mtry_, rng_)) {
        Split s = best_split_for(v, rows);
        if (better(s, best)) best = s;
      }
    }
    if (best.variable < 0 || !(best.gain > kGainEps * std::max(1.0, impurity(rows))))
      return index;

    const auto column = data_.column(static_cast<std::size_t>(best.variable));
    std::vector<std::uint32_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (auto r : rows) (column[r] < best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    nodes_[index].variable = best.variable;
    nodes_[index].threshold = best.threshold;
    on_path_[best.variable] = 1;
    const int l = grow_node(left, depth + 1);
    const int r = grow_node(right, depth + 1);
    on_path_[best.variable] = 0;
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  const Dataset& data_;
  const GrowSpec& spec_;
  Rng& rng_;
  std::span<const double> y_;
  std::size_t mtry_;
  std::vector<char> on_path_;
  std::vector<std::size_t> eligible_;
  std::vector<std::pair<double, double>> pairs_;
  std::vector<Node> nodes_;
};

KingForest forest_shell(const GrowSpec& spec, std::size_t n_trees) {
  if (n_trees < 1) throw std::invalid_argument("forest size must be >= 1");
  KingForest forest;
  forest.trees.resize(n_trees);
  forest.king = spec.king;
  forest.max_depth = spec.max_depth;
  forest.pool = spec.pool;
  forest.weights_used = spec.weights;
  return forest;
}

}  // namespace

double impurity_decrease(std::span<const double> parent, std::span<const double> left,
                         std::span<const double> right, Task task) {
  if (left.empty() || right.empty()) throw std::invalid_argument("impurity_decrease: empty child");
  auto weighted = [task](std::span<const double> ys) {
    const double n = static_cast<double>(ys.size());
    if (task == Task::Regression) {
      const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : ys) ss += (v - mean) * (v - mean);
      return ss;
    }
    const double p1 = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    return n * (1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1));
  };
  return weighted(parent) - weighted(left) - weighted(right);
}

std::vector<std::size_t> sample_candidates(std::span<const double> weights,
                                           std::span<const std::size_t> eligible,
                                           std::size_t mtry, Rng& rng) {
  std::vector<std::size_t> remaining;
  remaining.reserve(eligible.size());
  for (auto v : eligible)
    if (weights[v] > 0.0) remaining.push_back(v);

  std::vector<std::size_t> drawn;
  if (remaining.empty()) {
    remaining.assign(eligible.begin(), eligible.end());
    const std::size_t k = std::min(mtry, remaining.size());
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, remaining.size() - 1);
      std::swap(remaining[i], remaining[pick(rng)]);
      drawn.push_back(remaining[i]);
    }
    return drawn;
  }

  const std::size_t k = std::min(mtry, remaining.size());
  drawn.reserve(k);
  for (std::size_t step = 0; step < k; ++step) {
    double total = 0.0;
    for (auto v : remaining) total += weights[v];
    std::uniform_real_distribution<double> unif(0.0, total);
    const double u = unif(rng);
    std::size_t chosen = remaining.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      cumulative += weights[remaining[i]];
      if (u < cumulative) {
        chosen = i;
        break;
      }
    }
    drawn.push_back(remaining[chosen]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return drawn;
}

double KingTree::predict(const Dataset& data, std::size_t row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const Node& node = nodes[i];
    i = static_cast<std::size_t>(
        data.x(row, static_cast<std::size_t>(node.variable)) < node.threshold ? node.left
                                                                               : node.right);
  }
  return nodes[i].value;
}

double KingTree::predict_with(const Dataset& data, std::size_t row, std::size_t variable,
                              double value) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const Node& node = nodes[i];
    const auto v = static_cast<std::size_t>(node.variable);
    const double x = v == variable ? value : data.x(row, v);
    i = static_cast<std::size_t>(x < node.threshold ? node.left : node.right);
  }
  return nodes[i].value;
}

std::vector<std::size_t> KingTree::split_variables() const {
  std::vector<std::size_t> vars;
  for (const auto& node : nodes)
    if (!node.is_leaf()) vars.push_back(static_cast<std::size_t>(node.variable));
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

bool KingTree::splits_on(std::size_t variable) const {
  return std::any_of(nodes.begin(), nodes.end(), [variable](const Node& node) {
    return node.variable == static_cast<int>(variable);
  });
}

KingTree build_tree(const Dataset& data, const GrowSpec& spec, Rng& rng) {
  validate(data, spec);
  KingTree tree;
  tree.king = spec.king;
  const std::size_t n = data.n();
  if (spec.params.bootstrap) {
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    tree.inbag.resize(n);
    for (auto& r : tree.inbag) r = pick(rng);
    std::sort(tree.inbag.begin(), tree.inbag.end());
    std::vector<char> seen(n, 0);
    for (auto r : tree.inbag) seen[r] = 1;
    for (std::uint32_t r = 0; r < n; ++r)
      if (!seen[r]) tree.oob.push_back(r);
  } else {
    tree.inbag.resize(n);
    std::iota(tree.inbag.begin(), tree.inbag.end(), 0u);
  }
  tree.nodes = Grower(data, spec, rng).grow(tree.inbag);
  g_trees_built.fetch_add(1, std::memory_order_relaxed);
  return tree;
}

KingForest build_forest(const Dataset& data, const GrowSpec& spec, std::size_t n_trees,
                        const SeedContext& seeds) {
  validate(data, spec);
  KingForest forest = forest_shell(spec, n_trees);
  parallel_for(n_trees, [&](std::size_t j) {
    Rng rng = seeds.stream(j);
    forest.trees[j] = build_tree(data, spec, rng);
  });
  return forest;
}

namespace serial {
KingForest build_forest(const Dataset& data, const GrowSpec& spec, std::size_t n_trees,
                        const SeedContext& seeds) {
  validate(data, spec);
  KingForest forest = forest_shell(spec, n_trees);
  for (std::size_t j = 0; j < n_trees; ++j) {
    Rng rng = seeds.stream(j);
    forest.trees[j] = build_tree(data, spec, rng);
  }
  return forest;
}
}  // namespace serial

void for_each_path(const KingTree& tree, int depth,
                   const std::function<void(std::span<const std::size_t>)>& visit) {
  if (tree.nodes.empty() || depth < 1) return;
  std::vector<std::size_t> stack;
  auto walk = [&](auto&& self, int index) -> void {
    const Node& node = tree.nodes[static_cast<std::size_t>(index)];
    if (node.is_leaf()) return;
    stack.push_back(static_cast<std::size_t>(node.variable));
    if (node.depth == depth) {
      visit(stack);
    } else {
      self(self, node.left);
      self(self, node.right);
    }
    stack.pop_back();
  };
  walk(walk, 0);
}

std::vector<PathRecord> extract_paths(const KingForest& forest, int depth) {
  std::map<std::vector<std::size_t>, std::size_t> counts;
  for (const auto& tree : forest.trees) {
    for_each_path(tree, depth, [&](std::span<const std::size_t> vars) {
      ++counts[std::vector<std::size_t>(vars.begin(), vars.end())];
    });
  }
  std::vector<PathRecord> records;
  records.reserve(counts.size());
  for (auto& [vars, count] : counts) records.push_back(PathRecord{vars, count, 0.0});
  return records;
}

std::string dump_tree(const KingTree& tree, const std::vector<std::string>& names) {
  std::ostringstream out;
  for (const auto& node : tree.nodes) {
    out << std::string(static_cast<std::size_t>(2 * (node.depth - 1)), ' ') << '[' << node.depth
        << "] ";
    if (node.is_leaf()) {
      out << "leaf " << io::format_double(node.value);
    } else {
      out << names.at(static_cast<std::size_t>(node.variable)) << " < "
          << io::format_double(node.threshold);
    }
    out << " (n=" << node.samples << ")\n";
  }
  return out.str();
}

namespace diagnostics {
std::uint64_t trees_built() noexcept { return g_trees_built.load(); }
void reset_trees_built() noexcept { g_trees_built.store(0); }
}  // namespace diagnostics

}  // namespace ikf
