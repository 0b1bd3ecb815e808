#include "ikf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ikf {

std::size_t mrs(std::span<const std::size_t> ranking, std::span<const std::size_t> truth) {
  std::size_t worst = 0;
  for (auto t : truth) {
    auto it = std::find(ranking.begin(), ranking.end(), t);
    if (it == ranking.end()) throw std::invalid_argument("truth variable absent from ranking");
    worst = std::max(worst, static_cast<std::size_t>(it - ranking.begin()) + 1);
  }
  return worst;
}

bool interaction_hit(std::span<const PathRecord> records, std::span<const std::size_t> target) {
  std::vector<std::size_t> want(target.begin(), target.end());
  std::sort(want.begin(), want.end());
  for (const auto& rec : records) {
    if (rec.vars.size() != want.size()) continue;
    auto have = rec.vars;
    std::sort(have.begin(), have.end());
    if (have == want) return true;
  }
  return false;
}

bool interaction_hit(const IkfReport& report, std::span<const std::size_t> target) {
  const int depth = static_cast<int>(target.size());
  for (auto metric : {PathMetric::PvimSum, PathMetric::ReproductionCount}) {
    if (interaction_hit(report.concatenated_shortlist(depth, metric), target)) return true;
  }
  return false;
}

std::vector<bool> selected_within(std::span<const std::size_t> ranking,
                                  std::span<const std::size_t> truth, std::size_t size) {
  const auto end = ranking.begin() + static_cast<std::ptrdiff_t>(std::min(size, ranking.size()));
  std::vector<bool> out;
  for (auto t : truth) out.push_back(std::find(ranking.begin(), end, t) != end);
  return out;
}

std::size_t nearest_rank_quantile(std::vector<std::size_t> values, int percent) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (percent < 1 || percent > 100) throw std::invalid_argument("percent must be in 1..100");
  std::sort(values.begin(), values.end());
  const std::size_t count = values.size();
  std::size_t rank = (static_cast<std::size_t>(percent) * count + 99) / 100;
  rank = std::clamp<std::size_t>(rank, 1, count);
  return values[rank - 1];
}

std::size_t model_size_d1(std::size_t n) {
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(nd / (2.0 * std::log(nd))));
}

std::size_t model_size_d2(std::size_t n) {
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(nd / std::log(nd)));
}

}  // namespace ikf
