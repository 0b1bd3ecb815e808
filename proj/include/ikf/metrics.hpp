#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ikf/forest.hpp"
#include "ikf/ikf.hpp"

namespace ikf {

/// Smallest prefix of `ranking` holding every truth variable.
/// Throws std::invalid_argument if a truth variable is missing.
std::size_t mrs(std::span<const std::size_t> ranking, std::span<const std::size_t> truth);

/// True iff some record's variable set equals `target` (order ignored).
bool interaction_hit(std::span<const PathRecord> records, std::span<const std::size_t> target);

/// Searches both depth-|target| shortlists of every King.
bool interaction_hit(const IkfReport& report, std::span<const std::size_t> target);

/// Whether each truth variable is among the first `size` ranked variables.
std::vector<bool> selected_within(std::span<const std::size_t> ranking,
                                  std::span<const std::size_t> truth, std::size_t size);

/// Nearest-rank (inverse empirical CDF) percentile; `percent` in 1..100.
std::size_t nearest_rank_quantile(std::vector<std::size_t> values, int percent);

inline constexpr std::array<int, 5> kMrsPercents{5, 25, 50, 75, 95};

/// floor(n / (2 ln n)) and floor(n / ln n).
std::size_t model_size_d1(std::size_t n);
std::size_t model_size_d2(std::size_t n);

}  // namespace ikf
