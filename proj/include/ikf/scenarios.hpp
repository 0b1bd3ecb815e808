#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ikf/data.hpp"

namespace ikf {

enum class ScenarioId { A1, A2, A3, A4, A5, B1, B2, B3, B4, B5 };

std::string to_string(ScenarioId id);
ScenarioId parse_scenario(const std::string& text);

/// Simulated design: x and e i.i.d. N(0,1), y from the scenario formula
/// with signal scale s. Variables are 0-based (x1 is index 0).
struct Scenario {
  ScenarioId id = ScenarioId::A1;
  std::size_t n = 200;
  std::size_t p = 500;
  double s = 2.0;
  std::vector<std::size_t> truth;
  std::vector<std::vector<std::size_t>> interactions;

  static Scenario make(ScenarioId id, std::size_t n, std::size_t p, double s = 2.0);
  bool is_pairwise() const noexcept;  ///< A-family.
  int interaction_order() const noexcept { return is_pairwise() ? 2 : 3; }
};

/// Noise-free response for one row given x1..x7 (x[0] is x1).
double scenario_signal(ScenarioId id, double s, std::span<const double, 7> x);

/// Columns are drawn from per-column streams, so two scenarios generated
/// with the same seed and sizes share the x matrix.
Dataset generate(const Scenario& scenario, std::uint64_t seed);

}  // namespace ikf
