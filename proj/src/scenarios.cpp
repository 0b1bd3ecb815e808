#include "ikf/scenarios.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ikf/rng.hpp"

namespace ikf {

namespace {
double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }
}  // namespace

std::string to_string(ScenarioId id) {
  static constexpr std::array<const char*, 10> names{"A1", "A2", "A3", "A4", "A5",
                                                     "B1", "B2", "B3", "B4", "B5"};
  return names[static_cast<std::size_t>(id)];
}

ScenarioId parse_scenario(const std::string& text) {
  for (int i = 0; i <= static_cast<int>(ScenarioId::B5); ++i) {
    const auto id = static_cast<ScenarioId>(i);
    std::string name = to_string(id);
    std::string lower = name;
    lower[0] = static_cast<char>(lower[0] - 'A' + 'a');
    if (text == name || text == lower) return id;
  }
  throw std::invalid_argument("unknown scenario '" + text + "' (expected A1..A5 or B1..B5)");
}

bool Scenario::is_pairwise() const noexcept { return id <= ScenarioId::A5; }

Scenario Scenario::make(ScenarioId id, std::size_t n, std::size_t p, double s) {
  Scenario sc;
  sc.id = id;
  sc.n = n;
  sc.p = p;
  sc.s = s;
  if (sc.is_pairwise()) {
    if (p < 7) throw std::invalid_argument("A-scenarios need p >= 7");
    sc.truth = {0, 2, 4, 6};
    sc.interactions = {{0, 2}, {4, 6}};
  } else {
    if (p < 5) throw std::invalid_argument("B-scenarios need p >= 5");
    sc.truth = {0, 2, 4};
    sc.interactions = {{0, 2, 4}};
  }
  if (n < 2) throw std::invalid_argument("scenario needs n >= 2");
  return sc;
}

double scenario_signal(ScenarioId id, double s, std::span<const double, 7> x) {
  const double x1 = x[0], x3 = x[2], x5 = x[4], x7 = x[6];
  switch (id) {
    case ScenarioId::A1: return s * x1 * x3 - s * x5 * (x7 < 0.2 ? 1.0 : 0.0);
    case ScenarioId::A2:
      return 2.0 * s * x1 * std::sin(x3) + 2.0 * s * x5 * std::cos(x7 + std::numbers::pi / 2.0);
    case ScenarioId::A3: return s * std::exp(x1) * x3 / 2.0 - s * std::log(5.0 * std::abs(x5)) * x7;
    case ScenarioId::A4: return s * x1 * x3 * x3 / 2.0 - s * sign(x5) * x7 * x7;
    case ScenarioId::A5: return s * x1 * x3 + 1.5 * s * x5 * std::sin(x7);
    case ScenarioId::B1: return s * x1 * (1.0 + x3) * (1.0 + x3) * std::sin(x5);
    case ScenarioId::B2: return s * x1 * std::log(5.0 * std::abs(1.0 + x3)) * std::sin(x5);
    case ScenarioId::B3: return s * x1 * sign(1.0 + x3) * std::sin(x5);
    case ScenarioId::B4: return s * x1 * x3 * std::sin(x5);
    case ScenarioId::B5: return s * x1 * x3 * x5;
  }
  return 0.0;
}

Dataset generate(const Scenario& scenario, std::uint64_t seed) {
  const std::size_t n = scenario.n;
  const std::size_t p = scenario.p;
  const SeedContext root(seed);
  const SeedContext x_seeds = root.child(1);
  std::vector<double> x(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    Rng rng = x_seeds.stream(j);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) x[j * n + i] = normal(rng);
  }
  Rng noise = root.child(2).stream(0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(n);
  std::array<double, 7> row{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 7; ++j) row[j] = j < p ? x[j * n + i] : 0.0;
    y[i] = scenario_signal(scenario.id, scenario.s, row) + normal(noise);
  }
  return Dataset(std::move(x), n, p, std::move(y), Task::Regression);
}

}  // namespace ikf
