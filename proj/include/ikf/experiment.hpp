#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ikf/ikf.hpp"
#include "ikf/metrics.hpp"
#include "ikf/scenarios.hpp"

namespace ikf {

enum class Method { IKF, DCSIS };
std::string to_string(Method method);
Method parse_method(const std::string& text);

/// Simulation-study defaults for a scenario: N = 100, N_iter = 7,
/// alpha = 0.5, N_top = 20, D = 4 for the A-family and 5 for the B-family.
IkfParams scenario_defaults(const Scenario& scenario);

struct ExperimentOptions {
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  bool keep_reports = false;
};

struct ReplicationOutcome {
  std::uint64_t data_seed = 0;
  std::size_t mrs = 0;
  std::vector<std::size_t> top_ranking;  ///< first d2 variables.
  std::vector<bool> irr_hits;            ///< IKF only; one per true interaction.
  bool orr = false;
  std::vector<bool> selected_d1;
  std::vector<bool> selected_d2;
  std::size_t kings = 0;
  std::optional<IkfReport> report;
};

struct ExperimentResult {
  Scenario scenario;
  Method method = Method::IKF;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::array<std::size_t, 5> mrs_quantiles{};
  std::vector<double> irr;  ///< empty for DCSIS.
  std::optional<double> orr;
  std::vector<double> ps_d1;
  std::vector<double> ps_d2;
  double pa_d1 = 0.0;
  double pa_d2 = 0.0;
  std::uint64_t trees_built = 0;
  std::vector<ReplicationOutcome> outcomes;
};

/// Seeds for replication r: data from derive_seed(seed, r, 0, 0), method
/// randomness from derive_seed(seed, r, 1, 0). Replications run in
/// parallel; aggregation follows replication order.
ExperimentResult run_experiment(const Scenario& scenario, Method method, const IkfParams& params,
                                const ExperimentOptions& options);

/// Data seed of replication r, shared by every method for paired comparison.
std::uint64_t replication_data_seed(std::uint64_t master, std::size_t replication);

}  // namespace ikf
