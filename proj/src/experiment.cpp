#include "ikf/experiment.hpp"

#include <algorithm>
#include <stdexcept>

#include "ikf/dcsis.hpp"
#include "ikf/forest.hpp"
#include "ikf/parallel.hpp"

namespace ikf {

std::string to_string(Method method) { return method == Method::IKF ? "ikf" : "dcsis"; }

Method parse_method(const std::string& text) {
  if (text == "ikf" || text == "IKF" || text == "iKF") return Method::IKF;
  if (text == "dcsis" || text == "DCSIS" || text == "dc-sis" || text == "DC-SIS") return Method::DCSIS;
  throw std::invalid_argument("unknown method '" + text + "' (expected ikf|dcsis)");
}

IkfParams scenario_defaults(const Scenario& scenario) {
  IkfParams params;
  params.alpha = 0.5;
  params.king.n_trees = 100;
  params.king.n_iter = 7;
  params.king.n_top = 20;
  params.king.max_depth = scenario.is_pairwise() ? 4 : 5;
  return params;
}

std::uint64_t replication_data_seed(std::uint64_t master, std::size_t replication) {
  return derive_seed(master, replication, 0, 0);
}

ExperimentResult run_experiment(const Scenario& scenario, Method method, const IkfParams& params,
                                const ExperimentOptions& options) {
  if (options.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (method == Method::IKF) validate(params);

  ExperimentResult result;
  result.scenario = scenario;
  result.method = method;
  result.replications = options.replications;
  result.seed = options.seed;
  result.d1 = model_size_d1(scenario.n);
  result.d2 = model_size_d2(scenario.n);
  result.outcomes.resize(options.replications);

  const std::uint64_t trees_before = diagnostics::trees_built();
  parallel_for(options.replications, [&](std::size_t r) {
    ReplicationOutcome& out = result.outcomes[r];
    out.data_seed = replication_data_seed(options.seed, r);
    const Dataset data = generate(scenario, out.data_seed);

    std::vector<std::size_t> ranking;
    if (method == Method::IKF) {
      IkfReport report = run_ikf(data, params, SeedContext(derive_seed(options.seed, r, 1, 0)));
      ranking = report.ranking();
      for (const auto& target : scenario.interactions)
        out.irr_hits.push_back(interaction_hit(report, target));
      out.orr = std::all_of(out.irr_hits.begin(), out.irr_hits.end(), [](bool b) { return b; });
      out.kings = report.kings.size();
      if (options.keep_reports) out.report = std::move(report);
    } else {
      ranking = dc_sis(data);
    }
    out.mrs = mrs(ranking, scenario.truth);
    out.selected_d1 = selected_within(ranking, scenario.truth, result.d1);
    out.selected_d2 = selected_within(ranking, scenario.truth, result.d2);
    ranking.resize(std::min(ranking.size(), result.d2));
    out.top_ranking = std::move(ranking);
  });
  result.trees_built = diagnostics::trees_built() - trees_before;

  const double reps = static_cast<double>(options.replications);
  std::vector<std::size_t> mrs_values;
  for (const auto& o : result.outcomes) mrs_values.push_back(o.mrs);
  for (std::size_t q = 0; q < kMrsPercents.size(); ++q)
    result.mrs_quantiles[q] = nearest_rank_quantile(mrs_values, kMrsPercents[q]);

  const std::size_t t = scenario.truth.size();
  result.ps_d1.assign(t, 0.0);
  result.ps_d2.assign(t, 0.0);
  for (const auto& o : result.outcomes) {
    for (std::size_t k = 0; k < t; ++k) {
      result.ps_d1[k] += o.selected_d1[k];
      result.ps_d2[k] += o.selected_d2[k];
    }
    auto all = [](const std::vector<bool>& v) { return std::all_of(v.begin(), v.end(), [](bool b) { return b; }); };
    result.pa_d1 += all(o.selected_d1);
    result.pa_d2 += all(o.selected_d2);
  }
  for (auto& v : result.ps_d1) v /= reps;
  for (auto& v : result.ps_d2) v /= reps;
  result.pa_d1 /= reps;
  result.pa_d2 /= reps;

  if (method == Method::IKF) {
    result.irr.assign(scenario.interactions.size(), 0.0);
    double orr = 0.0;
    for (const auto& o : result.outcomes) {
      for (std::size_t k = 0; k < o.irr_hits.size(); ++k) result.irr[k] += o.irr_hits[k];
      orr += o.orr;
    }
    for (auto& v : result.irr) v /= reps;
    result.orr = orr / reps;
  }
  return result;
}

}  // namespace ikf
