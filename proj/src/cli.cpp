#include "ikf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "ikf/data.hpp"
#include "ikf/experiment.hpp"
#include "ikf/ikf.hpp"
#include "ikf/io.hpp"
#include "ikf/parallel.hpp"
#include "ikf/report.hpp"
#include "ikf/scenarios.hpp"

namespace ikf::cli {
namespace {

namespace fs = std::filesystem;

/// Configuration errors detected after parsing.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<double> alpha;
  std::optional<std::size_t> stop_size;
  std::optional<std::size_t> max_kings;
  std::optional<std::string> first_king;
  std::optional<std::size_t> n_trees;
  std::optional<int> max_depth;
  std::optional<int> n_iter;
  std::optional<std::size_t> n_candidates;
  std::optional<std::size_t> n_top;
  std::optional<std::size_t> mtry;
  std::optional<std::size_t> min_leaf;
  std::optional<bool> bootstrap;
  std::optional<std::size_t> n_permutations;
  std::optional<std::string> pvim_sum_mode;
  std::optional<double> tau_main;
  std::optional<double> tau_dir;
  std::optional<double> tau_order;
  bool restrict_to_survivors = false;
  bool bio_profile = false;
};

struct Settings {
  Overrides params;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output_dir;
  std::string response = "y";
  std::string task = "regression";
  std::string scenario = "A1";
  std::string method = "ikf";
  std::size_t replications = 20;
  std::size_t n = 200;
  std::size_t p = 500;
  double s = 2.0;
};

void add_shared_options(CLI::App& app, Settings& st) {
  auto& o = st.params;
  app.add_option("--alpha", o.alpha, "Fraction of variables removed per King [0.5]");
  app.add_option("--stop-size", o.stop_size, "Stop once at most K variables survive [max(10, ceil(0.02p))]");
  app.add_option("--max-kings", o.max_kings, "Upper bound on the number of Kings");
  app.add_option("--first-king", o.first_king, "auto, random, or a variable name / 1-based index [auto]");
  app.add_option("--n-trees", o.n_trees, "Trees per forest N [100]");
  app.add_option("--max-depth", o.max_depth, "Maximum tree depth D [4; 5 for B scenarios]");
  app.add_option("--n-iter", o.n_iter, "Weight-update iterations N_iter [7]");
  app.add_option("--n-candidates", o.n_candidates, "Candidate pool size N_c [floor(n/(2 ln n))]");
  app.add_option("--n-top", o.n_top, "Shortlist length N_top [20]");
  app.add_option("--mtry", o.mtry, "Candidates drawn per split [ceil(sqrt(pool))]");
  app.add_option("--min-leaf", o.min_leaf, "Minimum samples per leaf [5]");
  app.add_option("--bootstrap", o.bootstrap, "Bootstrap rows per tree [true]");
  app.add_option("--n-permutations", o.n_permutations, "Permutations averaged per PVIM [1]");
  app.add_option("--pvim-sum-mode", o.pvim_sum_mode, "per-occurrence or per-tree [per-occurrence]");
  app.add_option("--tau-main", o.tau_main, "Main-effect threshold [max(0.25 * max depth-1 PVIM, tau-dir)]");
  app.add_option("--tau-dir", o.tau_dir, "Direction threshold [1e-6]");
  app.add_option("--tau-order", o.tau_order, "Order-inference threshold [max(0.1 * profile peak, tau-dir)]");
  app.add_flag("--restrict-to-survivors", o.restrict_to_survivors,
               "Rank each King's weights over the current survivors only");
  app.add_flag("--bio-profile", o.bio_profile,
               "Preset N=200, D=5, N_iter=6, alpha=0.2, N_c=floor(p/2), N_top=30");

  app.add_option("--seed", st.seed, "Master seed [1]");
  app.add_option("--threads", st.threads, "Worker thread cap; 0 uses the OpenMP default [0]")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--output-dir", st.output_dir,
                 std::string("Output directory [$") + kOutputDirEnv + " or ikf_out]");
  app.add_option("--response", st.response, "Response column name or 0-based index [y]");
  app.add_option("--task", st.task, "regression or classification [regression]");
  app.add_option("--scenario", st.scenario, "Scenario A1..A5, B1..B5 [A1]");
  app.add_option("--method", st.method, "ikf or dcsis [ikf]");
  app.add_option("--replications", st.replications, "Benchmark replications [20]");
  app.add_option("--n", st.n, "Simulated sample size [200]");
  app.add_option("--p", st.p, "Simulated variable count [500]");
  app.add_option("--s", st.s, "Simulated signal scale [2]");
}

PvimSumMode parse_sum_mode(const std::string& text) {
  if (text == "per-occurrence") return PvimSumMode::PerOccurrence;
  if (text == "per-tree") return PvimSumMode::PerTree;
  throw ConfigError("pvim-sum-mode must be per-occurrence or per-tree, got '" + text + "'");
}

FirstKing parse_first_king(const std::string& text) {
  if (text == "auto") return {FirstKingMode::Auto, {}};
  if (text == "random") return {FirstKingMode::Random, {}};
  return {FirstKingMode::Named, text};
}

/// Applies the preset, then every explicit value. `p` sizes the preset's N_c.
IkfParams resolve_params(IkfParams base, const Overrides& o, std::size_t p) {
  if (o.bio_profile) {
    base.king.n_trees = 200;
    base.king.max_depth = 5;
    base.king.n_iter = 6;
    base.alpha = 0.2;
    base.king.n_candidates = std::max<std::size_t>(1, p / 2);
    base.king.n_top = 30;
  }
  if (o.alpha) base.alpha = *o.alpha;
  if (o.stop_size) base.stop_size = *o.stop_size;
  if (o.max_kings) base.max_kings = *o.max_kings;
  if (o.first_king) base.first_king = parse_first_king(*o.first_king);
  if (o.n_trees) base.king.n_trees = *o.n_trees;
  if (o.max_depth) base.king.max_depth = *o.max_depth;
  if (o.n_iter) base.king.n_iter = *o.n_iter;
  if (o.n_candidates) base.king.n_candidates = *o.n_candidates;
  if (o.n_top) base.king.n_top = *o.n_top;
  if (o.mtry) base.king.tree.mtry = *o.mtry;
  if (o.min_leaf) base.king.tree.min_leaf = *o.min_leaf;
  if (o.bootstrap) base.king.tree.bootstrap = *o.bootstrap;
  if (o.n_permutations) base.king.pvim.n_permutations = *o.n_permutations;
  if (o.pvim_sum_mode) base.king.sum_mode = parse_sum_mode(*o.pvim_sum_mode);
  if (o.tau_main) base.tau_main = *o.tau_main;
  if (o.tau_dir) base.tau_dir = *o.tau_dir;
  if (o.tau_order) base.tau_order = *o.tau_order;
  base.restrict_to_survivors = o.restrict_to_survivors;
  try {
    validate(base);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return base;
}

template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

fs::path output_dir(const Settings& st) {
  if (!st.output_dir.empty()) return st.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "ikf_out";
}

std::string join(const std::vector<std::size_t>& vars, const std::vector<std::string>& names,
                 const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (k) out += sep;
    out += names.at(vars[k]);
  }
  return out;
}

void print_summary(std::ostream& out, const IkfReport& report, const std::vector<std::string>& names) {
  out << "Kings (" << report.kings.size() << "):";
  for (const auto& k : report.kings) out << ' ' << names.at(k.king);
  out << '\n';
  out << "Top ranking:\n";
  const auto ranking = report.ranking();
  for (std::size_t r = 0; r < std::min<std::size_t>(10, ranking.size()); ++r)
    out << "  " << std::setw(2) << r + 1 << "  " << names.at(ranking[r]) << "  W="
        << io::format_double(report.W[ranking[r]]) << '\n';
  // Only interactions among the top-ranked variables; the full list is in interactions.csv.
  const std::vector<std::size_t> top(ranking.begin(),
                                     ranking.begin() + std::min<std::size_t>(10, ranking.size()));
  std::vector<const TypedInteraction*> shown;
  for (const auto& t : report.interactions)
    if (std::all_of(t.vars.begin(), t.vars.end(),
                    [&](std::size_t v) { return std::find(top.begin(), top.end(), v) != top.end(); }))
      shown.push_back(&t);
  out << "Interactions among the top 10 (" << shown.size() << " of " << report.interactions.size()
      << "):\n";
  for (const auto* tp : shown) {
    const auto& t = *tp;
    out << "  (" << join(t.vars, names, ", ") << ")  " << to_string(t.kind);
    if (!t.dominant.empty()) out << "  led by " << join(t.dominant, names, ", ");
    if (t.low_confidence) out << "  [low confidence]";
    out << '\n';
  }
}

int cmd_run(const Settings& st, const std::string& data_path, std::ostream& out) {
  const Task task = as_config([&] { return parse_task(st.task); });
  // Validate flags before touching the data so config errors win.
  resolve_params(IkfParams{}, st.params, 2);
  const Dataset data = load_csv(data_path, st.response, task);
  const IkfParams params = resolve_params(IkfParams{}, st.params, data.p());

  const IkfReport report = run_ikf(data, params, SeedContext(st.seed));

  ReportMeta meta;
  meta.names = data.names();
  meta.task = data.task();
  meta.n = data.n();
  meta.config = params_to_json(params);
  meta.config["seed"] = st.seed;
  meta.config["response"] = st.response;

  const fs::path dir = output_dir(st);
  fs::create_directories(dir);
  write_report(dir, report, meta);
  print_summary(out, report, data.names());
  out << "Report written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const Settings& st, const std::string& out_path, std::ostream& out) {
  const Scenario sc = as_config([&] { return Scenario::make(parse_scenario(st.scenario), st.n, st.p, st.s); });
  const Dataset data = generate(sc, st.seed);
  fs::path path = out_path.empty() ? output_dir(st) / (to_string(sc.id) + ".csv") : fs::path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_csv(data, path, "y");
  out << "Wrote " << data.n() << " rows x " << data.p() + 1 << " columns to " << path.string() << '\n';
  return kExitOk;
}

int cmd_bench(const Settings& st, std::ostream& out) {
  const Scenario sc = as_config([&] { return Scenario::make(parse_scenario(st.scenario), st.n, st.p, st.s); });
  const Method method = as_config([&] { return parse_method(st.method); });
  if (st.replications < 1) throw ConfigError("replications must be >= 1");
  const IkfParams params = resolve_params(scenario_defaults(sc), st.params, sc.p);

  ExperimentOptions options;
  options.replications = st.replications;
  options.seed = st.seed;
  const ExperimentResult result = run_experiment(sc, method, params, options);

  const fs::path dir = output_dir(st);
  fs::create_directories(dir);
  write_experiment(dir, result, params);

  out << "scenario method q5 q25 q50 q75 q95\n";
  out << to_string(sc.id) << ' ' << to_string(method);
  for (auto q : result.mrs_quantiles) out << ' ' << q;
  out << '\n';
  if (result.orr) out << "ORR " << io::format_double(*result.orr) << '\n';
  out << "Results written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_report(const Settings& st, const std::string& report_path, std::ostream& out) {
  const auto text = io::read_file(report_path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(report_path + ": " + e.what());
  }
  ReportMeta meta;
  IkfReport report;
  try {
    report = report_from_json(j, meta);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(report_path + ": " + e.what());
  }
  const fs::path dir = st.output_dir.empty() ? fs::path(report_path).parent_path() : fs::path(st.output_dir);
  if (!dir.empty()) fs::create_directories(dir);
  for (const auto& t : report_tables(report, meta.names)) io::write_file_atomic(dir / t.filename, t.contents);
  print_summary(out, report, meta.names);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings st;
  CLI::App app{"Iterative Kings' Forests: variable selection and interaction discovery", "ikf"};
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  add_shared_options(app, st);

  std::string data_path;
  auto* run_cmd = app.add_subcommand("run", "Run iKF on a CSV dataset");
  run_cmd->add_option("data", data_path, "CSV file with a header row")->required();
  run_cmd->fallthrough();

  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated scenario dataset as CSV");
  sim_cmd->add_option("--out", sim_out, "Output CSV path [<output-dir>/<scenario>.csv]");
  sim_cmd->fallthrough();

  auto* bench_cmd = app.add_subcommand("bench", "Run replications of a simulation scenario");
  bench_cmd->fallthrough();

  std::string report_path;
  auto* report_cmd = app.add_subcommand("report", "Re-render CSV tables from a report.json");
  report_cmd->add_option("report", report_path, "Path to report.json")->required();
  report_cmd->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    set_thread_count(st.threads);
    if (*run_cmd) return cmd_run(st, data_path, out);
    if (*sim_cmd) return cmd_simulate(st, sim_out, out);
    if (*bench_cmd) return cmd_bench(st, out);
    if (*report_cmd) return cmd_report(st, report_path, out);
  } catch (const ConfigError& e) {
    err << "ikf: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "ikf: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ikf::cli
