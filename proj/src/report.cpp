#include "ikf/report.hpp"

#include <sstream>
#include <stdexcept>

#include "ikf/io.hpp"

#ifndef IKF_BUILD_DESCRIBE
#define IKF_BUILD_DESCRIBE "unknown"
#endif

namespace ikf {

using ojson = nlohmann::ordered_json;

namespace {

std::string sum_mode_name(PvimSumMode m) {
  return m == PvimSumMode::PerOccurrence ? "per-occurrence" : "per-tree";
}

std::string first_king_name(const FirstKing& fk) {
  switch (fk.mode) {
    case FirstKingMode::Named: return fk.name;
    case FirstKingMode::Random: return "random";
    case FirstKingMode::Auto: return "auto";
  }
  return "auto";
}

ojson names_of(const std::vector<std::size_t>& vars, const std::vector<std::string>& names) {
  ojson out = ojson::array();
  for (auto v : vars) out.push_back(names.at(v));
  return out;
}

std::size_t index_in(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw std::runtime_error("report refers to unknown variable '" + name + "'");
}

std::vector<std::size_t> indices_of(const ojson& arr, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& v : arr) out.push_back(index_in(names, v.get<std::string>()));
  return out;
}

ojson path_json(const PathRecord& rec, std::size_t rank, const std::vector<std::string>& names) {
  ojson j;
  j["rank"] = rank;
  j["vars"] = names_of(rec.vars, names);
  j["count"] = rec.reproduction_count;
  j["pvim_sum"] = rec.pvim_sum;
  j["avg_pvim"] = rec.avg_pvim();
  return j;
}

PathRecord path_from_json(const ojson& j, const std::vector<std::string>& names) {
  PathRecord rec;
  rec.vars = indices_of(j.at("vars"), names);
  rec.reproduction_count = j.at("count").get<std::size_t>();
  rec.pvim_sum = j.at("pvim_sum").get<double>();
  return rec;
}

std::string join_names(const std::vector<std::size_t>& vars, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (k) out += ' ';
    out += names.at(vars[k]);
  }
  return out;
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += io::quote_csv_field(f);
    first = false;
  }
  out += '\n';
  return out;
}

std::string num(double v) { return io::format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

}  // namespace

std::string build_description() { return IKF_BUILD_DESCRIBE; }

ojson params_to_json(const IkfParams& params) {
  ojson j;
  j["alpha"] = params.alpha;
  j["stop_size"] = params.stop_size;
  j["max_kings"] = params.max_kings ? ojson(*params.max_kings) : ojson(nullptr);
  j["first_king"] = first_king_name(params.first_king);
  j["n_trees"] = params.king.n_trees;
  j["max_depth"] = params.king.max_depth;
  j["n_iter"] = params.king.n_iter;
  j["n_candidates"] = params.king.n_candidates;
  j["n_top"] = params.king.n_top;
  j["mtry"] = params.king.tree.mtry;
  j["min_leaf"] = params.king.tree.min_leaf;
  j["bootstrap"] = params.king.tree.bootstrap;
  j["n_permutations"] = params.king.pvim.n_permutations;
  j["pvim_sum_mode"] = sum_mode_name(params.king.sum_mode);
  j["tau_main"] = params.tau_main ? ojson(*params.tau_main) : ojson(nullptr);
  j["tau_dir"] = params.tau_dir;
  j["tau_order"] = params.tau_order ? ojson(*params.tau_order) : ojson(nullptr);
  j["restrict_to_survivors"] = params.restrict_to_survivors;
  return j;
}

ojson to_json(const KingReport& report, const std::vector<std::string>& names) {
  ojson j;
  j["king"] = names.at(report.king);
  j["weights"] = report.weights;
  j["pvim_profile"] = report.pvim_profile;
  j["pvim_profile_sum"] = report.pvim_profile_sum;
  j["pool"] = names_of(report.pool, names);
  j["n_trees"] = report.n_trees;
  j["empty_oob_trees"] = report.empty_oob_trees;
  ojson lists = ojson::object();
  for (const auto& s : report.shortlists) {
    ojson by_pvim = ojson::array();
    ojson by_count = ojson::array();
    for (std::size_t r = 0; r < s.by_pvim.size(); ++r) by_pvim.push_back(path_json(s.by_pvim[r], r + 1, names));
    for (std::size_t r = 0; r < s.by_count.size(); ++r) by_count.push_back(path_json(s.by_count[r], r + 1, names));
    lists[std::to_string(s.depth)] = ojson{{"pvim_sum", by_pvim}, {"count", by_count}};
  }
  j["shortlists"] = lists;
  return j;
}

KingReport king_report_from_json(const ojson& j, const std::vector<std::string>& names) {
  KingReport r;
  r.king = index_in(names, j.at("king").get<std::string>());
  r.weights = j.at("weights").get<std::vector<double>>();
  r.pvim_profile = j.at("pvim_profile").get<std::vector<double>>();
  r.pvim_profile_sum = j.at("pvim_profile_sum").get<std::vector<double>>();
  r.pool = indices_of(j.at("pool"), names);
  r.n_trees = j.at("n_trees").get<std::size_t>();
  r.empty_oob_trees = j.at("empty_oob_trees").get<std::size_t>();
  for (const auto& [depth, lists] : j.at("shortlists").items()) {
    PathShortlist s;
    s.depth = std::stoi(depth);
    for (const auto& rec : lists.at("pvim_sum")) s.by_pvim.push_back(path_from_json(rec, names));
    for (const auto& rec : lists.at("count")) s.by_count.push_back(path_from_json(rec, names));
    r.shortlists.push_back(std::move(s));
  }
  return r;
}

ojson to_json(const IkfReport& report, const ReportMeta& meta) {
  const auto& names = meta.names;
  ojson j;
  j["format"] = "ikf-report/1";
  j["task"] = to_string(meta.task);
  j["n"] = meta.n;
  j["p"] = names.size();
  j["names"] = names;
  j["config"] = meta.config;
  j["stop_size"] = report.stop_size;
  j["W"] = report.W;
  j["ranking"] = names_of(report.ranking(), names);
  ojson trace = ojson::array();
  for (const auto& s : report.survived) trace.push_back(names_of(s, names));
  j["survived_trace"] = trace;
  j["thresholds"] = ojson{{"tau_main", report.thresholds.tau_main}, {"tau_dir", report.thresholds.tau_dir}};
  ojson kings = ojson::array();
  for (std::size_t k = 0; k < report.kings.size(); ++k) {
    ojson kj = to_json(report.kings[k], names);
    kj["orders"] = k < report.orders.size() ? ojson(report.orders[k]) : ojson::array();
    kj["order_tau"] = k < report.order_taus.size() ? report.order_taus[k] : 0.0;
    kings.push_back(kj);
  }
  j["kings"] = kings;
  ojson typed = ojson::array();
  for (const auto& t : report.interactions) {
    ojson tj;
    tj["vars"] = names_of(t.vars, names);
    tj["order"] = t.order;
    tj["kind"] = to_string(t.kind);
    tj["dominant"] = names_of(t.dominant, names);
    tj["low_confidence"] = t.low_confidence;
    ojson dirs = ojson::array();
    for (const auto& d : t.directions) {
      dirs.push_back(ojson{{"lead", names.at(d.lead)},
                           {"observed", d.observed},
                           {"count", d.count},
                           {"pvim_sum", d.pvim_sum},
                           {"avg_pvim", d.avg_pvim}});
    }
    tj["directions"] = dirs;
    ojson mains = ojson::array();
    for (const auto& m : t.main_pvims) mains.push_back(m ? ojson(*m) : ojson(nullptr));
    tj["main_pvims"] = mains;
    tj["tau_main"] = t.thresholds.tau_main;
    tj["tau_dir"] = t.thresholds.tau_dir;
    typed.push_back(tj);
  }
  j["interactions"] = typed;
  return j;
}

IkfReport report_from_json(const ojson& j, ReportMeta& meta) {
  if (j.value("format", "") != "ikf-report/1") throw std::runtime_error("not an ikf report document");
  meta.names = j.at("names").get<std::vector<std::string>>();
  meta.task = parse_task(j.at("task").get<std::string>());
  meta.n = j.at("n").get<std::size_t>();
  meta.config = j.at("config");
  const auto& names = meta.names;

  IkfReport r;
  r.stop_size = j.at("stop_size").get<std::size_t>();
  r.W = j.at("W").get<std::vector<double>>();
  for (const auto& s : j.at("survived_trace")) r.survived.push_back(indices_of(s, names));
  r.thresholds.tau_main = j.at("thresholds").at("tau_main").get<double>();
  r.thresholds.tau_dir = j.at("thresholds").at("tau_dir").get<double>();
  for (const auto& kj : j.at("kings")) {
    r.kings.push_back(king_report_from_json(kj, names));
    r.orders.push_back(kj.at("orders").get<std::vector<int>>());
    r.order_taus.push_back(kj.at("order_tau").get<double>());
  }
  for (const auto& tj : j.at("interactions")) {
    TypedInteraction t;
    t.vars = indices_of(tj.at("vars"), names);
    t.order = tj.at("order").get<int>();
    t.kind = parse_interaction_kind(tj.at("kind").get<std::string>());
    t.dominant = indices_of(tj.at("dominant"), names);
    t.low_confidence = tj.at("low_confidence").get<bool>();
    for (const auto& dj : tj.at("directions")) {
      DirectionEvidence d;
      d.lead = index_in(names, dj.at("lead").get<std::string>());
      d.observed = dj.at("observed").get<bool>();
      d.count = dj.at("count").get<std::size_t>();
      d.pvim_sum = dj.at("pvim_sum").get<double>();
      d.avg_pvim = dj.at("avg_pvim").get<double>();
      t.directions.push_back(d);
    }
    for (const auto& m : tj.at("main_pvims"))
      t.main_pvims.push_back(m.is_null() ? std::nullopt : std::optional<double>(m.get<double>()));
    t.thresholds.tau_main = tj.at("tau_main").get<double>();
    t.thresholds.tau_dir = tj.at("tau_dir").get<double>();
    r.interactions.push_back(std::move(t));
  }
  return r;
}

std::vector<CsvTable> report_tables(const IkfReport& report, const std::vector<std::string>& names) {
  std::vector<CsvTable> tables;

  std::string ranking = csv_row({"rank", "variable", "W"});
  const auto order = report.ranking();
  for (std::size_t r = 0; r < order.size(); ++r)
    ranking += csv_row({num(r + 1), names.at(order[r]), num(report.W[order[r]])});
  tables.push_back({"ranking.csv", ranking});

  std::size_t max_depth = 0;
  for (const auto& k : report.kings) max_depth = std::max(max_depth, k.pvim_profile.size());
  auto profile_table = [&](bool sum) {
    std::string out = "king";
    for (std::size_t d = 1; d <= max_depth; ++d) out += ",d" + std::to_string(d);
    out += '\n';
    for (const auto& k : report.kings) {
      out += io::quote_csv_field(names.at(k.king));
      const auto& prof = sum ? k.pvim_profile_sum : k.pvim_profile;
      for (std::size_t d = 0; d < max_depth; ++d) out += "," + (d < prof.size() ? num(prof[d]) : std::string());
      out += '\n';
    }
    return out;
  };
  tables.push_back({"king_pvims.csv", profile_table(false)});
  tables.push_back({"king_pvims_sum.csv", profile_table(true)});

  for (std::size_t d = 2; d <= max_depth; ++d) {
    std::string out = "king,metric,rank";
    for (std::size_t k = 1; k <= d; ++k) out += ",depth_" + std::to_string(k);
    out += ",count,pvim_sum,avg_pvim\n";
    for (const auto& k : report.kings) {
      const auto* s = k.shortlist_at(static_cast<int>(d));
      if (!s) continue;
      for (auto [metric, list] : {std::pair{"pvim_sum", &s->by_pvim}, std::pair{"count", &s->by_count}}) {
        for (std::size_t r = 0; r < list->size(); ++r) {
          const auto& rec = (*list)[r];
          out += io::quote_csv_field(names.at(k.king)) + "," + metric + "," + num(r + 1);
          for (auto v : rec.vars) out += "," + io::quote_csv_field(names.at(v));
          out += "," + num(rec.reproduction_count) + "," + num(rec.pvim_sum) + "," + num(rec.avg_pvim()) + "\n";
        }
      }
    }
    tables.push_back({"paths_depth" + std::to_string(d) + ".csv", out});
  }

  std::string typed = csv_row({"interaction", "order", "kind", "dominant", "low_confidence", "lead",
                               "observed", "repetitions", "avg_pvim", "lead_depth1_pvim"});
  for (const auto& t : report.interactions) {
    for (std::size_t m = 0; m < t.directions.size(); ++m) {
      const auto& d = t.directions[m];
      const auto& main = m < t.main_pvims.size() ? t.main_pvims[m] : std::nullopt;
      typed += csv_row({join_names(t.vars, names), num(static_cast<std::size_t>(t.order)), to_string(t.kind),
                        join_names(t.dominant, names), t.low_confidence ? "1" : "0", names.at(d.lead),
                        d.observed ? "1" : "0", num(d.count), num(d.avg_pvim), main ? num(*main) : ""});
    }
  }
  tables.push_back({"interactions.csv", typed});
  return tables;
}

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir,
                                                const IkfReport& report, const ReportMeta& meta) {
  std::vector<std::filesystem::path> written;
  const auto json_path = dir / "report.json";
  io::write_file_atomic(json_path, to_json(report, meta).dump(2) + "\n");
  written.push_back(json_path);
  for (const auto& t : report_tables(report, meta.names)) {
    io::write_file_atomic(dir / t.filename, t.contents);
    written.push_back(dir / t.filename);
  }
  return written;
}

std::vector<CsvTable> experiment_tables(const ExperimentResult& result) {
  const std::string scenario = to_string(result.scenario.id);
  const std::string method = to_string(result.method);
  std::vector<CsvTable> tables;

  std::string q = csv_row({"scenario", "method", "n", "p", "replications", "q5", "q25", "q50", "q75", "q95"});
  q += csv_row({scenario, method, num(result.scenario.n), num(result.scenario.p), num(result.replications),
                num(result.mrs_quantiles[0]), num(result.mrs_quantiles[1]), num(result.mrs_quantiles[2]),
                num(result.mrs_quantiles[3]), num(result.mrs_quantiles[4])});
  tables.push_back({"mrs_quantiles.csv", q});

  std::string rec = csv_row({"scenario", "method", "interaction", "rate"});
  if (result.method == Method::IKF) {
    for (std::size_t k = 0; k < result.irr.size(); ++k) {
      std::string label = "IRR_";
      for (auto v : result.scenario.interactions[k]) label += std::to_string(v + 1);
      rec += csv_row({scenario, method, label, num(result.irr[k])});
    }
    rec += csv_row({scenario, method, "ORR", num(result.orr.value_or(0.0))});
  }
  tables.push_back({"recovery.csv", rec});

  std::string sel = "scenario,method,size_label,size";
  for (auto v : result.scenario.truth) sel += ",x" + std::to_string(v + 1);
  sel += ",all\n";
  for (auto [label, size, ps, pa] : {std::tuple{"d1", result.d1, &result.ps_d1, result.pa_d1},
                                     std::tuple{"d2", result.d2, &result.ps_d2, result.pa_d2}}) {
    sel += scenario + "," + method + "," + label + "," + num(size);
    for (double v : *ps) sel += "," + num(v);
    sel += "," + num(pa) + "\n";
  }
  tables.push_back({"selection.csv", sel});
  return tables;
}

ojson experiment_manifest(const ExperimentResult& result, const IkfParams& params) {
  ojson j;
  j["format"] = "ikf-bench/1";
  j["build"] = build_description();
  j["scenario"] = ojson{{"id", to_string(result.scenario.id)},
                        {"n", result.scenario.n},
                        {"p", result.scenario.p},
                        {"s", result.scenario.s}};
  j["method"] = to_string(result.method);
  j["replications"] = result.replications;
  j["master_seed"] = result.seed;
  ojson seeds = ojson::array();
  for (const auto& o : result.outcomes) seeds.push_back(o.data_seed);
  j["data_seeds"] = seeds;
  if (result.method == Method::IKF) j["params"] = params_to_json(params);
  j["d1"] = result.d1;
  j["d2"] = result.d2;
  j["trees_built"] = result.trees_built;
  ojson mrs = ojson::array();
  for (const auto& o : result.outcomes) mrs.push_back(o.mrs);
  j["mrs"] = mrs;
  return j;
}

std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir,
                                                    const ExperimentResult& result,
                                                    const IkfParams& params) {
  std::vector<std::filesystem::path> written;
  for (const auto& t : experiment_tables(result)) {
    io::write_file_atomic(dir / t.filename, t.contents);
    written.push_back(dir / t.filename);
  }
  const auto manifest = dir / "manifest.json";
  io::write_file_atomic(manifest, experiment_manifest(result, params).dump(2) + "\n");
  written.push_back(manifest);
  return written;
}

}  // namespace ikf
