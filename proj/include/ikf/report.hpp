#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ikf/data.hpp"
#include "ikf/experiment.hpp"
#include "ikf/ikf.hpp"
#include "ikf/kings.hpp"

namespace ikf {

/// Dataset facts a report needs to be rendered on its own.
struct ReportMeta {
  std::vector<std::string> names;
  Task task = Task::Regression;
  std::size_t n = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

struct CsvTable {
  std::string filename;
  std::string contents;
};

std::string build_description();

nlohmann::ordered_json params_to_json(const IkfParams& params);

nlohmann::ordered_json to_json(const KingReport& report, const std::vector<std::string>& names);
KingReport king_report_from_json(const nlohmann::ordered_json& j,
                                 const std::vector<std::string>& names);

nlohmann::ordered_json to_json(const IkfReport& report, const ReportMeta& meta);
/// Inverse of to_json except for each King's full path universe, which is
/// not serialized.
IkfReport report_from_json(const nlohmann::ordered_json& j, ReportMeta& meta);

/// ranking.csv, king_pvims.csv, king_pvims_sum.csv, paths_depth<d>.csv,
/// interactions.csv.
std::vector<CsvTable> report_tables(const IkfReport& report, const std::vector<std::string>& names);

/// report.json plus every table, each written atomically. Returns the paths.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir,
                                                const IkfReport& report, const ReportMeta& meta);

/// mrs_quantiles.csv, recovery.csv, selection.csv.
std::vector<CsvTable> experiment_tables(const ExperimentResult& result);
nlohmann::ordered_json experiment_manifest(const ExperimentResult& result, const IkfParams& params);
std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir,
                                                    const ExperimentResult& result,
                                                    const IkfParams& params);

}  // namespace ikf
