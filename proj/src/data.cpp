#include "ikf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ikf/io.hpp"

namespace ikf {

std::string to_string(Task task) {
  return task == Task::Regression ? "regression" : "classification";
}

Task parse_task(const std::string& text) {
  if (text == "regression") return Task::Regression;
  if (text == "classification" || text == "binary") return Task::BinaryClassification;
  throw std::invalid_argument("unknown task '" + text + "' (expected regression|classification)");
}

Dataset::Dataset(std::vector<double> x_column_major, std::size_t n, std::size_t p,
                 std::vector<double> y, Task task, std::vector<std::string> names)
    : x_(std::move(x_column_major)), n_(n), p_(p), y_(std::move(y)), task_(task),
      names_(std::move(names)) {
  if (n_ < 2) throw DataError("dataset needs at least 2 samples");
  if (p_ < 1) throw DataError("dataset needs at least 1 variable");
  if (x_.size() != n_ * p_) throw DataError("predictor matrix size does not match n*p");
  if (y_.size() != n_) throw DataError("response length does not match n");
  if (names_.empty()) {
    names_.reserve(p_);
    for (std::size_t j = 0; j < p_; ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  if (names_.size() != p_) throw DataError("variable name count does not match p");
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!std::isfinite(x_[k])) {
      throw DataError("non-finite predictor value at row " + std::to_string(k % n_ + 1) +
                      ", column '" + names_[k / n_] + "'");
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (!std::isfinite(y_[i])) throw DataError("non-finite response at row " + std::to_string(i + 1));
    if (task_ == Task::BinaryClassification && y_[i] != 0.0 && y_[i] != 1.0) {
      throw DataError("classification response must be 0 or 1; row " + std::to_string(i + 1) +
                      " has " + io::format_double(y_[i]));
    }
  }
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t Dataset::resolve_variable(const std::string& name_or_index) const {
  if (auto idx = index_of(name_or_index)) return *idx;
  std::size_t one_based = 0;
  auto [ptr, ec] = std::from_chars(name_or_index.data(),
                                   name_or_index.data() + name_or_index.size(), one_based);
  if (ec == std::errc{} && ptr == name_or_index.data() + name_or_index.size() &&
      one_based >= 1 && one_based <= p_) {
    return one_based - 1;
  }
  throw DataError("unknown variable '" + name_or_index + "'");
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response, Task task) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("data file " + path.string() + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  try {
    header = io::split_csv_record(line);
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": header: " + e.what());
  }

  std::size_t response_col = header.size();
  if (auto it = std::find(header.begin(), header.end(), response); it != header.end()) {
    response_col = static_cast<std::size_t>(it - header.begin());
  } else {
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(response.data(), response.data() + response.size(), idx);
    if (ec == std::errc{} && ptr == response.data() + response.size() && idx < header.size()) {
      response_col = idx;
    }
  }
  if (response_col == header.size()) {
    throw DataError("response column '" + response + "' not found in " + path.string());
  }

  const std::size_t p = header.size() - 1;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != response_col) names.push_back(header[c]);

  std::vector<std::vector<double>> columns(p);
  std::vector<double> y;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    std::vector<std::string> fields;
    try {
      fields = io::split_csv_record(line);
    } catch (const std::exception& e) {
      throw DataError(path.string() + ": row " + std::to_string(row) + ": " + e.what());
    }
    if (fields.size() != header.size()) {
      throw DataError(path.string() + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!io::parse_double(fields[c], v)) {
        throw DataError(path.string() + ": non-numeric value '" + fields[c] + "' at row " +
                        std::to_string(row) + ", column '" + header[c] + "'");
      }
      if (std::isnan(v) || std::isinf(v)) {
        throw DataError(path.string() + ": non-finite value at row " + std::to_string(row) +
                        ", column '" + header[c] + "'");
      }
      if (c == response_col) {
        if (task == Task::BinaryClassification && v != 0.0 && v != 1.0) {
          throw DataError(path.string() + ": classification response must be 0 or 1; row " +
                          std::to_string(row) + " has " + fields[c]);
        }
        y.push_back(v);
      } else {
        columns[out_col++].push_back(v);
      }
    }
  }

  const std::size_t n = y.size();
  std::vector<double> x;
  x.reserve(n * p);
  for (auto& col : columns) x.insert(x.end(), col.begin(), col.end());
  return Dataset(std::move(x), n, p, std::move(y), task, std::move(names));
}

void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& response_name) {
  std::string out;
  out.reserve(data.n() * (data.p() + 1) * 20);
  for (std::size_t j = 0; j < data.p(); ++j) {
    out += io::quote_csv_field(data.name(j));
    out += ',';
  }
  out += io::quote_csv_field(response_name);
  out += '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.p(); ++j) {
      out += io::format_double(data.x(i, j));
      out += ',';
    }
    out += io::format_double(data.y()[i]);
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

std::vector<std::size_t> random_permutation(std::size_t m, Rng& rng) {
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  for (std::size_t i = m; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

std::vector<double> permute_column(std::span<const double> values, Rng& rng) {
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = out.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(out[i - 1], out[pick(rng)]);
  }
  return out;
}

}  // namespace ikf
