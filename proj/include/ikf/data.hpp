#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ikf/rng.hpp"

namespace ikf {

enum class Task { Regression, BinaryClassification };

std::string to_string(Task task);
Task parse_task(const std::string& text);

/// Malformed input data or a violated dataset invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable design matrix plus response. Columns are stored contiguously
/// (column-major) because split search scans one variable at a time.
class Dataset {
 public:
  Dataset(std::vector<double> x_column_major, std::size_t n, std::size_t p,
          std::vector<double> y, Task task, std::vector<std::string> names = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return p_; }
  Task task() const noexcept { return task_; }

  std::span<const double> column(std::size_t j) const noexcept {
    return {x_.data() + j * n_, n_};
  }
  double x(std::size_t row, std::size_t j) const noexcept { return x_[j * n_ + row]; }
  std::span<const double> y() const noexcept { return y_; }
  const std::vector<double>& raw_x() const noexcept { return x_; }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t j) const { return names_.at(j); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Resolves "x5"-style names first, then a bare 1-based index.
  std::size_t resolve_variable(const std::string& name_or_index) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<double> x_;
  std::size_t n_;
  std::size_t p_;
  std::vector<double> y_;
  Task task_;
  std::vector<std::string> names_;
};

/// Reads a header-first CSV. `response` is a column name, or a 0-based
/// column index when no header field carries that name.
Dataset load_csv(const std::filesystem::path& path, const std::string& response, Task task);

/// Writes x columns followed by the response column, shortest round-trip
/// decimal for every value. Written to a temporary file and renamed.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& response_name = "y");

/// Uniform Fisher-Yates shuffle of a copy of `values`.
std::vector<double> permute_column(std::span<const double> values, Rng& rng);

/// Uniform random permutation of 0..m-1.
std::vector<std::size_t> random_permutation(std::size_t m, Rng& rng);

}  // namespace ikf
