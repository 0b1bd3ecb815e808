#include "ikf/dcsis.hpp"

#include <cmath>
#include <stdexcept>

#include "ikf/kings.hpp"
#include "ikf/parallel.hpp"

namespace ikf {

namespace {

struct RowMeans {
  std::vector<double> row;
  double grand = 0.0;
};

RowMeans distance_means(std::span<const double> v) {
  const std::size_t n = v.size();
  RowMeans m;
  m.row.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) s += std::abs(v[k] - v[l]);
    m.row[k] = s / static_cast<double>(n);
    m.grand += m.row[k];
  }
  m.grand /= static_cast<double>(n);
  return m;
}

/// Holds the response side so each column costs one O(n^2) pass.
class DcorKernel {
 public:
  explicit DcorKernel(std::span<const double> y) : y_centered_(centered_distances(y)) {
    double s = 0.0;
    for (double b : y_centered_) s += b * b;
    const double n = static_cast<double>(y.size());
    dvar_y_ = s / (n * n);
    n_ = y.size();
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != n_) throw std::invalid_argument("distance correlation: length mismatch");
    const RowMeans m = distance_means(x);
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const double* b = y_centered_.data() + k * n_;
      for (std::size_t l = 0; l < n_; ++l) {
        const double a = std::abs(x[k] - x[l]) - m.row[k] - m.row[l] + m.grand;
        cov += a * b[l];
        var += a * a;
      }
    }
    const double nn = static_cast<double>(n_) * static_cast<double>(n_);
    return finish(cov / nn, var / nn, dvar_y_);
  }

  static double finish(double dcov2, double dvar_x, double dvar_y) {
    if (!(dvar_x > 0.0) || !(dvar_y > 0.0)) return 0.0;
    const double r2 = std::max(dcov2, 0.0) / std::sqrt(dvar_x * dvar_y);
    return std::sqrt(r2);
  }

 private:
  std::vector<double> y_centered_;
  double dvar_y_ = 0.0;
  std::size_t n_ = 0;
};

}  // namespace

std::vector<double> centered_distances(std::span<const double> v) {
  const std::size_t n = v.size();
  const RowMeans m = distance_means(v);
  std::vector<double> out(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      out[k * n + l] = std::abs(v[k] - v[l]) - m.row[k] - m.row[l] + m.grand;
  return out;
}

double distance_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("distance correlation: length mismatch");
  if (x.empty()) throw std::invalid_argument("distance correlation: empty sample");
  return DcorKernel(y)(x);
}

std::vector<double> dc_sis_scores(const Dataset& data) {
  if (data.n() < 4) throw std::invalid_argument("DC-SIS needs n >= 4");
  const DcorKernel kernel(data.y());
  std::vector<double> scores(data.p());
  parallel_for(data.p(), [&](std::size_t j) { scores[j] = kernel(data.column(j)); });
  return scores;
}

namespace serial {
std::vector<double> dc_sis_scores(const Dataset& data) {
  if (data.n() < 4) throw std::invalid_argument("DC-SIS needs n >= 4");
  const DcorKernel kernel(data.y());
  std::vector<double> scores(data.p());
  for (std::size_t j = 0; j < data.p(); ++j) scores[j] = kernel(data.column(j));
  return scores;
}
}  // namespace serial

std::vector<std::size_t> dc_sis(const Dataset& data) { return rank_variables(dc_sis_scores(data)); }

}  // namespace ikf
