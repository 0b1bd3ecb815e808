#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ikf/data.hpp"

namespace ikf {

/// Double-centered pairwise distance matrix (row-major n x n) of a sample.
std::vector<double> centered_distances(std::span<const double> v);

/// Sample distance correlation (square root of dCov^2 / sqrt(dVar^2_x dVar^2_y)).
/// Defined 0 when either sample has zero distance variance.
double distance_correlation(std::span<const double> x, std::span<const double> y);

/// Distance correlation of every column with the response; parallel over
/// columns.
std::vector<double> dc_sis_scores(const Dataset& data);

/// Variables by descending distance correlation, ties by ascending index.
std::vector<std::size_t> dc_sis(const Dataset& data);

namespace serial {
std::vector<double> dc_sis_scores(const Dataset& data);
}  // namespace serial

}  // namespace ikf
