#pragma once

#include <span>
#include <vector>

namespace t2veval {

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Throws Error on unequal lengths, fewer than 2 values, or a constant input.
double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);
/// Tie-corrected Kendall tau-b, O(n log n).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

}  // namespace t2veval
