#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace canids {

inline constexpr int kBinCount = 6;
inline constexpr int kChiDof = 5;  // (2 rows - 1) * (6 bins - 1)
inline constexpr std::array<double, 4> kSupportedLos = {0.1, 0.05, 0.01, 0.001};

// Six bins centred on the median: boundaries at median + k*sigma for
// k = -3..3. Values below the first boundary clamp into bin 0, above the
// last into bin 5; bins are half-open [b_i, b_{i+1}) with the last closed.
struct BinLayout {
    double median_null = 0.0;
    double sigma_null = 0.0;
    std::array<double, kBinCount + 1> boundaries{};

    int bin_of(double value) const;
};

struct BinnedDistribution {
    std::array<std::uint64_t, kBinCount> counts{};
    std::uint64_t total = 0;
};

struct ChiResult {
    double statistic = 0.0;
    int dof = kChiDof;
    double threshold = 0.0;
    double los = 0.0;
};

// Order-statistic median (mean of the two middle values for even n).
double median_of(std::span<const std::size_t> values);

// Population standard deviation (divide by n).
double population_stddev(std::span<const std::size_t> values);

// Fits the six-bin layout to attack-free edge counts. Requires at least two
// values and non-zero variance.
BinLayout fit_bin_layout(std::span<const std::size_t> base_edge_counts);

BinnedDistribution bin_values(std::span<const std::size_t> values, const BinLayout& layout);

// Goodness-of-fit statistic: E_i is the base proportion scaled to the
// observed total, floored at 0.5 so empty base bins stay finite and mass in
// them is penalised.
ChiResult chi_squared(const BinnedDistribution& observed, const BinnedDistribution& base,
                      double los = 0.01);

// Upper-tail chi-square critical value at dof 5 for the supported levels of
// significance: 0.1 -> 9.236, 0.05 -> 11.0705, 0.01 -> 15.086, 0.001 -> 20.515.
double threshold_for(double los);

// True (attack) iff median(test) > median_null + 3*sigma_null.
bool median_outlier_test(std::span<const std::size_t> test_edge_counts, const BinLayout& layout);

}  // namespace canids
