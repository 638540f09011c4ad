#include "canids/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "canids/errors.hpp"

namespace canids {

namespace {

// Pinned upper-tail critical values of the chi-square distribution at dof 5.
struct LosEntry {
    double los;
    double threshold;
};
constexpr LosEntry kThresholdTable[] = {
    {0.1, 9.236},
    {0.05, 11.0705},
    {0.01, 15.086},
    {0.001, 20.515},
};

constexpr double kExpectedFloor = 0.5;

}  // namespace

int BinLayout::bin_of(double value) const {
    if (value < boundaries.front()) return 0;
    if (value >= boundaries.back()) return kBinCount - 1;
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), value);
    return static_cast<int>(it - boundaries.begin()) - 1;
}

double median_of(std::span<const std::size_t> values) {
    if (values.empty()) throw ConfigError("median of empty sequence");
    std::vector<std::size_t> sorted(values.begin(), values.end());
    std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    double upper = static_cast<double>(sorted[mid]);
    if (sorted.size() % 2 == 1) return upper;
    std::nth_element(sorted.begin(), sorted.begin() + mid - 1, sorted.begin() + mid);
    return (static_cast<double>(sorted[mid - 1]) + upper) / 2.0;
}

double population_stddev(std::span<const std::size_t> values) {
    if (values.empty()) throw ConfigError("standard deviation of empty sequence");
    double mean = 0.0;
    for (auto v : values) mean += static_cast<double>(v);
    mean /= static_cast<double>(values.size());
    double sq = 0.0;
    for (auto v : values) {
        double d = static_cast<double>(v) - mean;
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(values.size()));
}

BinLayout fit_bin_layout(std::span<const std::size_t> base_edge_counts) {
    if (base_edge_counts.size() < 2) {
        throw ConfigError("bin layout needs at least 2 edge counts, got " +
                          std::to_string(base_edge_counts.size()));
    }
    BinLayout layout;
    layout.median_null = median_of(base_edge_counts);
    layout.sigma_null = population_stddev(base_edge_counts);
    if (layout.sigma_null == 0.0) {
        throw ConfigError(
            "degenerate bin layout: edge counts have zero variance; widen the base population");
    }
    for (int k = 0; k <= kBinCount; ++k) {
        layout.boundaries[k] = layout.median_null + (k - 3) * layout.sigma_null;
    }
    return layout;
}

BinnedDistribution bin_values(std::span<const std::size_t> values, const BinLayout& layout) {
    BinnedDistribution dist;
    for (auto v : values) {
        ++dist.counts[layout.bin_of(static_cast<double>(v))];
    }
    dist.total = values.size();
    return dist;
}

ChiResult chi_squared(const BinnedDistribution& observed, const BinnedDistribution& base,
                      double los) {
    if (observed.total == 0 || base.total == 0) {
        throw ConfigError("chi-squared on empty distribution");
    }
    ChiResult result;
    result.los = los;
    result.threshold = threshold_for(los);
    result.dof = kChiDof;
    double scale = static_cast<double>(observed.total) / static_cast<double>(base.total);
    double statistic = 0.0;
    for (int i = 0; i < kBinCount; ++i) {
        double expected = std::max(static_cast<double>(base.counts[i]) * scale, kExpectedFloor);
        double diff = static_cast<double>(observed.counts[i]) - expected;
        statistic += diff * diff / expected;
    }
    result.statistic = statistic;
    return result;
}

double threshold_for(double los) {
    for (const auto& entry : kThresholdTable) {
        if (std::abs(entry.los - los) < 1e-12) return entry.threshold;
    }
    throw ConfigError("unsupported level of significance " + std::to_string(los) +
                      "; supported: 0.1, 0.05, 0.01, 0.001");
}

bool median_outlier_test(std::span<const std::size_t> test_edge_counts, const BinLayout& layout) {
    if (test_edge_counts.empty()) throw ConfigError("median test on empty distribution");
    return median_of(test_edge_counts) > layout.median_null + 3.0 * layout.sigma_null;
}

}  // namespace canids
