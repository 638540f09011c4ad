#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "canids/graph.hpp"
#include "canids/stats.hpp"

namespace canids {

inline constexpr std::size_t kDefaultPopulationSize = 50;
inline constexpr std::size_t kMinTrainingWindows = 10;
inline constexpr int kHypothesisSchemaVersion = 1;

// Trained detector state: the attack-free edge-count distribution binned
// under its own median-centred layout, plus the window/population geometry.
// Immutable once trained.
struct BaseHypothesis {
    BinLayout layout;
    BinnedDistribution base_distribution;
    std::size_t window_size = 200;
    std::size_t population_size = kDefaultPopulationSize;
    std::string created_from;
};

struct PopulationWindow {
    std::vector<std::size_t> edge_counts;  // length == population_size
    std::size_t first_window_index = 0;
};

enum class TriggerRule : std::uint8_t { none, chi, median };

struct Verdict {
    std::size_t population_index = 0;
    ChiResult chi;
    bool chi_attacked = false;
    bool median_attacked = false;
    bool is_attacked = false;
    TriggerRule triggered_by = TriggerRule::none;
    double test_median = 0.0;
    std::int64_t elapsed_us = 0;  // detection wall time, this population
};

BaseHypothesis train(const std::vector<WindowGraph>& base_graphs, std::size_t population_size,
                     std::size_t window_size, std::string created_from);

// Groups consecutive windows into population windows; a trailing partial
// population is discarded.
std::vector<PopulationWindow> group_populations(const std::vector<WindowGraph>& graphs,
                                                std::size_t population_size);

// Runs the chi-squared test then the median test on each population window.
// Each test population is binned under a layout fitted to its own median and
// sigma (the same rule the base distribution was built with), so the chi test
// compares distribution shape; the median test compares location against
// median_null + 3*sigma_null.
std::vector<Verdict> detect(const BaseHypothesis& hypothesis,
                            const std::vector<WindowGraph>& test_graphs, double los = 0.01);

std::string save_hypothesis(const BaseHypothesis& hypothesis);
BaseHypothesis load_hypothesis(std::string_view text);

std::string_view to_string(TriggerRule rule);

}  // namespace canids
