#include "canids/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "canids/errors.hpp"

namespace canids {

namespace {

using nlohmann::json;

// Test populations are compared by distribution shape: each one is binned
// under a layout fitted to its own median and sigma, mirroring how the base
// distribution was built. A zero-variance population has no shape to fit and
// collapses into the median bin.
BinnedDistribution bin_under_own_layout(const std::vector<std::size_t>& edge_counts) {
    if (population_stddev(edge_counts) > 0.0) {
        return bin_values(edge_counts, fit_bin_layout(edge_counts));
    }
    BinnedDistribution dist;
    dist.counts[3] = edge_counts.size();
    dist.total = edge_counts.size();
    return dist;
}

}  // namespace

BaseHypothesis train(const std::vector<WindowGraph>& base_graphs, std::size_t population_size,
                     std::size_t window_size, std::string created_from) {
    std::size_t minimum = std::max(population_size, kMinTrainingWindows);
    if (base_graphs.size() < minimum) {
        throw ConfigError("training needs at least " + std::to_string(minimum) +
                          " windows, got " + std::to_string(base_graphs.size()));
    }
    if (window_size < 2) throw ConfigError("window size must be at least 2");
    if (population_size == 0) throw ConfigError("population size must be positive");

    auto edge_counts = extract_edge_counts(base_graphs);
    BaseHypothesis hypothesis;
    hypothesis.layout = fit_bin_layout(edge_counts);
    hypothesis.base_distribution = bin_values(edge_counts, hypothesis.layout);
    hypothesis.window_size = window_size;
    hypothesis.population_size = population_size;
    hypothesis.created_from = std::move(created_from);
    return hypothesis;
}

std::vector<PopulationWindow> group_populations(const std::vector<WindowGraph>& graphs,
                                                std::size_t population_size) {
    if (population_size == 0) throw ConfigError("population size must be positive");
    std::vector<PopulationWindow> populations;
    populations.reserve(graphs.size() / population_size);
    for (std::size_t start = 0; start + population_size <= graphs.size();
         start += population_size) {
        PopulationWindow pop;
        pop.first_window_index = graphs[start].window_index;
        pop.edge_counts.reserve(population_size);
        for (std::size_t i = 0; i < population_size; ++i) {
            pop.edge_counts.push_back(graphs[start + i].edge_count);
        }
        populations.push_back(std::move(pop));
    }
    return populations;
}

std::vector<Verdict> detect(const BaseHypothesis& hypothesis,
                            const std::vector<WindowGraph>& test_graphs, double los) {
    if (test_graphs.size() < hypothesis.population_size) {
        throw ConfigError("detection needs at least " +
                          std::to_string(hypothesis.population_size) + " windows, got " +
                          std::to_string(test_graphs.size()));
    }
    auto populations = group_populations(test_graphs, hypothesis.population_size);
    std::vector<Verdict> verdicts;
    verdicts.reserve(populations.size());
    for (std::size_t p = 0; p < populations.size(); ++p) {
        auto t0 = std::chrono::steady_clock::now();
        const auto& counts = populations[p].edge_counts;

        Verdict v;
        v.population_index = p;
        BinnedDistribution observed = bin_under_own_layout(counts);
        v.chi = chi_squared(observed, hypothesis.base_distribution, los);
        v.chi_attacked = v.chi.statistic > v.chi.threshold;
        v.test_median = median_of(counts);
        v.median_attacked = median_outlier_test(counts, hypothesis.layout);
        v.is_attacked = v.chi_attacked || v.median_attacked;
        v.triggered_by = v.chi_attacked    ? TriggerRule::chi
                         : v.median_attacked ? TriggerRule::median
                                             : TriggerRule::none;
        auto t1 = std::chrono::steady_clock::now();
        v.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
        verdicts.push_back(v);
    }
    return verdicts;
}

std::string save_hypothesis(const BaseHypothesis& hypothesis) {
    json doc;
    doc["version"] = kHypothesisSchemaVersion;
    doc["window_size"] = hypothesis.window_size;
    doc["population_size"] = hypothesis.population_size;
    doc["median_null"] = hypothesis.layout.median_null;
    doc["sigma_null"] = hypothesis.layout.sigma_null;
    doc["boundaries"] = hypothesis.layout.boundaries;
    doc["base_counts"] = hypothesis.base_distribution.counts;
    doc["base_total"] = hypothesis.base_distribution.total;
    doc["created_from"] = hypothesis.created_from;
    return doc.dump(2) + "\n";
}

BaseHypothesis load_hypothesis(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("hypothesis file: ") + e.what());
    }
    try {
        if (!doc.contains("version") || doc["version"].get<int>() != kHypothesisSchemaVersion) {
            throw FormatError("hypothesis file: unsupported schema version");
        }
        BaseHypothesis h;
        h.window_size = doc.at("window_size").get<std::size_t>();
        h.population_size = doc.at("population_size").get<std::size_t>();
        h.layout.median_null = doc.at("median_null").get<double>();
        h.layout.sigma_null = doc.at("sigma_null").get<double>();
        auto boundaries = doc.at("boundaries").get<std::vector<double>>();
        auto base_counts = doc.at("base_counts").get<std::vector<std::uint64_t>>();
        if (boundaries.size() != h.layout.boundaries.size() ||
            base_counts.size() != h.base_distribution.counts.size()) {
            throw FormatError("hypothesis file: wrong boundary/bin count");
        }
        std::copy(boundaries.begin(), boundaries.end(), h.layout.boundaries.begin());
        std::copy(base_counts.begin(), base_counts.end(), h.base_distribution.counts.begin());
        h.base_distribution.total = doc.at("base_total").get<std::uint64_t>();
        h.created_from = doc.at("created_from").get<std::string>();

        std::uint64_t sum = 0;
        for (auto c : h.base_distribution.counts) sum += c;
        if (sum != h.base_distribution.total || !std::isfinite(h.layout.median_null) ||
            !std::isfinite(h.layout.sigma_null) || h.layout.sigma_null < 0.0) {
            throw FormatError("hypothesis file: corrupted numeric fields");
        }
        return h;
    } catch (const json::exception& e) {
        throw FormatError(std::string("hypothesis file: ") + e.what());
    }
}

std::string_view to_string(TriggerRule rule) {
    switch (rule) {
        case TriggerRule::chi: return "chi";
        case TriggerRule::median: return "median";
        case TriggerRule::none: break;
    }
    return "none";
}

}  // namespace canids
