#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "canids/baseline.hpp"
#include "canids/detector.hpp"
#include "canids/frame.hpp"
#include "canids/graph.hpp"

namespace canids {

// Population-window granularity; positive = attacked.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

// Percentages; rate metrics are defined only when their denominator is > 0.
struct Metrics {
    double accuracy = 0.0;
    double misclassification = 0.0;
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> tnr;
    std::optional<double> fnr;
};

Metrics metrics_from(const ConfusionMatrix& m);

struct LatencyStats {
    double mean_us = 0.0;
    double p95_us = 0.0;
    double max_us = 0.0;
};

struct EvalReport {
    ConfusionMatrix confusion;
    Metrics metrics;
    double los = 0.01;
    std::size_t population_count = 0;
    std::size_t chi_triggered = 0;
    std::size_t median_triggered = 0;
    std::optional<LatencyStats> latency;
    std::optional<ConfusionMatrix> baseline_confusion;
    std::optional<Metrics> baseline_metrics;
};

ConfusionMatrix score(const std::vector<Verdict>& verdicts, const std::vector<bool>& truth);

// Ground truth helpers: a window is attacked iff it contains any injected
// frame; a population is attacked iff any of its windows is.
std::vector<bool> window_injection_flags(const FrameStream& stream, const WindowingConfig& config);
std::vector<bool> population_truth(const std::vector<bool>& window_flags,
                                   std::size_t population_size);

// Per-population baseline verdicts over the same window/population grid:
// a population is flagged iff any of its windows is flagged.
std::vector<bool> baseline_population_flags(const TransitionMatrix& matrix,
                                            const FrameStream& stream,
                                            const WindowingConfig& config,
                                            std::size_t population_size,
                                            double violation_threshold = 0.0);

EvalReport evaluate(const BaseHypothesis& hypothesis, const std::vector<WindowGraph>& graphs,
                    const std::vector<bool>& truth, double los);

struct SweepResult {
    std::vector<std::pair<double, EvalReport>> reports;  // in given level order
    double best_los = 0.0;                               // argmax accuracy
};

SweepResult sweep_los(const BaseHypothesis& hypothesis, const std::vector<WindowGraph>& graphs,
                      const std::vector<bool>& truth, const std::vector<double>& levels);

// Wall-clock time of detect() per population window, excluding parsing and
// graph building. Single-threaded.
LatencyStats measure_latency(const BaseHypothesis& hypothesis,
                             const std::vector<WindowGraph>& test_graphs, int repetitions);

// Fig-style 2x2 text grid plus the metric lines.
std::string render_report_text(const EvalReport& report);

// Machine-readable report document; timing is included only when present.
std::string report_to_json(const EvalReport& report);
std::string sweep_to_json(const SweepResult& sweep);

}  // namespace canids
