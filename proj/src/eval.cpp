#include "canids/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "canids/errors.hpp"

namespace canids {

using nlohmann::json;

constexpr int kReportSchemaVersion = 1;

Metrics metrics_from(const ConfusionMatrix& m) {
    Metrics out;
    auto total = m.total();
    if (total == 0) throw ConfigError("metrics on empty confusion matrix");
    out.accuracy = 100.0 * static_cast<double>(m.tp + m.tn) / static_cast<double>(total);
    out.misclassification = 100.0 - out.accuracy;
    if (m.tp + m.fn > 0) {
        out.tpr = 100.0 * static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
        out.fnr = 100.0 * static_cast<double>(m.fn) / static_cast<double>(m.tp + m.fn);
    }
    if (m.tn + m.fp > 0) {
        out.tnr = 100.0 * static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
        out.fpr = 100.0 * static_cast<double>(m.fp) / static_cast<double>(m.tn + m.fp);
    }
    return out;
}

ConfusionMatrix score(const std::vector<Verdict>& verdicts, const std::vector<bool>& truth) {
    if (verdicts.size() != truth.size()) {
        throw ConfigError("verdicts (" + std::to_string(verdicts.size()) + ") and truth (" +
                          std::to_string(truth.size()) + ") differ in length");
    }
    ConfusionMatrix m;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (truth[i]) {
            verdicts[i].is_attacked ? ++m.tp : ++m.fn;
        } else {
            verdicts[i].is_attacked ? ++m.fp : ++m.tn;
        }
    }
    return m;
}

std::vector<bool> window_injection_flags(const FrameStream& stream,
                                         const WindowingConfig& config) {
    if (config.window_size < 2) throw ConfigError("window size must be at least 2");
    std::vector<bool> flags;
    const auto& frames = stream.frames;
    for (std::size_t start = 0; start + config.window_size <= frames.size() ||
                                (!config.drop_partial_tail && start < frames.size());
         start += config.window_size) {
        std::size_t len = std::min(config.window_size, frames.size() - start);
        bool any = false;
        for (std::size_t i = start; i < start + len; ++i) {
            if (frames[i].label == FrameLabel::injected) {
                any = true;
                break;
            }
        }
        flags.push_back(any);
    }
    return flags;
}

std::vector<bool> population_truth(const std::vector<bool>& window_flags,
                                   std::size_t population_size) {
    if (population_size == 0) throw ConfigError("population size must be positive");
    std::vector<bool> truth;
    for (std::size_t start = 0; start + population_size <= window_flags.size();
         start += population_size) {
        bool any = false;
        for (std::size_t i = start; i < start + population_size; ++i) {
            if (window_flags[i]) {
                any = true;
                break;
            }
        }
        truth.push_back(any);
    }
    return truth;
}

std::vector<bool> baseline_population_flags(const TransitionMatrix& matrix,
                                            const FrameStream& stream,
                                            const WindowingConfig& config,
                                            std::size_t population_size,
                                            double violation_threshold) {
    std::vector<bool> window_flags;
    const auto& frames = stream.frames;
    for (std::size_t start = 0; start + config.window_size <= frames.size();
         start += config.window_size) {
        window_flags.push_back(baseline_detect(
            matrix, {frames.data() + start, config.window_size}, violation_threshold));
    }
    return population_truth(window_flags, population_size);
}

EvalReport evaluate(const BaseHypothesis& hypothesis, const std::vector<WindowGraph>& graphs,
                    const std::vector<bool>& truth, double los) {
    auto verdicts = detect(hypothesis, graphs, los);
    EvalReport report;
    report.los = los;
    report.population_count = verdicts.size();
    for (const auto& v : verdicts) {
        if (v.triggered_by == TriggerRule::chi) ++report.chi_triggered;
        if (v.triggered_by == TriggerRule::median) ++report.median_triggered;
    }
    report.confusion = score(verdicts, truth);
    report.metrics = metrics_from(report.confusion);
    return report;
}

SweepResult sweep_los(const BaseHypothesis& hypothesis, const std::vector<WindowGraph>& graphs,
                      const std::vector<bool>& truth, const std::vector<double>& levels) {
    if (levels.empty()) throw ConfigError("level sweep needs at least one level");
    SweepResult sweep;
    double best_accuracy = -1.0;
    for (double los : levels) {
        auto report = evaluate(hypothesis, graphs, truth, los);
        if (report.metrics.accuracy > best_accuracy) {
            best_accuracy = report.metrics.accuracy;
            sweep.best_los = los;
        }
        sweep.reports.emplace_back(los, std::move(report));
    }
    return sweep;
}

LatencyStats measure_latency(const BaseHypothesis& hypothesis,
                             const std::vector<WindowGraph>& test_graphs, int repetitions) {
    if (repetitions < 1) throw ConfigError("latency measurement needs at least 1 repetition");
    std::vector<double> samples;
    for (int rep = 0; rep < repetitions; ++rep) {
        auto verdicts = detect(hypothesis, test_graphs, 0.01);
        for (const auto& v : verdicts) samples.push_back(static_cast<double>(v.elapsed_us));
    }
    LatencyStats stats;
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (double s : samples) sum += s;
    stats.mean_us = sum / static_cast<double>(samples.size());
    stats.p95_us = samples[std::min(samples.size() - 1,
                                    static_cast<std::size_t>(0.95 * samples.size()))];
    stats.max_us = samples.back();
    return stats;
}

namespace {

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string metric_or_dash(const std::optional<double>& v) {
    return v ? format_pct(*v) : "--";
}

json metrics_to_json(const Metrics& m) {
    json doc;
    doc["accuracy_pct"] = m.accuracy;
    doc["misclassification_pct"] = m.misclassification;
    if (m.tpr) doc["tpr_pct"] = *m.tpr;
    if (m.fpr) doc["fpr_pct"] = *m.fpr;
    if (m.tnr) doc["tnr_pct"] = *m.tnr;
    if (m.fnr) doc["fnr_pct"] = *m.fnr;
    return doc;
}

json confusion_to_json(const ConfusionMatrix& m) {
    return json{{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}};
}

json report_body(const EvalReport& report) {
    json doc;
    doc["version"] = kReportSchemaVersion;
    doc["los"] = report.los;
    doc["populations"] = report.population_count;
    doc["chi_triggered"] = report.chi_triggered;
    doc["median_triggered"] = report.median_triggered;
    doc["confusion"] = confusion_to_json(report.confusion);
    doc["metrics"] = metrics_to_json(report.metrics);
    if (report.latency) {
        doc["latency_us"] = {{"mean", report.latency->mean_us},
                             {"p95", report.latency->p95_us},
                             {"max", report.latency->max_us}};
    }
    if (report.baseline_confusion) {
        doc["baseline"] = {{"confusion", confusion_to_json(*report.baseline_confusion)},
                           {"metrics", metrics_to_json(*report.baseline_metrics)}};
    }
    return doc;
}

}  // namespace

std::string render_report_text(const EvalReport& report) {
    std::ostringstream out;
    const auto& m = report.confusion;
    out << "confusion matrix (" << report.population_count << " populations, los "
        << report.los << ")\n";
    out << "                 predicted\n";
    out << "                 attacked   clean\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  truth attacked %8llu %8llu\n",
                  static_cast<unsigned long long>(m.tp), static_cast<unsigned long long>(m.fn));
    out << buf;
    std::snprintf(buf, sizeof(buf), "  truth clean    %8llu %8llu\n",
                  static_cast<unsigned long long>(m.fp), static_cast<unsigned long long>(m.tn));
    out << buf;
    out << "  accuracy " << format_pct(report.metrics.accuracy) << "%  misclassification "
        << format_pct(report.metrics.misclassification) << "%\n";
    out << "  tpr " << metric_or_dash(report.metrics.tpr) << "%  fpr "
        << metric_or_dash(report.metrics.fpr) << "%  tnr " << metric_or_dash(report.metrics.tnr)
        << "%  fnr " << metric_or_dash(report.metrics.fnr) << "%\n";
    out << "  triggered: chi " << report.chi_triggered << ", median " << report.median_triggered
        << "\n";
    if (report.baseline_confusion) {
        const auto& b = *report.baseline_confusion;
        out << "  id-sequence baseline: tp " << b.tp << " fp " << b.fp << " tn " << b.tn
            << " fn " << b.fn << ", accuracy "
            << format_pct(report.baseline_metrics->accuracy) << "%\n";
    }
    if (report.latency) {
        out << "  latency mean " << report.latency->mean_us << "us, p95 " << report.latency->p95_us
            << "us, max " << report.latency->max_us << "us\n";
    }
    return out.str();
}

std::string report_to_json(const EvalReport& report) {
    return report_body(report).dump(2) + "\n";
}

std::string sweep_to_json(const SweepResult& sweep) {
    json doc;
    doc["version"] = kReportSchemaVersion;
    doc["best_los"] = sweep.best_los;
    auto& reports = doc["reports"] = json::array();
    for (const auto& [los, report] : sweep.reports) {
        json entry = report_body(report);
        entry["los"] = los;
        reports.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

}  // namespace canids
