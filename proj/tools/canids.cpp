// canids - graph-based intrusion detection for CAN bus captures.
//
// Subcommands: parse, train, detect, inject, eval, sweep.
// Exit codes: 0 success (detect: clean), 1 attack detected (detect only),
// 2 input/format error, 3 config/training error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "canids/attack.hpp"
#include "canids/baseline.hpp"
#include "canids/can_io.hpp"
#include "canids/detector.hpp"
#include "canids/errors.hpp"
#include "canids/eval.hpp"
#include "canids/graph.hpp"
#include "canids/stats.hpp"

namespace {

using namespace canids;

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw FormatError(path + ": read error");
    return buffer.str();
}

void write_text(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << content;
    if (!out) throw FormatError(path + ": write error");
}

ParseResult read_capture(const std::string& path, const std::string& format) {
    std::string text = read_text(path);
    std::string source = path == "-" ? "stdin" : path;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        ParseResult empty;
        empty.stream.source = source;
        return empty;
    }
    LogFormat fmt;
    if (format == "hcrl") {
        fmt = LogFormat::hcrl;
    } else if (format == "csv") {
        fmt = LogFormat::csv;
    } else if (format == "auto") {
        auto eol = text.find('\n');
        fmt = sniff_format(eol == std::string::npos ? std::string_view(text)
                                                    : std::string_view(text).substr(0, eol));
    } else {
        throw FormatError("unknown format '" + format + "', expected hcrl, csv or auto");
    }
    auto result = fmt == LogFormat::hcrl ? parse_hcrl(text, source) : parse_csv(text, source);
    if (!result.warnings.empty()) {
        std::cerr << source << ": " << result.warnings.size() << " parse warning(s), first at line "
                  << result.warnings.front().line_number << ": "
                  << result.warnings.front().message << "\n";
    }
    return result;
}

std::uint32_t parse_hex_id(const std::string& text) {
    try {
        auto value = std::stoul(text, nullptr, 16);
        if (value > kExtendedIdMax) throw ConfigError("arbitration id out of range: " + text);
        return static_cast<std::uint32_t>(value);
    } catch (const std::logic_error&) {
        throw ConfigError("bad arbitration id: " + text);
    }
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("range must be begin:end, got " + text);
    try {
        return {std::stoull(text.substr(0, colon)), std::stoull(text.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw ConfigError("bad range: " + text);
    }
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::size_t window_size = 200;
    std::size_t population_size = kDefaultPopulationSize;
    double los = 0.01;
    std::string format = "auto";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "Seed for all randomness");
    cmd->add_option("--window-size", opts.window_size, "Messages per window")->check(CLI::Range(2u, 1000000u));
    cmd->add_option("--population-size", opts.population_size, "Windows per population window");
    cmd->add_option("--los", opts.los, "Level of significance (0.1, 0.05, 0.01, 0.001)");
    cmd->add_option("--format", opts.format, "Input format: hcrl, csv or auto")
        ->check(CLI::IsMember({"hcrl", "csv", "auto"}));
}

int run_parse(const CommonOpts& opts, const std::string& input, const std::string& output,
              const std::string& dot_path, std::size_t dot_window) {
    auto parsed = read_capture(input, opts.format);
    write_text(output, emit_csv(parsed.stream));
    if (!dot_path.empty()) {
        auto graphs = build_graphs(parsed.stream, {opts.window_size, true});
        if (dot_window >= graphs.size()) {
            throw ConfigError("dot window " + std::to_string(dot_window) + " out of range, have " +
                              std::to_string(graphs.size()) + " windows");
        }
        write_text(dot_path, to_dot(graphs[dot_window]));
    }
    return 0;
}

int run_train(const CommonOpts& opts, const std::string& input, const std::string& out_model) {
    auto parsed = read_capture(input, opts.format);
    auto graphs = build_graphs(parsed.stream, {opts.window_size, true});
    auto hypothesis =
        train(graphs, opts.population_size, opts.window_size, parsed.stream.source);
    write_text(out_model, save_hypothesis(hypothesis));
    std::cout << "trained on " << graphs.size() << " windows: median "
              << hypothesis.layout.median_null << ", sigma " << hypothesis.layout.sigma_null
              << "\n";
    return 0;
}

int run_detect(const CommonOpts& opts, const std::string& model_path, const std::string& input,
               const std::string& report_path) {
    auto hypothesis = load_hypothesis(read_text(model_path));
    auto parsed = read_capture(input, opts.format);
    auto graphs = build_graphs(parsed.stream, {hypothesis.window_size, true});
    auto verdicts = detect(hypothesis, graphs, opts.los);

    std::size_t attacked = 0;
    for (const auto& v : verdicts) {
        if (v.is_attacked) ++attacked;
        std::cout << "population " << v.population_index << ": chi " << v.chi.statistic
                  << (v.chi_attacked ? " > " : " <= ") << v.chi.threshold << ", median "
                  << v.test_median << " -> " << (v.is_attacked ? "attack" : "clean");
        if (v.is_attacked) std::cout << " (" << to_string(v.triggered_by) << ")";
        std::cout << "\n";
    }
    std::cout << attacked << "/" << verdicts.size() << " populations attacked\n";

    if (!report_path.empty()) {
        nlohmann::json doc;
        doc["version"] = 1;
        doc["los"] = opts.los;
        doc["threshold"] = threshold_for(opts.los);
        doc["window_size"] = hypothesis.window_size;
        doc["population_size"] = hypothesis.population_size;
        auto& pops = doc["populations"] = nlohmann::json::array();
        for (const auto& v : verdicts) {
            pops.push_back({{"index", v.population_index},
                            {"chi_statistic", v.chi.statistic},
                            {"chi_attacked", v.chi_attacked},
                            {"median", v.test_median},
                            {"median_attacked", v.median_attacked},
                            {"is_attacked", v.is_attacked},
                            {"triggered_by", std::string(to_string(v.triggered_by))}});
        }
        doc["attacked_populations"] = attacked;
        write_text(report_path, doc.dump(2) + "\n");
    }
    return attacked > 0 ? 1 : 0;
}

int run_inject(const CommonOpts& opts, const std::string& input, const std::string& out,
               const std::string& attack, double ratio, const std::string& target_id,
               const std::string& id_range, const std::string& region,
               const std::string& spec_path) {
    auto parsed = read_capture(input, opts.format);

    AttackSpec spec;
    if (!spec_path.empty()) {
        spec = attack_spec_from_json(read_text(spec_path));
    } else {
        if (attack.empty()) throw ConfigError("either --attack or --spec is required");
        spec.kind = attack_kind_from_string(attack);
        spec.injection_ratio = ratio > 0.0 ? ratio : (spec.kind == AttackKind::dos ? 0.3 : 0.2);
        spec.seed = opts.seed;
        if (!target_id.empty()) spec.target_id = parse_hex_id(target_id);
        if (!id_range.empty()) {
            auto colon = id_range.find(':');
            if (colon == std::string::npos) throw ConfigError("id range must be lo:hi hex");
            spec.id_range = {parse_hex_id(id_range.substr(0, colon)),
                             parse_hex_id(id_range.substr(colon + 1))};
        }
        if (!region.empty()) {
            auto [begin, end] = parse_range(region);
            spec.region = {begin, end};
        }
    }
    auto injected = inject(parsed.stream, spec);
    write_text(out, emit_csv(injected));
    std::cout << "injected " << (injected.frames.size() - parsed.stream.frames.size())
              << " frames (" << injected.frames.size() << " total)\n";
    return 0;
}

// --baseline accepts either a saved transition-matrix document or a clean
// capture to train one from.
TransitionMatrix load_baseline(const std::string& path, const std::string& format) {
    std::string text = read_text(path);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        return load_transition_matrix(text);
    }
    auto parsed = read_capture(path, format);
    return baseline_train(parsed.stream);
}

int run_eval(const CommonOpts& opts, const std::string& model_path, const std::string& input,
             const std::string& baseline_path, const std::string& report_path,
             bool measure_latency_flag, int repetitions) {
    auto hypothesis = load_hypothesis(read_text(model_path));
    auto parsed = read_capture(input, opts.format);
    WindowingConfig window_config{hypothesis.window_size, true};
    auto graphs = build_graphs(parsed.stream, window_config);
    auto truth = population_truth(window_injection_flags(parsed.stream, window_config),
                                  hypothesis.population_size);

    auto report = evaluate(hypothesis, graphs, truth, opts.los);

    if (!baseline_path.empty()) {
        auto matrix = load_baseline(baseline_path, opts.format);
        auto flags = baseline_population_flags(matrix, parsed.stream, window_config,
                                               hypothesis.population_size);
        ConfusionMatrix m;
        for (std::size_t i = 0; i < truth.size() && i < flags.size(); ++i) {
            if (truth[i]) {
                flags[i] ? ++m.tp : ++m.fn;
            } else {
                flags[i] ? ++m.fp : ++m.tn;
            }
        }
        report.baseline_confusion = m;
        report.baseline_metrics = metrics_from(m);
    }

    if (measure_latency_flag) {
        report.latency = measure_latency(hypothesis, graphs, repetitions);
    } else {
        // Timing goes to stdout only, so report files stay reproducible.
        auto latency = measure_latency(hypothesis, graphs, 1);
        std::cout << "detection latency mean " << latency.mean_us << "us, max " << latency.max_us
                  << "us\n";
    }

    std::cout << render_report_text(report);
    if (!report_path.empty()) write_text(report_path, report_to_json(report));
    return 0;
}

int run_sweep(const CommonOpts& opts, const std::string& model_path, const std::string& input,
              std::vector<double> levels, const std::string& report_path) {
    auto hypothesis = load_hypothesis(read_text(model_path));
    auto parsed = read_capture(input, opts.format);
    WindowingConfig window_config{hypothesis.window_size, true};
    auto graphs = build_graphs(parsed.stream, window_config);
    auto truth = population_truth(window_injection_flags(parsed.stream, window_config),
                                  hypothesis.population_size);
    if (levels.empty()) levels = {kSupportedLos.begin(), kSupportedLos.end()};

    auto sweep = sweep_los(hypothesis, graphs, truth, levels);
    for (const auto& [los, report] : sweep.reports) {
        std::cout << "los " << los << " (threshold " << threshold_for(los) << "): accuracy "
                  << report.metrics.accuracy << "%\n";
    }
    std::cout << "best los " << sweep.best_los << "\n";
    if (!report_path.empty()) write_text(report_path, sweep_to_json(sweep));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based intrusion detection for CAN bus captures"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts opts;

    auto* parse_cmd = app.add_subcommand("parse", "Convert a capture to canonical CSV");
    std::string parse_input, parse_output = "-", parse_dot;
    std::size_t parse_dot_window = 0;
    parse_cmd->add_option("--input", parse_input, "Input capture (- for stdin)")->required();
    parse_cmd->add_option("--output", parse_output, "Output CSV (- for stdout)");
    parse_cmd->add_option("--dot", parse_dot, "Also export one window graph as DOT");
    parse_cmd->add_option("--dot-window", parse_dot_window, "Window index for --dot");
    add_common(parse_cmd, opts);

    auto* train_cmd = app.add_subcommand("train", "Train a base hypothesis from attack-free data");
    std::string train_input, train_out_model;
    train_cmd->add_option("--input", train_input, "Attack-free capture")->required();
    train_cmd->add_option("--out-model", train_out_model, "Hypothesis output file")->required();
    add_common(train_cmd, opts);

    auto* detect_cmd = app.add_subcommand("detect", "Detect attacks in a capture");
    std::string detect_model, detect_input, detect_report;
    detect_cmd->add_option("--model", detect_model, "Trained hypothesis file")->required();
    detect_cmd->add_option("--input", detect_input, "Capture to test (- for stdin)")->required();
    detect_cmd->add_option("--report", detect_report, "Verdict report output file");
    add_common(detect_cmd, opts);

    auto* inject_cmd = app.add_subcommand("inject", "Synthesize a labeled attack capture");
    std::string inject_input, inject_out, inject_attack, inject_target, inject_id_range,
        inject_region, inject_spec;
    double inject_ratio = 0.0;  // 0 = per-kind default (0.3 dos, 0.2 otherwise)
    inject_cmd->add_option("--input", inject_input, "Clean capture")->required();
    inject_cmd->add_option("--out", inject_out, "Labeled CSV output")->required();
    inject_cmd->add_option("--attack", inject_attack, "dos, fuzzy, spoof, replay or combined");
    inject_cmd->add_option("--ratio", inject_ratio,
                           "Injected fraction of the attacked region (default 0.3 dos, 0.2 rest)");
    inject_cmd->add_option("--target-id", inject_target, "Spoof target arbitration ID (hex)");
    inject_cmd->add_option("--id-range", inject_id_range, "Fuzzy ID range lo:hi (hex)");
    inject_cmd->add_option("--region", inject_region, "Frame-index region begin:end");
    inject_cmd->add_option("--spec", inject_spec, "Attack spec JSON file (for combined)");
    add_common(inject_cmd, opts);

    auto* eval_cmd = app.add_subcommand("eval", "Score a labeled capture against a model");
    std::string eval_model, eval_input, eval_baseline, eval_report;
    bool eval_latency = false;
    int eval_repetitions = 10;
    eval_cmd->add_option("--model", eval_model, "Trained hypothesis file")->required();
    eval_cmd->add_option("--labeled-input", eval_input, "Labeled capture")->required();
    eval_cmd->add_option("--baseline", eval_baseline,
                         "Transition matrix file or clean capture for the ID-sequence baseline");
    eval_cmd->add_option("--report", eval_report, "Report output file");
    eval_cmd->add_flag("--measure-latency", eval_latency,
                       "Include timing in the report file (breaks byte-reproducibility)");
    eval_cmd->add_option("--repetitions", eval_repetitions, "Latency measurement repetitions");
    add_common(eval_cmd, opts);

    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate across levels of significance");
    std::string sweep_model, sweep_input, sweep_report;
    std::vector<double> sweep_levels;
    sweep_cmd->add_option("--model", sweep_model, "Trained hypothesis file")->required();
    sweep_cmd->add_option("--labeled-input", sweep_input, "Labeled capture")->required();
    sweep_cmd->add_option("--levels", sweep_levels, "Comma-separated levels")->delimiter(',');
    sweep_cmd->add_option("--report", sweep_report, "Report output file");
    add_common(sweep_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (parse_cmd->parsed()) {
            return run_parse(opts, parse_input, parse_output, parse_dot, parse_dot_window);
        }
        if (train_cmd->parsed()) return run_train(opts, train_input, train_out_model);
        if (detect_cmd->parsed()) {
            return run_detect(opts, detect_model, detect_input, detect_report);
        }
        if (inject_cmd->parsed()) {
            return run_inject(opts, inject_input, inject_out, inject_attack, inject_ratio,
                              inject_target, inject_id_range, inject_region, inject_spec);
        }
        if (eval_cmd->parsed()) {
            return run_eval(opts, eval_model, eval_input, eval_baseline, eval_report, eval_latency,
                            eval_repetitions);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(opts, sweep_model, sweep_input, sweep_levels, sweep_report);
        }
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
