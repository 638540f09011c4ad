#include "canids/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "canids/errors.hpp"

namespace canids {

namespace {

WindowGraph build_one(std::span<const CanFrame> frames, std::size_t window_index) {
    WindowGraph g;
    g.window_index = window_index;

    g.node_ids.reserve(frames.size());
    for (const auto& frame : frames) g.node_ids.push_back(frame.arbitration_id);
    std::sort(g.node_ids.begin(), g.node_ids.end());
    g.node_ids.erase(std::unique(g.node_ids.begin(), g.node_ids.end()), g.node_ids.end());
    g.node_count = g.node_ids.size();

    g.edges.reserve(frames.size());
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        g.edges.emplace_back(frames[i].arbitration_id, frames[i + 1].arbitration_id);
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.edge_count = g.edges.size();

    // Unique edges mean out-degree(v) = #edges leaving v and in-degree(v) =
    // #edges entering v; a self-loop adds one to each.
    std::unordered_map<std::uint32_t, std::size_t> degree;
    degree.reserve(2 * g.node_count);
    for (const auto& [from, to] : g.edges) {
        ++degree[from];
        ++degree[to];
    }
    g.max_degree = 0;
    g.max_degree_id = g.node_ids.empty() ? 0 : g.node_ids.front();
    for (auto id : g.node_ids) {  // sorted scan keeps the lowest ID on ties
        auto it = degree.find(id);
        std::size_t d = it == degree.end() ? 0 : it->second;
        if (d > g.max_degree) {
            g.max_degree = d;
            g.max_degree_id = id;
        }
    }
    return g;
}

}  // namespace

std::vector<WindowGraph> build_graphs(const FrameStream& stream, const WindowingConfig& config) {
    if (config.window_size < 2) {
        throw ConfigError("window size must be at least 2, got " +
                          std::to_string(config.window_size));
    }
    std::vector<WindowGraph> graphs;
    const auto& frames = stream.frames;
    graphs.reserve(frames.size() / config.window_size + 1);
    for (std::size_t start = 0; start < frames.size(); start += config.window_size) {
        std::size_t len = std::min(config.window_size, frames.size() - start);
        if (len < config.window_size && config.drop_partial_tail) break;
        graphs.push_back(build_one({frames.data() + start, len}, graphs.size()));
    }
    return graphs;
}

std::vector<std::size_t> extract_edge_counts(const std::vector<WindowGraph>& graphs) {
    std::vector<std::size_t> counts;
    counts.reserve(graphs.size());
    for (const auto& g : graphs) counts.push_back(g.edge_count);
    return counts;
}

std::map<std::uint32_t, std::size_t> max_degree_histogram(const std::vector<WindowGraph>& graphs) {
    std::map<std::uint32_t, std::size_t> histogram;
    for (const auto& g : graphs) {
        if (g.node_count > 0) ++histogram[g.max_degree_id];
    }
    return histogram;
}

std::string to_dot(const WindowGraph& graph) {
    std::ostringstream out;
    char buf[16];
    out << "digraph window_" << graph.window_index << " {\n";
    for (auto id : graph.node_ids) {
        std::snprintf(buf, sizeof(buf), "%04x", id);
        out << "  \"" << buf << "\";\n";
    }
    for (const auto& [from, to] : graph.edges) {
        std::snprintf(buf, sizeof(buf), "%04x", from);
        out << "  \"" << buf << "\" -> \"";
        std::snprintf(buf, sizeof(buf), "%04x", to);
        out << buf << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace canids
