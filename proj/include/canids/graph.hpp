#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "canids/frame.hpp"

namespace canids {

struct WindowingConfig {
    std::size_t window_size = 200;
    bool drop_partial_tail = true;
};

// Directed graph of one message window: nodes are arbitration IDs, an edge
// (a -> b) means a message with ID b immediately followed one with ID a.
// Edges are a set (no multiplicity); self-loops are allowed.
struct WindowGraph {
    std::size_t window_index = 0;
    std::vector<std::uint32_t> node_ids;                          // sorted, unique
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;   // sorted, unique
    std::size_t edge_count = 0;
    std::size_t node_count = 0;
    // Degree of a node = distinct in-neighbours + distinct out-neighbours
    // (a self-loop counts once in each direction). Ties broken by lowest ID.
    std::size_t max_degree = 0;
    std::uint32_t max_degree_id = 0;
};

// Splits the stream into consecutive non-overlapping windows and builds one
// graph per window. Windows are independent: the pair formed by the last
// frame of one window and the first frame of the next contributes no edge.
std::vector<WindowGraph> build_graphs(const FrameStream& stream, const WindowingConfig& config);

std::vector<std::size_t> extract_edge_counts(const std::vector<WindowGraph>& graphs);

// How many windows each ID was the max-degree node of (exploratory only).
std::map<std::uint32_t, std::size_t> max_degree_histogram(const std::vector<WindowGraph>& graphs);

// DOT export for visual inspection of a single window graph.
std::string to_dot(const WindowGraph& graph);

}  // namespace canids
