#include "canids/baseline.hpp"

#include <algorithm>
#include <vector>

#include <json.hpp>

#include "canids/errors.hpp"

namespace canids {

using nlohmann::json;

constexpr int kMatrixSchemaVersion = 1;

TransitionMatrix baseline_train(const FrameStream& stream) {
    const auto& frames = stream.frames;
    if (frames.size() < 2) {
        throw ConfigError("transition matrix needs at least 2 frames, got " +
                          std::to_string(frames.size()));
    }
    TransitionMatrix matrix;
    matrix.allowed.reserve(frames.size() / 4);
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        matrix.allowed.insert(
            TransitionMatrix::pack(frames[i].arbitration_id, frames[i + 1].arbitration_id));
    }
    for (const auto& frame : frames) matrix.id_universe.insert(frame.arbitration_id);
    return matrix;
}

bool baseline_detect(const TransitionMatrix& matrix, std::span<const CanFrame> window_frames,
                     double violation_threshold) {
    if (window_frames.empty()) throw ConfigError("baseline detection on empty window");
    if (window_frames.size() == 1) return false;  // no pairs to check
    std::size_t violations = 0;
    std::size_t pairs = window_frames.size() - 1;
    for (std::size_t i = 0; i + 1 < window_frames.size(); ++i) {
        if (!matrix.contains(window_frames[i].arbitration_id,
                             window_frames[i + 1].arbitration_id)) {
            ++violations;
        }
    }
    return static_cast<double>(violations) / static_cast<double>(pairs) > violation_threshold;
}

std::string save_transition_matrix(const TransitionMatrix& matrix) {
    std::vector<std::uint32_t> ids(matrix.id_universe.begin(), matrix.id_universe.end());
    std::sort(ids.begin(), ids.end());
    std::vector<std::uint64_t> pairs(matrix.allowed.begin(), matrix.allowed.end());
    std::sort(pairs.begin(), pairs.end());

    json doc;
    doc["version"] = kMatrixSchemaVersion;
    doc["ids"] = ids;
    auto& out_pairs = doc["pairs"] = json::array();
    for (auto p : pairs) {
        out_pairs.push_back({static_cast<std::uint32_t>(p >> 32),
                             static_cast<std::uint32_t>(p & 0xFFFFFFFFu)});
    }
    return doc.dump(2) + "\n";
}

TransitionMatrix load_transition_matrix(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("transition matrix file: ") + e.what());
    }
    try {
        if (!doc.contains("version") || doc["version"].get<int>() != kMatrixSchemaVersion) {
            throw FormatError("transition matrix file: unsupported schema version");
        }
        TransitionMatrix matrix;
        for (auto id : doc.at("ids").get<std::vector<std::uint32_t>>()) {
            matrix.id_universe.insert(id);
        }
        for (const auto& pair : doc.at("pairs")) {
            auto ends = pair.get<std::vector<std::uint32_t>>();
            if (ends.size() != 2) throw FormatError("transition matrix file: bad pair");
            if (!matrix.id_universe.contains(ends[0]) || !matrix.id_universe.contains(ends[1])) {
                throw FormatError("transition matrix file: pair endpoint outside id universe");
            }
            matrix.allowed.insert(TransitionMatrix::pack(ends[0], ends[1]));
        }
        return matrix;
    } catch (const json::exception& e) {
        throw FormatError(std::string("transition matrix file: ") + e.what());
    }
}

}  // namespace canids
