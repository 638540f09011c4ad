#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

#include "canids/frame.hpp"

namespace canids {

// ID-sequence comparison method: remembers every consecutive arbitration-ID
// pair seen in attack-free traffic and flags windows containing unseen pairs.
struct TransitionMatrix {
    std::unordered_set<std::uint64_t> allowed;  // (from << 32) | to
    std::unordered_set<std::uint32_t> id_universe;

    static std::uint64_t pack(std::uint32_t from, std::uint32_t to) {
        return (static_cast<std::uint64_t>(from) << 32) | to;
    }

    bool contains(std::uint32_t from, std::uint32_t to) const {
        return allowed.contains(pack(from, to));
    }
};

TransitionMatrix baseline_train(const FrameStream& stream);

// Attacked iff the fraction of consecutive pairs absent from the matrix
// exceeds violation_threshold (0 = any unseen pair flags).
bool baseline_detect(const TransitionMatrix& matrix, std::span<const CanFrame> window_frames,
                     double violation_threshold = 0.0);

std::string save_transition_matrix(const TransitionMatrix& matrix);
TransitionMatrix load_transition_matrix(std::string_view text);

}  // namespace canids
