#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "canids/frame.hpp"

namespace canids {

enum class AttackKind : std::uint8_t { dos, fuzzy, spoof, replay, combined };

inline constexpr std::uint32_t kDosId = 0x000;
inline constexpr std::uint32_t kDefaultSpoofTarget = 0x0316;

// Frame-index interval [begin, end) to corrupt; begin == end means the whole
// stream.
struct FrameRegion {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool whole_stream() const { return begin == end; }
};

struct AttackSpec {
    AttackKind kind = AttackKind::dos;
    // Fraction of frames in the attacked region (after injection) that are
    // injected. The injected count is round(ratio/(1-ratio) * region_length),
    // so the ratio must be in (0,1).
    double injection_ratio = 0.2;
    std::uint32_t target_id = kDefaultSpoofTarget;                  // spoof
    std::pair<std::uint32_t, std::uint32_t> id_range = {0x000, 0x7FF};  // fuzzy, inclusive
    FrameRegion region;
    std::uint64_t seed = 0;
    std::vector<AttackSpec> sub_specs;  // combined only
};

// All injectors preserve original frame order, label every emitted frame
// (originals become `normal` unless already `injected`), interpolate injected
// timestamps between neighbours, and are deterministic under a fixed seed.

// High-priority flooding: ID 0x000, dlc 8, zero payload, random positions.
FrameStream inject_dos(const FrameStream& stream, const AttackSpec& spec);

// Random IDs drawn uniformly from id_range with uniformly random payloads.
FrameStream inject_fuzzy(const FrameStream& stream, const AttackSpec& spec);

// One forged ID with a fixed payload, interleaved at the injection ratio.
FrameStream inject_spoof(const FrameStream& stream, const AttackSpec& spec);

// Copies the frames immediately preceding the region and interleaves them
// evenly (original relative pacing, ID mix and ordering preserved). Requires
// a clean region-length history before the region.
FrameStream inject_replay(const FrameStream& stream, const AttackSpec& spec);

// Applies sub_specs in sequence order; each sub-spec's region indexes the
// stream as it stands at that step.
FrameStream inject_combined(const FrameStream& stream, const AttackSpec& spec);

// Dispatch on spec.kind.
FrameStream inject(const FrameStream& stream, const AttackSpec& spec);

std::size_t injected_count_for(double injection_ratio, std::size_t region_length);

// AttackSpec <-> JSON with the same field names as the CLI flags.
AttackSpec attack_spec_from_json(std::string_view json_text);
std::string attack_spec_to_json(const AttackSpec& spec);

AttackKind attack_kind_from_string(std::string_view name);
std::string_view to_string(AttackKind kind);

}  // namespace canids
