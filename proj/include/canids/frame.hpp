#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace canids {

constexpr std::uint32_t kStandardIdMax = 0x7FF;       // 11-bit arbitration ID
constexpr std::uint32_t kExtendedIdMax = 0x1FFFFFFF;  // 29-bit arbitration ID
constexpr std::uint8_t kMaxDlc = 8;

enum class IdWidth : std::uint8_t { standard, extended };

enum class FrameLabel : std::uint8_t { unlabeled, normal, injected };

// One logged CAN message. Only the fields present in text captures are
// modeled; payload bytes beyond dlc are zero and ignored by comparisons.
struct CanFrame {
    double timestamp = 0.0;  // seconds since epoch, microsecond precision
    std::uint32_t arbitration_id = 0;
    IdWidth id_width = IdWidth::standard;
    std::uint8_t dlc = 0;
    std::array<std::uint8_t, kMaxDlc> payload{};
    FrameLabel label = FrameLabel::unlabeled;

    std::span<const std::uint8_t> payload_bytes() const {
        return {payload.data(), dlc};
    }

    friend bool operator==(const CanFrame& a, const CanFrame& b) {
        if (a.timestamp != b.timestamp || a.arbitration_id != b.arbitration_id ||
            a.id_width != b.id_width || a.dlc != b.dlc || a.label != b.label) {
            return false;
        }
        for (std::uint8_t i = 0; i < a.dlc; ++i) {
            if (a.payload[i] != b.payload[i]) return false;
        }
        return true;
    }
};

inline std::uint32_t max_id_for(IdWidth width) {
    return width == IdWidth::standard ? kStandardIdMax : kExtendedIdMax;
}

// Ordered sequence of frames exactly as read; immutable after construction.
struct FrameStream {
    std::vector<CanFrame> frames;
    std::string source;  // file path or "stdin"
};

}  // namespace canids
