#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "canids/frame.hpp"

namespace canids {

enum class LogFormat { hcrl, csv };

struct ParseWarning {
    std::size_t line_number = 0;  // 1-based
    std::string message;
};

struct ParseResult {
    FrameStream stream;
    std::vector<ParseWarning> warnings;
};

// HCRL-style text capture, e.g.
//   Timestamp: 1478198376.389427 ID: 0316 000 DLC: 8 05 21 68 09 21 21 00 6f
// Lines are token-scanned (extra columns tolerated). Malformed lines are
// skipped and recorded as warnings; more than 50% malformed data lines is a
// format mismatch.
ParseResult parse_hcrl(std::istream& in, std::string source);
ParseResult parse_hcrl(std::string_view text, std::string source = "string");

// Canonical CSV: header `timestamp,arbitration_id,dlc,data,label`, data as
// contiguous hex (2*dlc chars), label one of ``, `normal`, `injected`.
// Header mismatch or a bad row is a hard error.
ParseResult parse_csv(std::istream& in, std::string source);
ParseResult parse_csv(std::string_view text, std::string source = "string");

void emit_csv(const FrameStream& stream, std::ostream& out);
std::string emit_csv(const FrameStream& stream);

inline constexpr std::string_view kCsvHeader = "timestamp,arbitration_id,dlc,data,label";

// Decides hcrl vs csv from the first line of a capture.
LogFormat sniff_format(std::string_view first_line);

std::string_view to_string(FrameLabel label);

}  // namespace canids
