#include "canids/can_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "canids/errors.hpp"

namespace canids {

namespace {

bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool parse_hex(std::string_view s, std::uint32_t& out) {
    if (s.empty() || s.size() > 8) return false;
    std::uint32_t value = 0;
    for (char c : s) {
        if (!is_hex_digit(c)) return false;
        value <<= 4;
        if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
        else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(10 + c - 'a');
        else value |= static_cast<std::uint32_t>(10 + c - 'A');
    }
    out = value;
    return true;
}

bool parse_timestamp(std::string_view s, double& out) {
    if (s.empty()) return false;
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || v < 0.0) return false;
    out = v;
    return true;
}

// Assigns width from the parsed value and the written digit count: more than
// four hex digits, or a value outside the 11-bit range, means extended.
bool assign_id(std::string_view hex, CanFrame& frame, std::string& err) {
    std::uint32_t id = 0;
    if (!parse_hex(hex, id)) {
        err = "bad arbitration id '" + std::string(hex) + "'";
        return false;
    }
    frame.id_width = (hex.size() > 4 || id > kStandardIdMax) ? IdWidth::extended : IdWidth::standard;
    if (id > max_id_for(frame.id_width)) {
        err = "arbitration id out of range";
        return false;
    }
    frame.arbitration_id = id;
    return true;
}

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

// Token scan: find `key`, return the index of the token after it.
bool token_after(const std::vector<std::string_view>& tokens, std::string_view key,
                 std::size_t& index_out) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i] == key) {
            index_out = i + 1;
            return true;
        }
    }
    return false;
}

bool parse_hcrl_line(std::string_view line, CanFrame& frame, std::string& err) {
    auto tokens = tokenize(line);
    std::size_t ts_idx = 0, id_idx = 0, dlc_idx = 0;
    if (!token_after(tokens, "Timestamp:", ts_idx)) {
        err = "missing Timestamp: token";
        return false;
    }
    if (!token_after(tokens, "ID:", id_idx)) {
        err = "missing ID: token";
        return false;
    }
    if (!token_after(tokens, "DLC:", dlc_idx)) {
        err = "missing DLC: token";
        return false;
    }
    if (!parse_timestamp(tokens[ts_idx], frame.timestamp)) {
        err = "bad timestamp '" + std::string(tokens[ts_idx]) + "'";
        return false;
    }
    if (!assign_id(tokens[id_idx], frame, err)) return false;

    std::uint32_t dlc = 0;
    auto dlc_tok = tokens[dlc_idx];
    auto [p, ec] = std::from_chars(dlc_tok.data(), dlc_tok.data() + dlc_tok.size(), dlc);
    if (ec != std::errc() || p != dlc_tok.data() + dlc_tok.size() || dlc > kMaxDlc) {
        err = "bad DLC '" + std::string(dlc_tok) + "'";
        return false;
    }
    frame.dlc = static_cast<std::uint8_t>(dlc);

    if (tokens.size() < dlc_idx + 1 + dlc) {
        err = "expected " + std::to_string(dlc) + " payload bytes";
        return false;
    }
    for (std::uint32_t i = 0; i < dlc; ++i) {
        auto tok = tokens[dlc_idx + 1 + i];
        std::uint32_t byte = 0;
        if (tok.size() != 2 || !parse_hex(tok, byte)) {
            err = "bad payload byte '" + std::string(tok) + "'";
            return false;
        }
        frame.payload[i] = static_cast<std::uint8_t>(byte);
    }
    frame.label = FrameLabel::unlabeled;
    return true;
}

void check_monotonic(const FrameStream& stream, std::size_t line_number,
                     std::vector<ParseWarning>& warnings) {
    auto n = stream.frames.size();
    if (n >= 2 && stream.frames[n - 1].timestamp < stream.frames[n - 2].timestamp) {
        warnings.push_back({line_number, "timestamp regression"});
    }
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace

ParseResult parse_hcrl(std::istream& in, std::string source) {
    if (!in.good()) throw FormatError(source + ": unreadable input");
    ParseResult result;
    result.stream.source = std::move(source);

    std::string line;
    std::size_t line_number = 0;
    std::size_t data_lines = 0;
    std::size_t first_bad_line = 0;
    std::string first_bad_msg;

    while (std::getline(in, line)) {
        ++line_number;
        std::string_view sv = strip_cr(line);
        if (sv.find_first_not_of(" \t") == std::string_view::npos) continue;
        ++data_lines;
        CanFrame frame;
        std::string err;
        if (parse_hcrl_line(sv, frame, err)) {
            result.stream.frames.push_back(frame);
            check_monotonic(result.stream, line_number, result.warnings);
        } else {
            if (first_bad_line == 0) {
                first_bad_line = line_number;
                first_bad_msg = err;
            }
            result.warnings.push_back({line_number, err});
        }
    }
    if (in.bad()) throw FormatError(result.stream.source + ": stream error while reading");

    std::size_t malformed = data_lines - result.stream.frames.size();
    if (data_lines > 0 && malformed * 2 > data_lines) {
        throw FormatError(result.stream.source + ": not HCRL format (line " +
                          std::to_string(first_bad_line) + ": " + first_bad_msg + ")");
    }
    return result;
}

ParseResult parse_hcrl(std::string_view text, std::string source) {
    std::istringstream in{std::string(text)};
    return parse_hcrl(in, std::move(source));
}

ParseResult parse_csv(std::istream& in, std::string source) {
    if (!in.good()) throw FormatError(source + ": unreadable input");
    ParseResult result;
    result.stream.source = std::move(source);

    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError(result.stream.source + ": empty file, expected CSV header");
    }
    if (strip_cr(line) != kCsvHeader) {
        throw FormatError(result.stream.source + ": header mismatch, expected `" +
                          std::string(kCsvHeader) + "`");
    }

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        std::string_view sv = strip_cr(line);
        if (sv.empty()) continue;
        auto fail = [&](const std::string& msg) -> void {
            throw FormatError(result.stream.source + ": row " + std::to_string(line_number) +
                              ": " + msg);
        };
        auto fields = split_csv(sv);
        if (fields.size() != 5) fail("expected 5 fields, got " + std::to_string(fields.size()));

        CanFrame frame;
        if (!parse_timestamp(fields[0], frame.timestamp)) fail("bad timestamp");
        std::string err;
        if (!assign_id(fields[1], frame, err)) fail(err);

        std::uint32_t dlc = 0;
        auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), dlc);
        if (ec != std::errc() || p != fields[2].data() + fields[2].size() || dlc > kMaxDlc) {
            fail("bad dlc");
        }
        frame.dlc = static_cast<std::uint8_t>(dlc);

        auto data = fields[3];
        if (data.size() != 2 * static_cast<std::size_t>(dlc)) {
            fail("data length " + std::to_string(data.size()) + " does not match dlc " +
                 std::to_string(dlc));
        }
        for (std::uint32_t i = 0; i < dlc; ++i) {
            std::uint32_t byte = 0;
            if (!parse_hex(data.substr(2 * i, 2), byte)) fail("bad data hex");
            frame.payload[i] = static_cast<std::uint8_t>(byte);
        }

        auto label = fields[4];
        if (label.empty()) frame.label = FrameLabel::unlabeled;
        else if (label == "normal") frame.label = FrameLabel::normal;
        else if (label == "injected") frame.label = FrameLabel::injected;
        else fail("bad label '" + std::string(label) + "'");

        result.stream.frames.push_back(frame);
        check_monotonic(result.stream, line_number, result.warnings);
    }
    if (in.bad()) throw FormatError(result.stream.source + ": stream error while reading");
    return result;
}

ParseResult parse_csv(std::string_view text, std::string source) {
    std::istringstream in{std::string(text)};
    return parse_csv(in, std::move(source));
}

void emit_csv(const FrameStream& stream, std::ostream& out) {
    out << kCsvHeader << '\n';
    char buf[64];
    for (const auto& frame : stream.frames) {
        std::snprintf(buf, sizeof(buf), "%.6f,", frame.timestamp);
        out << buf;
        std::snprintf(buf, sizeof(buf), frame.id_width == IdWidth::standard ? "%04x" : "%08x",
                      frame.arbitration_id);
        out << buf << ',' << static_cast<unsigned>(frame.dlc) << ',';
        for (std::uint8_t i = 0; i < frame.dlc; ++i) {
            std::snprintf(buf, sizeof(buf), "%02x", frame.payload[i]);
            out << buf;
        }
        out << ',' << to_string(frame.label) << '\n';
    }
}

std::string emit_csv(const FrameStream& stream) {
    std::ostringstream out;
    emit_csv(stream, out);
    return out.str();
}

LogFormat sniff_format(std::string_view first_line) {
    first_line = strip_cr(first_line);
    if (first_line.find("Timestamp:") != std::string_view::npos) return LogFormat::hcrl;
    if (first_line == kCsvHeader) return LogFormat::csv;
    throw FormatError("cannot auto-detect format from first line");
}

std::string_view to_string(FrameLabel label) {
    switch (label) {
        case FrameLabel::normal: return "normal";
        case FrameLabel::injected: return "injected";
        case FrameLabel::unlabeled: break;
    }
    return "";
}

}  // namespace canids
