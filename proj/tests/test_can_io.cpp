#include <random>
#include <sstream>

#include <doctest.h>

#include "canids/can_io.hpp"
#include "canids/errors.hpp"

using namespace canids;

namespace {

// Random streams with microsecond-granular timestamps (what both text
// formats carry).
FrameStream random_stream(std::mt19937_64& rng, std::size_t n) {
    FrameStream stream;
    stream.source = "random";
    std::uint64_t micros = 1478198376000000ULL;
    for (std::size_t i = 0; i < n; ++i) {
        CanFrame frame;
        micros += rng() % 2000;
        frame.timestamp = static_cast<double>(micros) / 1e6;
        if (rng() % 8 == 0) {
            frame.id_width = IdWidth::extended;
            frame.arbitration_id = static_cast<std::uint32_t>(rng() % (kExtendedIdMax + 1ULL));
        } else {
            frame.id_width = IdWidth::standard;
            frame.arbitration_id = static_cast<std::uint32_t>(rng() % (kStandardIdMax + 1));
        }
        frame.dlc = static_cast<std::uint8_t>(rng() % 9);
        for (std::uint8_t b = 0; b < frame.dlc; ++b) {
            frame.payload[b] = static_cast<std::uint8_t>(rng() % 256);
        }
        frame.label = static_cast<FrameLabel>(rng() % 3);
        stream.frames.push_back(frame);
    }
    return stream;
}

}  // namespace

TEST_CASE("parse_hcrl: reference line") {
    auto result = parse_hcrl(
        "Timestamp: 1478198376.389427        ID: 0316    000    DLC: 8    05 21 68 09 21 21 00 6f\n",
        "fixture");
    REQUIRE(result.stream.frames.size() == 1);
    CHECK(result.warnings.empty());
    const auto& frame = result.stream.frames[0];
    CHECK(frame.timestamp == doctest::Approx(1478198376.389427).epsilon(1e-12));
    CHECK(frame.arbitration_id == 0x0316);
    CHECK(frame.id_width == IdWidth::standard);
    CHECK(frame.dlc == 8);
    std::array<std::uint8_t, 8> payload = {0x05, 0x21, 0x68, 0x09, 0x21, 0x21, 0x00, 0x6f};
    CHECK(frame.payload == payload);
    CHECK(frame.label == FrameLabel::unlabeled);
}

TEST_CASE("parse_hcrl: empty input") {
    auto result = parse_hcrl("", "empty");
    CHECK(result.stream.frames.empty());
    CHECK(result.warnings.empty());
}

TEST_CASE("parse_hcrl: hand-built short payload round-trips") {
    auto result = parse_hcrl("Timestamp: 1.000002 ID: 07ff 000 DLC: 2 aa bb\n", "fixture");
    REQUIRE(result.stream.frames.size() == 1);
    CHECK(result.stream.frames[0].dlc == 2);
    CHECK(result.stream.frames[0].payload[0] == 0xaa);
    CHECK(result.stream.frames[0].payload[1] == 0xbb);

    auto round = parse_csv(emit_csv(result.stream), "round");
    REQUIRE(round.stream.frames.size() == 1);
    CHECK(round.stream.frames[0].dlc == 2);
    CHECK(round.stream.frames[0].arbitration_id == 0x7ff);
}

TEST_CASE("parse_hcrl: malformed lines are recorded, not dropped silently") {
    std::string text =
        "Timestamp: 1.0 ID: 0100 000 DLC: 1 aa\n"
        "garbage line\n"
        "Timestamp: 2.0 ID: 0101 000 DLC: 1 bb\n"
        "Timestamp: 3.0 ID: zzzz 000 DLC: 1 cc\n"
        "Timestamp: 4.0 ID: 0103 000 DLC: 1 dd\n";
    auto result = parse_hcrl(text, "fixture");
    CHECK(result.stream.frames.size() == 3);
    REQUIRE(result.warnings.size() == 2);
    CHECK(result.warnings[0].line_number == 2);
    CHECK(result.warnings[1].line_number == 4);
}

TEST_CASE("parse_hcrl: mostly-malformed input is a format mismatch") {
    std::string text =
        "a,b,c\n"
        "1,2,3\n"
        "Timestamp: 1.0 ID: 0100 000 DLC: 0\n";
    CHECK_THROWS_WITH_AS(parse_hcrl(text, "bad"), doctest::Contains("line 1"), FormatError);
}

TEST_CASE("parse_hcrl: mixed-case hex accepted, emit is lowercase") {
    auto result = parse_hcrl("Timestamp: 1.0 ID: 03AB 000 DLC: 2 0F fe\n", "fixture");
    REQUIRE(result.stream.frames.size() == 1);
    CHECK(result.stream.frames[0].arbitration_id == 0x3ab);
    auto csv = emit_csv(result.stream);
    CHECK(csv.find("03ab") != std::string::npos);
    CHECK(csv.find("0ffe") != std::string::npos);
    CHECK(csv.find("AB") == std::string::npos);
}

TEST_CASE("parse_hcrl: timestamp regression is a warning, not an error") {
    std::string text =
        "Timestamp: 2.0 ID: 0100 000 DLC: 0\n"
        "Timestamp: 1.0 ID: 0101 000 DLC: 0\n";
    auto result = parse_hcrl(text, "fixture");
    CHECK(result.stream.frames.size() == 2);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].message == "timestamp regression");
}

TEST_CASE("parse_csv: reference row") {
    std::string text = std::string(kCsvHeader) +
                       "\n1478198376.389427,0316,8,052168092121006f,normal\n";
    auto result = parse_csv(text, "fixture");
    REQUIRE(result.stream.frames.size() == 1);
    const auto& frame = result.stream.frames[0];
    CHECK(frame.timestamp == doctest::Approx(1478198376.389427).epsilon(1e-12));
    CHECK(frame.arbitration_id == 0x0316);
    CHECK(frame.dlc == 8);
    CHECK(frame.payload[7] == 0x6f);
    CHECK(frame.label == FrameLabel::normal);
}

TEST_CASE("parse_csv: zero/empty row") {
    std::string text = std::string(kCsvHeader) + "\n0.0,0000,0,,injected\n";
    auto result = parse_csv(text, "fixture");
    REQUIRE(result.stream.frames.size() == 1);
    const auto& frame = result.stream.frames[0];
    CHECK(frame.timestamp == 0.0);
    CHECK(frame.arbitration_id == 0);
    CHECK(frame.dlc == 0);
    CHECK(frame.label == FrameLabel::injected);
}

TEST_CASE("parse_csv: order preserved") {
    std::string text = std::string(kCsvHeader) +
                       "\n1.0,0001,0,,\n2.0,0002,0,,\n3.0,0003,0,,\n";
    auto result = parse_csv(text, "fixture");
    REQUIRE(result.stream.frames.size() == 3);
    CHECK(result.stream.frames[0].arbitration_id == 1);
    CHECK(result.stream.frames[1].arbitration_id == 2);
    CHECK(result.stream.frames[2].arbitration_id == 3);
}

TEST_CASE("parse_csv: header and row errors") {
    CHECK_THROWS_AS(parse_csv("time,id\n", "bad"), FormatError);
    CHECK_THROWS_AS(parse_csv("", "bad"), FormatError);

    std::string mismatch = std::string(kCsvHeader) + "\n1.0,0001,2,aa,\n";
    CHECK_THROWS_WITH_AS(parse_csv(mismatch, "bad"), doctest::Contains("row 2"), FormatError);

    std::string bad_label = std::string(kCsvHeader) + "\n1.0,0001,0,,bogus\n";
    CHECK_THROWS_AS(parse_csv(bad_label, "bad"), FormatError);
}

TEST_CASE("emit_csv: empty and single-frame streams") {
    FrameStream empty;
    CHECK(emit_csv(empty) == std::string(kCsvHeader) + "\n");

    FrameStream one;
    CanFrame frame;
    frame.timestamp = 1.5;
    frame.arbitration_id = 0x43f;
    frame.dlc = 1;
    frame.payload[0] = 0xff;
    one.frames.push_back(frame);
    CHECK(emit_csv(one) == std::string(kCsvHeader) + "\n1.500000,043f,1,ff,\n");
}

TEST_CASE("emit_csv is idempotent after one round trip") {
    std::string text =
        "Timestamp: 1478198376.389427 ID: 0316 000 DLC: 8 05 21 68 09 21 21 00 6f\n"
        "Timestamp: 1478198376.395436 ID: 018f 000 DLC: 8 fe 5b 00 00 00 3c 00 00\n"
        "Timestamp: 1478198376.400501 ID: 0260 000 DLC: 8 19 21 22 30 08 8e 6d 3a\n";
    auto first = emit_csv(parse_hcrl(text, "fixture").stream);
    auto second = emit_csv(parse_csv(first, "round").stream);
    CHECK(first == second);
}

TEST_CASE("round trip: parse_csv(emit_csv(s)) == s") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        auto stream = random_stream(rng, 1 + rng() % 60);
        auto round = parse_csv(emit_csv(stream), "round");
        REQUIRE(round.stream.frames.size() == stream.frames.size());
        for (std::size_t i = 0; i < stream.frames.size(); ++i) {
            CHECK(round.stream.frames[i] == stream.frames[i]);
        }
    }
}

TEST_CASE("sniff_format") {
    CHECK(sniff_format("Timestamp: 1.0 ID: 0100 000 DLC: 0") == LogFormat::hcrl);
    CHECK(sniff_format(kCsvHeader) == LogFormat::csv);
    CHECK_THROWS_AS(sniff_format("something else"), FormatError);
}
