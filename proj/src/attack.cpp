#include "canids/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <json.hpp>

#include "canids/errors.hpp"

namespace canids {

namespace {

using nlohmann::json;

constexpr std::array<std::uint8_t, 8> kSpoofPayload = {0x05, 0x21, 0x68, 0x09,
                                                       0x21, 0x21, 0x00, 0x6f};

// Bounded draw by rejection so results do not depend on the standard
// library's uniform_int_distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

struct Region {
    std::size_t begin;
    std::size_t end;
    std::size_t length() const { return end - begin; }
};

Region resolve_region(const FrameStream& stream, const AttackSpec& spec) {
    Region r{spec.region.begin, spec.region.end};
    if (spec.region.whole_stream() && spec.region.begin == 0) {
        r = {0, stream.frames.size()};
    }
    if (r.begin >= r.end) throw ConfigError("empty attack region");
    if (r.end > stream.frames.size()) {
        throw ConfigError("attack region [" + std::to_string(r.begin) + ", " +
                          std::to_string(r.end) + ") exceeds stream of " +
                          std::to_string(stream.frames.size()) + " frames");
    }
    return r;
}

void validate_ratio(double ratio) {
    if (!(ratio > 0.0) || !(ratio < 1.0)) {
        throw ConfigError("injection ratio must be in (0,1), got " + std::to_string(ratio));
    }
}

// Slots in the output region occupied by injected frames.
std::vector<std::size_t> random_slots(std::size_t total, std::size_t n_injected,
                                      std::mt19937_64& rng) {
    std::vector<std::size_t> slots(total);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_injected; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, total - i));
        std::swap(slots[i], slots[j]);
    }
    slots.resize(n_injected);
    std::sort(slots.begin(), slots.end());
    return slots;
}

// Evenly spaced slots, preserving the injected sequence's relative pacing.
std::vector<std::size_t> even_slots(std::size_t total, std::size_t n_injected) {
    std::vector<std::size_t> slots(n_injected);
    std::size_t prev = 0;
    for (std::size_t k = 0; k < n_injected; ++k) {
        auto pos = static_cast<std::size_t>(
            (static_cast<double>(k + 1) * static_cast<double>(total)) /
            static_cast<double>(n_injected + 1));
        pos = std::max(pos, k == 0 ? pos : prev + 1);
        slots[k] = std::min(pos, total - n_injected + k);
        prev = slots[k];
    }
    return slots;
}

// Assembles output = prefix + interleaved region + suffix, relabels originals,
// and interpolates timestamps for the inserted frames.
FrameStream assemble(const FrameStream& stream, const Region& region,
                     const std::vector<CanFrame>& injected,
                     const std::vector<std::size_t>& slots) {
    const auto& frames = stream.frames;
    std::size_t total = region.length() + injected.size();

    FrameStream out;
    out.source = stream.source;
    out.frames.reserve(frames.size() + injected.size());
    std::vector<bool> inserted(total, false);

    for (std::size_t i = 0; i < region.begin; ++i) out.frames.push_back(frames[i]);

    std::size_t next_injected = 0;
    std::size_t next_original = region.begin;
    for (std::size_t slot = 0; slot < total; ++slot) {
        if (next_injected < slots.size() && slots[next_injected] == slot) {
            out.frames.push_back(injected[next_injected]);
            inserted[slot] = true;
            ++next_injected;
        } else {
            out.frames.push_back(frames[next_original++]);
        }
    }
    for (std::size_t i = region.end; i < frames.size(); ++i) out.frames.push_back(frames[i]);

    for (auto& frame : out.frames) {
        if (frame.label != FrameLabel::injected) frame.label = FrameLabel::normal;
    }

    // Timestamps: each run of inserted frames is spread evenly between its
    // neighbours' timestamps.
    std::size_t region_out_begin = region.begin;
    std::size_t slot = 0;
    while (slot < total) {
        if (!inserted[slot]) {
            ++slot;
            continue;
        }
        std::size_t run_begin = slot;
        while (slot < total && inserted[slot]) ++slot;
        std::size_t run_len = slot - run_begin;

        std::size_t out_begin = region_out_begin + run_begin;
        std::size_t out_end = region_out_begin + slot;
        bool has_left = out_begin > 0;
        bool has_right = out_end < out.frames.size();
        double t_left = has_left ? out.frames[out_begin - 1].timestamp
                                 : out.frames[out_end].timestamp;
        double t_right = has_right ? out.frames[out_end].timestamp : t_left;
        if (t_right < t_left) t_right = t_left;
        for (std::size_t k = 0; k < run_len; ++k) {
            out.frames[out_begin + k].timestamp =
                t_left + (t_right - t_left) * static_cast<double>(k + 1) /
                             static_cast<double>(run_len + 1);
        }
    }
    return out;
}

void require_kind(const AttackSpec& spec, AttackKind kind) {
    if (spec.kind != kind) {
        throw ConfigError(std::string("attack spec kind is ") + std::string(to_string(spec.kind)) +
                          ", expected " + std::string(to_string(kind)));
    }
}

IdWidth width_for(std::uint32_t id) {
    return id > kStandardIdMax ? IdWidth::extended : IdWidth::standard;
}

}  // namespace

std::size_t injected_count_for(double injection_ratio, std::size_t region_length) {
    validate_ratio(injection_ratio);
    return static_cast<std::size_t>(
        std::llround(injection_ratio / (1.0 - injection_ratio) *
                     static_cast<double>(region_length)));
}

FrameStream inject_dos(const FrameStream& stream, const AttackSpec& spec) {
    require_kind(spec, AttackKind::dos);
    Region region = resolve_region(stream, spec);
    std::size_t n = injected_count_for(spec.injection_ratio, region.length());
    std::mt19937_64 rng(spec.seed);
    auto slots = random_slots(region.length() + n, n, rng);

    CanFrame flood;
    flood.arbitration_id = kDosId;
    flood.id_width = IdWidth::standard;
    flood.dlc = kMaxDlc;
    flood.label = FrameLabel::injected;
    std::vector<CanFrame> injected(n, flood);
    return assemble(stream, region, injected, slots);
}

FrameStream inject_fuzzy(const FrameStream& stream, const AttackSpec& spec) {
    require_kind(spec, AttackKind::fuzzy);
    auto [lo, hi] = spec.id_range;
    if (lo > hi || hi > kExtendedIdMax) throw ConfigError("empty or invalid fuzzy id range");
    Region region = resolve_region(stream, spec);
    std::size_t n = injected_count_for(spec.injection_ratio, region.length());
    std::mt19937_64 rng(spec.seed);
    auto slots = random_slots(region.length() + n, n, rng);

    std::vector<CanFrame> injected(n);
    for (auto& frame : injected) {
        frame.arbitration_id = lo + static_cast<std::uint32_t>(uniform_below(rng, hi - lo + 1));
        frame.id_width = width_for(frame.arbitration_id);
        frame.dlc = kMaxDlc;
        for (auto& byte : frame.payload) byte = static_cast<std::uint8_t>(uniform_below(rng, 256));
        frame.label = FrameLabel::injected;
    }
    return assemble(stream, region, injected, slots);
}

FrameStream inject_spoof(const FrameStream& stream, const AttackSpec& spec) {
    require_kind(spec, AttackKind::spoof);
    if (spec.target_id > kExtendedIdMax) throw ConfigError("spoof target id out of range");
    Region region = resolve_region(stream, spec);
    std::size_t n = injected_count_for(spec.injection_ratio, region.length());
    std::mt19937_64 rng(spec.seed);
    auto slots = random_slots(region.length() + n, n, rng);

    CanFrame forged;
    forged.arbitration_id = spec.target_id;
    forged.id_width = width_for(spec.target_id);
    forged.dlc = kMaxDlc;
    forged.payload = kSpoofPayload;
    forged.label = FrameLabel::injected;
    std::vector<CanFrame> injected(n, forged);
    return assemble(stream, region, injected, slots);
}

FrameStream inject_replay(const FrameStream& stream, const AttackSpec& spec) {
    require_kind(spec, AttackKind::replay);
    Region region = resolve_region(stream, spec);
    std::size_t n = injected_count_for(spec.injection_ratio, region.length());
    std::size_t history = std::max(region.length(), n);
    if (region.begin < history) {
        throw ConfigError("replay needs " + std::to_string(history) +
                          " frames of history before the region, have " +
                          std::to_string(region.begin));
    }
    for (std::size_t i = region.begin - history; i < region.begin; ++i) {
        if (stream.frames[i].label == FrameLabel::injected) {
            throw ConfigError("replay history overlaps injected traffic");
        }
    }

    // Replays the oldest part of the clean history span.
    std::size_t source = region.begin - history;
    std::vector<CanFrame> injected(stream.frames.begin() + source,
                                   stream.frames.begin() + source + n);
    for (auto& frame : injected) frame.label = FrameLabel::injected;
    auto slots = even_slots(region.length() + n, n);
    return assemble(stream, region, injected, slots);
}

FrameStream inject_combined(const FrameStream& stream, const AttackSpec& spec) {
    require_kind(spec, AttackKind::combined);
    if (spec.sub_specs.empty()) throw ConfigError("combined attack needs at least one sub spec");
    FrameStream current = stream;
    for (const auto& sub : spec.sub_specs) {
        if (sub.kind == AttackKind::combined) {
            throw ConfigError("combined attack cannot nest combined sub specs");
        }
        current = inject(current, sub);
    }
    return current;
}

FrameStream inject(const FrameStream& stream, const AttackSpec& spec) {
    switch (spec.kind) {
        case AttackKind::dos: return inject_dos(stream, spec);
        case AttackKind::fuzzy: return inject_fuzzy(stream, spec);
        case AttackKind::spoof: return inject_spoof(stream, spec);
        case AttackKind::replay: return inject_replay(stream, spec);
        case AttackKind::combined: return inject_combined(stream, spec);
    }
    throw ConfigError("unknown attack kind");
}

namespace {

AttackSpec spec_from_json_obj(const json& doc) {
    AttackSpec spec;
    try {
        spec.kind = attack_kind_from_string(doc.at("kind").get<std::string>());
        if (doc.contains("injection_ratio"))spec.injection_ratio = doc["injection_ratio"].get<double>();
        if (doc.contains("target_id")) spec.target_id = doc["target_id"].get<std::uint32_t>();
        if (doc.contains("id_range")) {
            auto range = doc["id_range"].get<std::vector<std::uint32_t>>();
            if (range.size() != 2) throw ConfigError("id_range must be [lo, hi]");
            spec.id_range = {range[0], range[1]};
        }
        if (doc.contains("region")) {
            auto region = doc["region"].get<std::vector<std::size_t>>();
            if (region.size() != 2) throw ConfigError("region must be [begin, end]");
            spec.region = {region[0], region[1]};
        }
        if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("sub_specs")) {
            for (const auto& sub : doc["sub_specs"]) {
                spec.sub_specs.push_back(spec_from_json_obj(sub));
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("attack spec: ") + e.what());
    }
    return spec;
}

json spec_to_json_obj(const AttackSpec& spec) {
    json doc;
    doc["kind"] = std::string(to_string(spec.kind));
    doc["injection_ratio"] = spec.injection_ratio;
    doc["target_id"] = spec.target_id;
    doc["id_range"] = {spec.id_range.first, spec.id_range.second};
    doc["region"] = {spec.region.begin, spec.region.end};
    doc["seed"] = spec.seed;
    if (!spec.sub_specs.empty()) {
        doc["sub_specs"] = json::array();
        for (const auto& sub : spec.sub_specs) doc["sub_specs"].push_back(spec_to_json_obj(sub));
    }
    return doc;
}

}  // namespace

AttackSpec attack_spec_from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("attack spec: ") + e.what());
    }
    return spec_from_json_obj(doc);
}

std::string attack_spec_to_json(const AttackSpec& spec) {
    return spec_to_json_obj(spec).dump(2) + "\n";
}

AttackKind attack_kind_from_string(std::string_view name) {
    if (name == "dos") return AttackKind::dos;
    if (name == "fuzzy") return AttackKind::fuzzy;
    if (name == "spoof") return AttackKind::spoof;
    if (name == "replay") return AttackKind::replay;
    if (name == "combined") return AttackKind::combined;
    throw ConfigError("unknown attack kind '" + std::string(name) +
                      "'; expected dos, fuzzy, spoof, replay or combined");
}

std::string_view to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::dos: return "dos";
        case AttackKind::fuzzy: return "fuzzy";
        case AttackKind::spoof: return "spoof";
        case AttackKind::replay: return "replay";
        case AttackKind::combined: return "combined";
    }
    return "unknown";
}

}  // namespace canids
