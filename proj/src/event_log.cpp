#include "merkki/event_log.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace merkki {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 19> kKindNames{{
    {EventKind::TapL, "TAP_L"},
    {EventKind::TapR, "TAP_R"},
    {EventKind::HoldLStart, "HOLD_L_START"},
    {EventKind::HoldLEnd, "HOLD_L_END"},
    {EventKind::HoldRStart, "HOLD_R_START"},
    {EventKind::HoldREnd, "HOLD_R_END"},
    {EventKind::HoldLR, "HOLD_LR"},
    {EventKind::PushA, "PUSH_A"},
    {EventKind::PushB, "PUSH_B"},
    {EventKind::PowerOn, "POWER_ON"},
    {EventKind::TierChange, "TIER_CHANGE"},
    {EventKind::Exchange, "EXCHANGE"},
    {EventKind::PictureSelect, "PICTURE_SELECT"},
    {EventKind::AnimSelect, "ANIM_SELECT"},
    {EventKind::TempoSet, "TEMPO_SET"},
    {EventKind::SearchStart, "SEARCH_START"},
    {EventKind::SearchStop, "SEARCH_STOP"},
    {EventKind::Battery, "BATTERY"},
    {EventKind::PowerOff, "POWER_OFF"},
}};

// Canonical non-negative decimal: no sign, no leading zeros.
std::optional<std::uint32_t> parse_id(std::string_view text) {
    if (text.empty() || (text.size() > 1 && text.front() == '0')) {
        return std::nullopt;
    }
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    return kKindNames[static_cast<std::size_t>(kind)].second;
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
    for (const auto& [kind, name] : kKindNames) {
        if (name == text) {
            return kind;
        }
    }
    return std::nullopt;
}

const std::string* EventRecord::field(const std::string& key) const {
    auto it = fields.find(key);
    return it == fields.end() ? nullptr : &it->second;
}

EventRecord make_exchange_record(SimTime time, DeviceId device, const ExchangePayload& payload) {
    EventRecord rec{time, device, EventKind::Exchange, {}};
    rec.fields["duplicate"] = payload.duplicate ? "1" : "0";
    rec.fields["partner"] = to_string(payload.partner);
    rec.fields["received"] = to_string(payload.received);
    rec.fields["sent"] = to_string(payload.sent);
    return rec;
}

std::optional<ExchangePayload> exchange_payload(const EventRecord& record) {
    if (record.kind != EventKind::Exchange) {
        return std::nullopt;
    }
    const auto* dup = record.field("duplicate");
    const auto* partner = record.field("partner");
    const auto* received = record.field("received");
    const auto* sent = record.field("sent");
    if (!dup || !partner || !received || !sent || (*dup != "0" && *dup != "1")) {
        return std::nullopt;
    }
    auto p = parse_id(*partner);
    auto r = parse_id(*received);
    auto s = parse_id(*sent);
    if (!p || !r || !s) {
        return std::nullopt;
    }
    return ExchangePayload{DeviceId{*p}, PictureId{*s}, PictureId{*r}, *dup == "1"};
}

std::string format_picture_list(const std::vector<PictureId>& pictures) {
    std::string out;
    for (std::size_t i = 0; i < pictures.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += to_string(pictures[i]);
    }
    return out;
}

std::optional<std::vector<PictureId>> parse_picture_list(std::string_view text) {
    std::vector<PictureId> out;
    if (text.empty()) {
        return out;
    }
    for (auto part : split(text, ',')) {
        auto id = parse_id(part);
        if (!id) {
            return std::nullopt;
        }
        out.push_back(PictureId{*id});
    }
    return out;
}

std::string format_fixed3(double value) {
    // Round half away from zero at the millesimal so the output never depends
    // on the platform's printf rounding mode.
    const auto scaled = std::llround(value * 1000.0);
    return SimTime::from_ms(scaled).to_string();
}

LogParseError::LogParseError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

std::string serialize_record(const EventRecord& record) {
    std::string out = record.time.to_string();
    out += '\t';
    out += to_string(record.device);
    out += '\t';
    out += to_string(record.kind);
    for (const auto& [key, value] : record.fields) {
        out += '\t';
        out += key;
        out += '=';
        out += value;
    }
    return out;
}

std::string serialize_log(const EventLog& log) {
    std::string out;
    for (const auto& rec : log) {
        out += serialize_record(rec);
        out += '\n';
    }
    return out;
}

EventLog parse_log(std::string_view text) {
    EventLog log;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        const auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            throw LogParseError(line_no, "missing terminating newline");
        }
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;

        const auto cols = split(line, '\t');
        if (cols.size() < 3) {
            throw LogParseError(line_no, "expected at least time, device and kind");
        }
        auto time = SimTime::parse(cols[0]);
        if (!time) {
            throw LogParseError(line_no, fmt::format("bad time '{}'", cols[0]));
        }
        if (!log.empty() && *time < log.back().time) {
            throw LogParseError(line_no, "time goes backwards");
        }
        auto device = parse_id(cols[1]);
        if (!device) {
            throw LogParseError(line_no, fmt::format("bad device id '{}'", cols[1]));
        }
        auto kind = parse_event_kind(cols[2]);
        if (!kind) {
            throw LogParseError(line_no, fmt::format("unknown event kind '{}'", cols[2]));
        }
        EventRecord rec{*time, DeviceId{*device}, *kind, {}};
        std::string previous_key;
        for (std::size_t i = 3; i < cols.size(); ++i) {
            const auto eq = cols[i].find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw LogParseError(line_no, fmt::format("bad payload field '{}'", cols[i]));
            }
            std::string key{cols[i].substr(0, eq)};
            if (!previous_key.empty() && key <= previous_key) {
                throw LogParseError(line_no, fmt::format("payload key '{}' out of order or repeated", key));
            }
            rec.fields.emplace(key, std::string{cols[i].substr(eq + 1)});
            previous_key = std::move(key);
        }
        if (rec.kind == EventKind::Exchange && !exchange_payload(rec)) {
            throw LogParseError(line_no, "malformed EXCHANGE payload");
        }
        log.push_back(std::move(rec));
    }
    return log;
}

void sort_log(EventLog& log) {
    std::stable_sort(log.begin(), log.end(), [](const EventRecord& a, const EventRecord& b) {
        if (a.time != b.time) {
            return a.time < b.time;
        }
        if (a.device != b.device) {
            return a.device < b.device;
        }
        return a.kind < b.kind;
    });
}

}  // namespace merkki
