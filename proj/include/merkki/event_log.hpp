#pragma once

// Canonical event records and the line-delimited log format.
//
// One record per line, fields separated by a single tab:
//
//   <time>\t<device>\t<KIND>[\t<key>=<value>]...\n
//
// time is seconds with three decimals, device a decimal id, and payload keys
// appear in ascending byte order. parse_log accepts only canonical text, so
// serialize_log(parse_log(text)) == text for every accepted input.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "merkki/core.hpp"

namespace merkki {

// Declaration order is the tie-break rank used when sorting records that share
// a timestamp and device. Raw gestures come first so that a gesture precedes
// its own effects.
enum class EventKind : std::uint8_t {
    TapL,
    TapR,
    HoldLStart,
    HoldLEnd,
    HoldRStart,
    HoldREnd,
    HoldLR,
    PushA,
    PushB,
    PowerOn,
    TierChange,
    Exchange,
    PictureSelect,
    AnimSelect,
    TempoSet,
    SearchStart,
    SearchStop,
    Battery,
    PowerOff,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

struct EventRecord {
    SimTime time;
    DeviceId device{};
    EventKind kind = EventKind::PowerOn;
    std::map<std::string, std::string> fields;

    const std::string* field(const std::string& key) const;

    bool operator==(const EventRecord&) const = default;
};

using EventLog = std::vector<EventRecord>;

// Payload of one side of a trade, seen from `EventRecord::device`.
struct ExchangePayload {
    DeviceId partner{};
    PictureId sent{};
    PictureId received{};
    bool duplicate = false;

    bool operator==(const ExchangePayload&) const = default;
};

EventRecord make_exchange_record(SimTime time, DeviceId device, const ExchangePayload& payload);
// Returns nullopt when the record is not a well-formed EXCHANGE.
std::optional<ExchangePayload> exchange_payload(const EventRecord& record);

// Comma-separated picture list as used by POWER_ON's `pictures` field.
std::string format_picture_list(const std::vector<PictureId>& pictures);
std::optional<std::vector<PictureId>> parse_picture_list(std::string_view text);

std::string format_fixed3(double value);

class LogParseError : public std::runtime_error {
public:
    LogParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

std::string serialize_record(const EventRecord& record);
std::string serialize_log(const EventLog& log);
// Throws LogParseError naming the 1-based line of the first problem.
EventLog parse_log(std::string_view text);

// Stable sort by (time, device, kind rank).
void sort_log(EventLog& log);

}  // namespace merkki
