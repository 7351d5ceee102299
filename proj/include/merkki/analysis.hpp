#pragma once

// Quantitative artifacts computed from an event log: per-picture exchange
// statistics, the sender x picture share matrix, per-picture diffusion graphs,
// the repetition index and per-device collection timelines.
//
// Every EXCHANGE record is one delivery: the record's device received
// `received` from `partner`, and sent `sent` to it.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "merkki/event_log.hpp"
#include "merkki/scenario.hpp"

namespace merkki {

// The devices and pictures an analysis ranges over, with initial ownership.
struct Universe {
    std::vector<DeviceId> devices;    // ascending
    std::vector<PictureId> pictures;  // ascending
    std::map<PictureId, DeviceId> initial_owner;
    std::map<DeviceId, std::vector<PictureId>> initial_collection;
};

// Derived from the log alone: POWER_ON records carry each device's collection,
// and the first collection a picture appears in names its initial owner.
Universe universe_from_log(const EventLog& log);
Universe universe_from_scenario(const Scenario& scenario);
// Union of both; ownership from `primary` wins.
Universe merge(const Universe& primary, const Universe& secondary);

class UnknownPicture : public std::runtime_error {
public:
    explicit UnknownPicture(PictureId p);
};

class UnknownDevice : public std::runtime_error {
public:
    explicit UnknownDevice(DeviceId d);
};

struct PictureStats {
    PictureId picture{};
    std::size_t times_exchanged = 0;
    std::size_t distinct_recipients = 0;

    bool operator==(const PictureStats&) const = default;
};

// One entry per picture of the universe, ascending. Counts deliveries;
// recipients exclude the initial owner.
std::vector<PictureStats> picture_stats(const EventLog& log, const Universe& universe);
std::vector<PictureStats> picture_stats(const EventLog& log);
// One "id: exchanged, recipients" line per picture, ids zero-padded to two
// digits.
std::string format_stats(const std::vector<PictureStats>& stats);

struct ShareMatrix {
    std::vector<DeviceId> senders;
    std::vector<PictureId> pictures;
    std::vector<std::vector<std::size_t>> cells;  // [sender][picture]

    std::size_t at(DeviceId sender, PictureId picture) const;
    std::size_t row_sum(std::size_t row) const;
    std::size_t total() const;
};

ShareMatrix share_heatmap(const EventLog& log, const Universe& universe);
ShareMatrix share_heatmap(const EventLog& log);
// Tab-separated; header row "sender" then picture ids, one row per sender.
std::string format_matrix(const ShareMatrix& m);

enum class EdgeClass { InitialSpread, ReReceive };

struct DiffusionEdge {
    DeviceId sender{};
    DeviceId receiver{};
    SimTime time;
    EdgeClass cls = EdgeClass::InitialSpread;

    bool operator==(const DiffusionEdge&) const = default;
};

struct DiffusionGraph {
    PictureId picture{};
    DeviceId initial_owner{};
    std::vector<DiffusionEdge> edges;  // log order

    bool operator==(const DiffusionGraph&) const = default;
};

// An edge is INITIAL_SPREAD iff its receiver did not hold the picture strictly
// before the edge's time. Throws UnknownPicture.
DiffusionGraph diffusion_graph(const EventLog& log, PictureId picture, const Universe& universe);
DiffusionGraph diffusion_graph(const EventLog& log, PictureId picture);

// Graphviz DOT. Nodes ascending with an initial_owner attribute; edges in
// log order with class and time attributes.
std::string export_graph(const DiffusionGraph& g);

class GraphParseError : public std::runtime_error {
public:
    GraphParseError(std::size_t line, const std::string& message);
};

// Inverse of export_graph.
DiffusionGraph parse_graph(std::string_view text);

struct RepetitionEntry {
    DeviceId sender{};
    PictureId picture{};
    std::size_t sends = 0;
    double index = 0.0;  // (sends - 1) / sends

    bool operator==(const RepetitionEntry&) const = default;
};

// One entry per (sender, picture) pair with at least one send, ascending.
std::vector<RepetitionEntry> repetition_index(const EventLog& log);
std::string format_repetition(const std::vector<RepetitionEntry>& entries);

enum class Acquisition { New, Duplicate };

struct TimelineEntry {
    SimTime time;
    PictureId picture{};
    Acquisition kind = Acquisition::New;

    bool operator==(const TimelineEntry&) const = default;
};

// Every delivery to `device` in time order. Throws UnknownDevice.
std::vector<TimelineEntry> collection_timeline(const EventLog& log, DeviceId device, const Universe& universe);
std::vector<TimelineEntry> collection_timeline(const EventLog& log, DeviceId device);
std::string format_timeline(const std::vector<TimelineEntry>& entries);

}  // namespace merkki
