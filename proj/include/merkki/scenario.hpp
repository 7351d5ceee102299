#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "merkki/core.hpp"

namespace merkki {

enum class Archetype { Trader, Spammer, Collector, ChallengeKeeper, Idle };

std::string_view to_string(Archetype a) noexcept;

struct BehaviorSpec {
    Archetype archetype = Archetype::Idle;
    // Trade attempts per minute; attempts arrive as a Poisson process.
    double trade_rate_per_min = 1.0;
    // Duration of one R hold, drawn uniformly from [hold_min, hold_max].
    SimTime hold_min = SimTime::from_ms(6000);
    SimTime hold_max = SimTime::from_ms(10000);
    // Beat-mode episodes per minute (hold L, then tap a tempo).
    double beat_rate_per_min = 0.0;
    std::optional<PictureId> spam_picture;   // SPAMMER
    std::vector<PictureId> targets;          // COLLECTOR
    std::vector<PictureId> locked;           // CHALLENGE_KEEPER
    double locked_fraction = 0.3;            // CHALLENGE_KEEPER

    bool operator==(const BehaviorSpec&) const = default;
};

struct DeviceSpec {
    DeviceId id{};
    std::string group;
    std::string colour;
    std::vector<PictureId> initial_pictures;

    bool operator==(const DeviceSpec&) const = default;
};

enum class PlacementKind { Grid, Disc, Line };

struct Placement {
    PlacementKind kind = PlacementKind::Grid;
    double spacing_m = 2.0;  // grid and line
    double radius_m = 10.0;  // disc

    bool operator==(const Placement&) const = default;
};

struct Gathering {
    SimTime start;
    SimTime end;
    Placement placement;
    // Empty means every device attends.
    std::vector<DeviceId> devices;

    bool operator==(const Gathering&) const = default;
};

struct Scenario {
    RadioParams radio;
    std::vector<DeviceSpec> devices;
    std::vector<Picture> pictures;
    std::vector<Gathering> gatherings;
    std::map<DeviceId, BehaviorSpec> behaviors;
    std::uint64_t seed = 0;
    std::optional<SimTime> duration;
    std::size_t max_events = 5'000'000;

    GroupConfig groups() const;
    LockTable locks() const;
    const DeviceSpec* find_device(DeviceId id) const;
    const Picture* find_picture(PictureId id) const;
    // Devices attending gathering `g`, ascending.
    std::vector<DeviceId> attendees(const Gathering& g) const;
};

// Every violated scenario invariant, as human-readable lines. Empty iff the
// scenario is valid.
std::vector<std::string> validate_scenario(const Scenario& scenario);

}  // namespace merkki
