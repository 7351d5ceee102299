#pragma once

// Domain types shared by every merkki module: identifiers, fixed-point
// simulation time, pictures and their challenge locks, collections, groups
// and radio parameters.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace merkki {

enum class DeviceId : std::uint32_t {};
enum class PictureId : std::uint32_t {};

constexpr std::uint32_t raw(DeviceId id) noexcept { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t raw(PictureId id) noexcept { return static_cast<std::uint32_t>(id); }

std::string to_string(DeviceId id);
std::string to_string(PictureId id);

// Simulation time (and durations) in whole milliseconds. Rendered as seconds
// with exactly three decimals so that logs are byte-exact across platforms.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_ms(std::int64_t ms) noexcept { return SimTime{ms}; }
    // Rounds to the nearest millisecond.
    static SimTime from_seconds(double seconds);

    constexpr std::int64_t ms() const noexcept { return ms_; }
    constexpr double seconds() const noexcept { return static_cast<double>(ms_) / 1000.0; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime other) const noexcept { return SimTime{ms_ + other.ms_}; }
    constexpr SimTime operator-(SimTime other) const noexcept { return SimTime{ms_ - other.ms_}; }
    constexpr SimTime& operator+=(SimTime other) noexcept {
        ms_ += other.ms_;
        return *this;
    }

    std::string to_string() const;
    // Accepts only the canonical rendering produced by to_string().
    static std::optional<SimTime> parse(std::string_view text);

private:
    constexpr explicit SimTime(std::int64_t ms) : ms_(ms) {}
    std::int64_t ms_ = 0;
};

// A dare challenge attached to a picture. An absent unlock time means the
// challenge is never fulfilled.
struct ChallengeLock {
    std::optional<SimTime> unlock_at;

    static ChallengeLock never() { return {}; }
    static ChallengeLock until(SimTime t) { return ChallengeLock{t}; }

    bool permanent() const noexcept { return !unlock_at.has_value(); }
    bool unlocked_at(SimTime now) const noexcept { return unlock_at && now >= *unlock_at; }

    bool operator==(const ChallengeLock&) const = default;
};

struct Picture {
    PictureId id{};
    // Optional only so that a malformed scenario can be represented and
    // reported by validation.
    std::optional<DeviceId> initial_owner;
    std::optional<ChallengeLock> lock;

    bool tradable_at(SimTime now) const noexcept { return !lock || lock->unlocked_at(now); }

    bool operator==(const Picture&) const = default;
};

using LockTable = std::map<PictureId, ChallengeLock>;

// Insertion-ordered set of owned pictures with a selection cursor. Never
// shrinks.
class PictureCollection {
public:
    PictureCollection() = default;
    // Duplicates in `initial` are dropped, keeping first occurrences.
    explicit PictureCollection(const std::vector<PictureId>& initial);

    const std::vector<PictureId>& owned() const noexcept { return owned_; }
    std::size_t size() const noexcept { return owned_.size(); }
    bool empty() const noexcept { return owned_.empty(); }
    bool contains(PictureId p) const;

    std::size_t selected_index() const noexcept { return selected_; }
    std::optional<PictureId> selected() const;

    // Cyclic advance; a no-op on an empty collection.
    void select_next();
    // Returns false when `p` is not owned.
    bool select(PictureId p);
    // Appends `p` unless already owned. Returns true when it was new.
    bool add(PictureId p);

    bool operator==(const PictureCollection&) const = default;

private:
    std::vector<PictureId> owned_;
    std::size_t selected_ = 0;
};

// Friend-group partition and LED colours, keyed by device.
struct GroupConfig {
    std::map<DeviceId, std::string> group;
    std::map<DeviceId, std::string> colour;

    bool same_group(DeviceId a, DeviceId b) const;
};

struct RadioParams {
    double range_m = 50.0;
    SimTime latency = SimTime::from_ms(100);
    double loss_prob = 0.0;
    SimTime hold_duration = SimTime::from_ms(5000);
    SimTime beat_window = SimTime::from_ms(10000);

    std::vector<std::string> violations() const;
};

}  // namespace merkki
