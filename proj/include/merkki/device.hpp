#pragma once

// Per-patch firmware state machine. Every operation is a pure transition:
// it takes a state by value and returns the next state plus the records the
// transition produced.
//
// Controls: the right seam (R) drives pictures, the left seam (L) drives LED
// animations, both seams together toggle power; push button A shows status
// (or powers on), push button B shows the battery charge.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "merkki/core.hpp"
#include "merkki/event_log.hpp"

namespace merkki {

enum class Power { Off, On };
enum class Mode { Default, BatteryDisplay, BeatMode, Searching };
enum class Tier { None, Peer, Stranger };

std::string_view to_string(Tier tier) noexcept;
std::string_view to_string(Mode mode) noexcept;

enum class GestureKind { TapL, TapR, HoldLStart, HoldLEnd, HoldRStart, HoldREnd, HoldLR, PushA, PushB };

EventKind event_kind(GestureKind g) noexcept;

struct Gesture {
    GestureKind kind = GestureKind::TapR;
    SimTime time;
};

struct ProximitySummary {
    std::size_t strangers_in_range = 0;
    std::size_t peers_in_range = 0;

    bool operator==(const ProximitySummary&) const = default;
};

struct DeviceConfig {
    double capacity_mah = 1000.0;
    // Linear drain: screen base rate plus a per-tier LED rate, mAh per hour.
    double base_drain_mah_per_h = 2.0;
    std::array<double, 3> tier_drain_mah_per_h{1.0, 2.0, 4.0};
    // Animation list length for NONE (basic), PEER (group), STRANGER (rainbow).
    std::array<std::size_t, 3> animation_counts{4, 3, 2};
    double default_tempo_bpm = 120.0;
    double min_tempo_bpm = 30.0;
    double max_tempo_bpm = 300.0;
    SimTime beat_window = SimTime::from_ms(10000);
    SimTime battery_display = SimTime::from_ms(3000);
    SimTime status_overlay = SimTime::from_ms(3000);

    double drain_mah_per_h(Tier tier) const noexcept {
        return base_drain_mah_per_h + tier_drain_mah_per_h[static_cast<std::size_t>(tier)];
    }
    std::size_t animation_count(Tier tier) const noexcept {
        return animation_counts[static_cast<std::size_t>(tier)];
    }
};

struct DeviceState {
    DeviceId id{};
    Power power = Power::Off;
    Mode mode = Mode::Default;
    PictureCollection collection;
    Tier tier = Tier::None;
    std::size_t anim_index = 0;
    double tempo_bpm = 120.0;
    std::vector<SimTime> beat_taps;
    double battery_mah = 1000.0;
    // Deadline of BEAT_MODE or BATTERY_DISPLAY.
    std::optional<SimTime> mode_expires;
    std::optional<SimTime> status_until;
    std::optional<SimTime> searching_since;
    SimTime last_time;

    bool powered() const noexcept { return power == Power::On; }
    bool searching() const noexcept { return powered() && mode == Mode::Searching; }
};

struct Transition {
    DeviceState state;
    std::vector<EventRecord> records;
};

DeviceState make_device(DeviceId id, const std::vector<PictureId>& initial, const DeviceConfig& cfg);

// Applies pending mode expiries up to `now`. Produces no records.
DeviceState expire_timers(DeviceState state, SimTime now);

// Logs the raw gesture, then applies whichever transition the current mode
// defines for it. Undefined (mode, gesture) pairs are no-ops.
Transition handle_gesture(DeviceState state, const Gesture& g, const DeviceConfig& cfg);

Transition power_on(DeviceState state, SimTime now, const DeviceConfig& cfg);
Transition power_off(DeviceState state, SimTime now, std::string_view reason);

Tier tier_for(const ProximitySummary& p) noexcept;

std::pair<DeviceState, std::optional<EventRecord>> on_proximity(DeviceState state, const ProximitySummary& p,
                                                                 SimTime now);

struct TapTempoResult {
    DeviceState state;
    std::optional<double> tempo_bpm;
};

// Records a beat-mode tap. From the second tap on, tempo is 60 / mean
// inter-tap interval, clamped to the configured range.
TapTempoResult apply_tap_tempo(DeviceState state, SimTime tap_time, const DeviceConfig& cfg);

// A tempo received from another patch.
Transition receive_tempo(DeviceState state, double bpm, DeviceId source, SimTime now, const DeviceConfig& cfg);

// Adds `incoming` unless already owned; the selection is left untouched.
// Returns the new state and the duplicate flag.
std::pair<DeviceState, bool> commit_exchange(DeviceState state, PictureId incoming);

Transition battery_step(DeviceState state, SimTime dt, SimTime now, const DeviceConfig& cfg);
// The drain half of battery_step, in place. True when the battery ran flat
// and the caller owes a power-off.
bool drain_battery(DeviceState& state, SimTime dt, const DeviceConfig& cfg);

// The selected picture if it may be traded at `now`.
std::optional<PictureId> outgoing_picture(const DeviceState& state, SimTime now, const LockTable& locks);

EventRecord battery_record(const DeviceState& state, SimTime now);

std::vector<std::string> invariant_violations(const DeviceState& state, const DeviceConfig& cfg);

}  // namespace merkki
