#pragma once

#include <optional>
#include <vector>

#include "merkki/device.hpp"
#include "merkki/rng.hpp"
#include "merkki/scenario.hpp"

namespace merkki {

// Gap between consecutive scripted presses of one agent.
inline constexpr SimTime kPressGap = SimTime::from_ms(250);

struct AgentState {
    std::optional<SimTime> next_wake;
};

struct Observation {
    const DeviceState& device;
    ProximitySummary proximity;
    SimTime now;
    SimTime gathering_end;
    const LockTable& locks;
    SimTime beat_window = SimTime::from_ms(10000);
};

// Schedules the first wake-up of a gathering.
AgentState begin_gathering(const BehaviorSpec& spec, SimTime start, Rng& rng);

// Called at `obs.now == state.next_wake`. Returns the gestures of one episode
// (time-ordered, clipped to the gathering) and reschedules the next wake-up.
std::vector<Gesture> agent_policy_step(const BehaviorSpec& spec, AgentState& state, const Observation& obs, Rng& rng);

// Number of TAP_R presses that moves the selection onto `target`.
std::size_t taps_to_select(const PictureCollection& c, PictureId target);

}  // namespace merkki
