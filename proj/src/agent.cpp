#include "merkki/agent.hpp"

#include <algorithm>

namespace merkki {
namespace {

constexpr SimTime kRetry = SimTime::from_ms(1000);

double total_rate_per_min(const BehaviorSpec& b) { return b.trade_rate_per_min + b.beat_rate_per_min; }

std::optional<SimTime> next_arrival(const BehaviorSpec& b, SimTime after, Rng& rng) {
    const double rate = total_rate_per_min(b);
    if (rate <= 0.0) {
        return std::nullopt;
    }
    return after + SimTime::from_seconds(rng.exponential(60.0 / rate));
}

bool is_end(GestureKind k) { return k == GestureKind::HoldREnd || k == GestureKind::HoldLEnd; }

// Drops presses past the gathering end; a hold that started in time is
// released at the end instead.
std::vector<Gesture> clip(std::vector<Gesture> gs, SimTime end) {
    std::vector<Gesture> out;
    bool r_held = false;
    bool l_held = false;
    for (auto g : gs) {
        if (g.time > end) {
            if (!is_end(g.kind)) {
                continue;
            }
            if ((g.kind == GestureKind::HoldREnd && !r_held) || (g.kind == GestureKind::HoldLEnd && !l_held)) {
                continue;
            }
            g.time = end;
        }
        if (g.kind == GestureKind::HoldRStart) r_held = true;
        if (g.kind == GestureKind::HoldREnd) r_held = false;
        if (g.kind == GestureKind::HoldLStart) l_held = true;
        if (g.kind == GestureKind::HoldLEnd) l_held = false;
        out.push_back(g);
    }
    return out;
}

PictureId choose_trade_picture(const BehaviorSpec& b, const PictureCollection& c, Rng& rng) {
    const auto& owned = c.owned();
    if (b.archetype != Archetype::ChallengeKeeper) {
        return owned[rng.uniform_index(owned.size())];
    }
    std::vector<PictureId> locked;
    std::vector<PictureId> free;
    for (auto p : owned) {
        const bool is_locked = std::find(b.locked.begin(), b.locked.end(), p) != b.locked.end();
        (is_locked ? locked : free).push_back(p);
    }
    const bool pick_locked = !locked.empty() && (free.empty() || rng.bernoulli(b.locked_fraction));
    const auto& pool = pick_locked ? locked : free;
    return pool[rng.uniform_index(pool.size())];
}

std::vector<Gesture> trade_episode(const BehaviorSpec& b, const Observation& obs, Rng& rng, SimTime& episode_end) {
    std::vector<Gesture> gs;
    const auto& c = obs.device.collection;
    SimTime t = obs.now;
    if (!c.empty()) {
        const auto taps = taps_to_select(c, choose_trade_picture(b, c, rng));
        for (std::size_t i = 0; i < taps; ++i) {
            gs.push_back({GestureKind::TapR, t});
            t += kPressGap;
        }
    }
    const auto spread = static_cast<std::size_t>((b.hold_max - b.hold_min).ms());
    const auto hold = b.hold_min + SimTime::from_ms(static_cast<std::int64_t>(rng.uniform_index(spread + 1)));
    gs.push_back({GestureKind::HoldRStart, t});
    gs.push_back({GestureKind::HoldREnd, t + hold});
    episode_end = t + hold;
    return gs;
}

std::vector<Gesture> beat_episode(const Observation& obs, Rng& rng, SimTime& episode_end) {
    std::vector<Gesture> gs;
    const SimTime t = obs.now;
    gs.push_back({GestureKind::HoldLStart, t});
    gs.push_back({GestureKind::HoldLEnd, t + SimTime::from_ms(800)});
    const double bpm = 60.0 + 120.0 * rng.uniform01();
    const auto interval = SimTime::from_seconds(60.0 / bpm);
    SimTime tap = t + SimTime::from_ms(1000);
    for (int i = 0; i < 4; ++i) {
        gs.push_back({GestureKind::TapL, tap});
        tap += interval;
    }
    episode_end = t + obs.beat_window + SimTime::from_ms(100);
    return gs;
}

}  // namespace

std::size_t taps_to_select(const PictureCollection& c, PictureId target) {
    const auto& owned = c.owned();
    auto it = std::find(owned.begin(), owned.end(), target);
    if (it == owned.end()) {
        return 0;
    }
    const auto idx = static_cast<std::size_t>(it - owned.begin());
    return (idx + owned.size() - c.selected_index()) % owned.size();
}

AgentState begin_gathering(const BehaviorSpec& spec, SimTime start, Rng& rng) {
    switch (spec.archetype) {
        case Archetype::Idle:
            return {};
        case Archetype::Spammer:
            return {start};
        case Archetype::Trader:
        case Archetype::Collector:
        case Archetype::ChallengeKeeper:
            return {next_arrival(spec, start, rng)};
    }
    return {};
}

std::vector<Gesture> agent_policy_step(const BehaviorSpec& spec, AgentState& state, const Observation& obs, Rng& rng) {
    state.next_wake.reset();
    const auto& dev = obs.device;

    if (spec.archetype == Archetype::Idle || !dev.powered()) {
        return {};
    }
    if (dev.mode != Mode::Default) {
        state.next_wake = obs.now + kRetry;
        return {};
    }

    if (spec.archetype == Archetype::Spammer) {
        if (!spec.spam_picture || !dev.collection.contains(*spec.spam_picture)) {
            return {};
        }
        std::vector<Gesture> gs;
        SimTime t = obs.now;
        for (std::size_t i = taps_to_select(dev.collection, *spec.spam_picture); i > 0; --i) {
            gs.push_back({GestureKind::TapR, t});
            t += kPressGap;
        }
        gs.push_back({GestureKind::HoldRStart, t});
        gs.push_back({GestureKind::HoldREnd, obs.gathering_end});
        return clip(std::move(gs), obs.gathering_end);
    }

    if (spec.archetype == Archetype::Collector) {
        const bool done = std::all_of(spec.targets.begin(), spec.targets.end(),
                                      [&](PictureId p) { return dev.collection.contains(p); });
        if (done) {
            return {};
        }
    }

    const double total = total_rate_per_min(spec);
    if (total <= 0.0) {
        return {};
    }
    SimTime episode_end = obs.now;
    std::vector<Gesture> gs;
    if (rng.uniform01() * total < spec.trade_rate_per_min) {
        gs = trade_episode(spec, obs, rng, episode_end);
    } else {
        gs = beat_episode(obs, rng, episode_end);
    }
    state.next_wake = next_arrival(spec, episode_end, rng);
    return clip(std::move(gs), obs.gathering_end);
}

}  // namespace merkki
