#include "merkki/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <queue>
#include <string_view>

#include <fmt/format.h>

#include "merkki/agent.hpp"
#include "merkki/scenario_io.hpp"

namespace merkki {
namespace {

// Stream ids for Rng::derive.
constexpr std::uint64_t kRendezvousStream = 1;
constexpr std::uint64_t kTempoStream = 2;
constexpr std::uint64_t kPlacementStream = 3;
constexpr std::uint64_t kAgentStreamBase = 1000;

double quantise_mm(double metres) { return static_cast<double>(std::llround(metres * 1000.0)) / 1000.0; }

struct Pending {
    enum class Type { Wake, Press, Tempo };

    SimTime time;
    DeviceId device{};
    std::uint64_t seq = 0;
    Type type = Type::Wake;
    Gesture gesture;
    double bpm = 0.0;
    DeviceId source{};

    bool operator>(const Pending& o) const {
        if (time != o.time) return time > o.time;
        if (device != o.device) return device > o.device;
        return seq > o.seq;
    }
};

class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t seed)
        : scenario_(scenario),
          cfg_(device_config_for(scenario)),
          groups_(scenario.groups()),
          locks_(scenario.locks()),
          rendezvous_rng_(Rng::derive(seed, kRendezvousStream)),
          tempo_rng_(Rng::derive(seed, kTempoStream)),
          placement_rng_(Rng::derive(seed, kPlacementStream)) {
        for (const auto& d : scenario.devices) {
            devices_.emplace(d.id, make_device(d.id, d.initial_pictures, cfg_));
            agent_rngs_.emplace(d.id, Rng(Rng::derive(seed, kAgentStreamBase + raw(d.id))));
        }
    }

    EventLog run() {
        std::vector<const Gathering*> order;
        for (const auto& g : scenario_.gatherings) {
            order.push_back(&g);
        }
        std::stable_sort(order.begin(), order.end(),
                         [](const Gathering* a, const Gathering* b) { return a->start < b->start; });
        for (const auto* g : order) {
            run_gathering(*g);
        }
        sort_log(log_);
        return std::move(log_);
    }

private:
    void emit(EventRecord rec) {
        if (log_.size() >= scenario_.max_events) {
            throw ResourceLimitExceeded(scenario_.max_events);
        }
        log_.push_back(std::move(rec));
    }

    void emit_all(std::vector<EventRecord> recs) {
        for (auto& r : recs) {
            emit(std::move(r));
        }
    }

    void push(Pending p) {
        p.seq = next_seq_++;
        queue_.push(std::move(p));
    }

    BehaviorSpec behavior(DeviceId d) const {
        auto it = scenario_.behaviors.find(d);
        return it == scenario_.behaviors.end() ? BehaviorSpec{} : it->second;
    }

    void refresh_radio(SimTime now) {
        world_.powered.clear();
        for (auto d : attendees_) {
            if (devices_.at(d).powered()) {
                world_.powered.insert(d);
            }
        }
        adjacency_ = connectivity(world_, scenario_.radio);
        for (auto d : attendees_) {
            const auto summary = proximity_summary(d, adjacency_, groups_);
            proximity_[d] = summary;
            auto [next, rec] = on_proximity(std::move(devices_.at(d)), summary, now);
            devices_.at(d) = std::move(next);
            if (rec) {
                emit(std::move(*rec));
            }
        }
        radio_dirty_ = false;
    }

    // Applies a transition and flags the radio for a refresh if power changed.
    void apply(DeviceId d, Transition tr) {
        auto& dev = devices_.at(d);
        if (dev.powered() != tr.state.powered()) {
            radio_dirty_ = true;
        }
        dev = std::move(tr.state);
        emit_all(std::move(tr.records));
    }

    void run_gathering(const Gathering& g) {
        attendees_ = scenario_.attendees(g);
        attendee_states_.clear();
        for (auto d : attendees_) {
            attendee_states_.push_back(&devices_.at(d));
        }
        world_ = WorldSnapshot{};
        world_.positions = place_devices(g.placement, attendees_, placement_rng_);
        timers_ = OverlapTimers{};
        proximity_.clear();
        queue_ = {};

        for (auto d : attendees_) {
            auto tr = power_on(std::move(devices_.at(d)), g.start, cfg_);
            for (auto& rec : tr.records) {
                if (rec.kind == EventKind::PowerOn) {
                    const auto& pos = world_.positions.at(d);
                    rec.fields["x"] = format_fixed3(pos.x);
                    rec.fields["y"] = format_fixed3(pos.y);
                }
            }
            apply(d, std::move(tr));
        }
        refresh_radio(g.start);

        for (auto d : attendees_) {
            auto state = begin_gathering(behavior(d), g.start, agent_rngs_.at(d));
            agents_[d] = state;
            if (state.next_wake && *state.next_wake <= g.end) {
                push({*state.next_wake, d, 0, Pending::Type::Wake, {}, 0.0, {}});
            }
        }

        for (SimTime t = g.start + kTick; t <= g.end; t += kTick) {
            drain_until(t, g.end, /*inclusive=*/false);
            tick(t, g);
        }
        drain_until(g.end, g.end, /*inclusive=*/true);

        for (auto d : attendees_) {
            apply(d, power_off(std::move(devices_.at(d)), g.end, "gathering_end"));
        }
        queue_ = {};
        agents_.clear();
    }

    void drain_until(SimTime limit, SimTime end, bool inclusive) {
        while (!queue_.empty()) {
            const auto& top = queue_.top();
            if (inclusive ? top.time > limit : top.time >= limit) {
                break;
            }
            Pending p = top;
            queue_.pop();
            process(p, end);
        }
    }

    void process(const Pending& p, SimTime end) {
        if (radio_dirty_) {
            refresh_radio(p.time);
        }
        switch (p.type) {
            case Pending::Type::Wake: {
                const auto spec = behavior(p.device);
                auto& agent = agents_[p.device];
                const Observation obs{devices_.at(p.device), proximity_[p.device], p.time, end, locks_,
                                      cfg_.beat_window};
                for (const auto& g : agent_policy_step(spec, agent, obs, agent_rngs_.at(p.device))) {
                    push({g.time, p.device, 0, Pending::Type::Press, g, 0.0, {}});
                }
                if (agent.next_wake && *agent.next_wake <= end) {
                    push({*agent.next_wake, p.device, 0, Pending::Type::Wake, {}, 0.0, {}});
                }
                break;
            }
            case Pending::Type::Press: {
                auto tr = handle_gesture(std::move(devices_.at(p.device)), p.gesture, cfg_);
                std::optional<double> set_tempo;
                for (const auto& rec : tr.records) {
                    if (rec.kind == EventKind::TempoSet) {
                        set_tempo = tr.state.tempo_bpm;
                    }
                }
                apply(p.device, std::move(tr));
                if (set_tempo) {
                    broadcast_tempo(p.device, *set_tempo, p.time, end);
                }
                break;
            }
            case Pending::Type::Tempo:
                apply(p.device, receive_tempo(std::move(devices_.at(p.device)), p.bpm, p.source, p.time, cfg_));
                break;
        }
    }

    void broadcast_tempo(DeviceId source, double bpm, SimTime now, SimTime end) {
        if (radio_dirty_) {
            refresh_radio(now);
        }
        if (!adjacency_.contains(source)) {
            return;
        }
        for (const auto& delivery : propagate_tempo(source, adjacency_, scenario_.radio, tempo_rng_)) {
            if (delivery.device == source || now + delivery.offset > end) {
                continue;
            }
            push({now + delivery.offset, delivery.device, 0, Pending::Type::Tempo, {}, bpm, source});
        }
    }

    void tick(SimTime t, const Gathering& g) {
        for (std::size_t i = 0; i < attendees_.size(); ++i) {
            auto& dev = *attendee_states_[i];
            if (dev.mode_expires || dev.status_until) {
                dev = expire_timers(std::move(dev), t);
            }
            if (drain_battery(dev, kTick, cfg_)) {
                apply(attendees_[i], power_off(std::move(dev), t, "battery"));
            }
        }
        if ((t - g.start).ms() % kBatteryReportInterval.ms() == 0) {
            for (auto d : attendees_) {
                if (devices_.at(d).powered()) {
                    emit(battery_record(devices_.at(d), t));
                }
            }
        }
        if (radio_dirty_) {
            refresh_radio(t);
        }

        // Only devices that searched across the whole step take part.
        auto& searchers = searchers_;
        searchers.clear();
        for (std::size_t i = 0; i < attendees_.size(); ++i) {
            const auto& dev = *attendee_states_[i];
            if (dev.searching() && *dev.searching_since <= t - kTick) {
                searchers.emplace_hint(searchers.end(), attendees_[i], outgoing_picture(dev, t, locks_));
            }
        }
        if (searchers.size() < 2 && timers_.entries().empty()) {
            return;
        }
        auto result = rendezvous_step(searchers, adjacency_, std::move(timers_), kTick, scenario_.radio,
                                      rendezvous_rng_);
        timers_ = std::move(result.timers);
        for (const auto& c : result.commits) {
            commit(c, t);
        }
    }

    void commit(const Commit& c, SimTime t) {
        auto [a_state, a_dup] = commit_exchange(std::move(devices_.at(c.a)), c.b_sends);
        devices_.at(c.a) = std::move(a_state);
        auto [b_state, b_dup] = commit_exchange(std::move(devices_.at(c.b)), c.a_sends);
        devices_.at(c.b) = std::move(b_state);
        emit(make_exchange_record(t, c.a, {c.b, c.a_sends, c.b_sends, a_dup}));
        emit(make_exchange_record(t, c.b, {c.a, c.b_sends, c.a_sends, b_dup}));
    }

    const Scenario& scenario_;
    DeviceConfig cfg_;
    GroupConfig groups_;
    LockTable locks_;
    Rng rendezvous_rng_;
    Rng tempo_rng_;
    Rng placement_rng_;
    std::map<DeviceId, DeviceState> devices_;
    std::map<DeviceId, Rng> agent_rngs_;
    std::map<DeviceId, AgentState> agents_;
    std::map<DeviceId, ProximitySummary> proximity_;
    std::vector<DeviceId> attendees_;
    // Parallel to attendees_; map nodes stay put.
    std::vector<DeviceState*> attendee_states_;
    std::map<DeviceId, std::optional<PictureId>> searchers_;
    WorldSnapshot world_;
    Adjacency adjacency_;
    bool radio_dirty_ = false;
    OverlapTimers timers_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
    std::uint64_t next_seq_ = 0;
    EventLog log_;
};

}  // namespace

ResourceLimitExceeded::ResourceLimitExceeded(std::size_t cap)
    : std::runtime_error(fmt::format("event cap of {} records exceeded", cap)) {}

DeviceConfig device_config_for(const Scenario& scenario) {
    DeviceConfig cfg;
    cfg.beat_window = scenario.radio.beat_window;
    return cfg;
}

std::map<DeviceId, Position> place_devices(const Placement& placement, const std::vector<DeviceId>& attendees,
                                           Rng& rng) {
    std::map<DeviceId, Position> out;
    const auto n = attendees.size();
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)))));
    for (std::size_t i = 0; i < n; ++i) {
        Position p;
        switch (placement.kind) {
            case PlacementKind::Grid:
                p = {static_cast<double>(i % cols) * placement.spacing_m,
                     static_cast<double>(i / cols) * placement.spacing_m};
                break;
            case PlacementKind::Line:
                p = {static_cast<double>(i) * placement.spacing_m, 0.0};
                break;
            case PlacementKind::Disc: {
                const double r = placement.radius_m * std::sqrt(rng.uniform01());
                const double theta = 2.0 * std::numbers::pi * rng.uniform01();
                p = {r * std::cos(theta), r * std::sin(theta)};
                break;
            }
        }
        out[attendees[i]] = Position{quantise_mm(p.x), quantise_mm(p.y)};
    }
    return out;
}

EventLog run(const Scenario& scenario, std::optional<std::uint64_t> seed_override) {
    auto violations = validate_scenario(scenario);
    if (!violations.empty()) {
        throw ScenarioValidationError(std::move(violations));
    }
    Simulation sim(scenario, seed_override.value_or(scenario.seed));
    return sim.run();
}

std::optional<std::uint64_t> seed_from_environment() {
    const char* env = std::getenv("MERKKI_SEED");
    if (!env) {
        return std::nullopt;
    }
    const std::string_view text{env};
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

}  // namespace merkki
