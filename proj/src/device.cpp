#include "merkki/device.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace merkki {
namespace {

EventRecord record(SimTime t, DeviceId d, EventKind k) { return EventRecord{t, d, k, {}}; }

double clamp_tempo(double bpm, const DeviceConfig& cfg) {
    return std::clamp(bpm, cfg.min_tempo_bpm, cfg.max_tempo_bpm);
}

EventRecord tempo_record(const DeviceState& s, SimTime now, DeviceId source) {
    auto rec = record(now, s.id, EventKind::TempoSet);
    rec.fields["bpm"] = format_fixed3(s.tempo_bpm);
    rec.fields["source"] = to_string(source);
    return rec;
}

std::string selected_text(const DeviceState& s) {
    auto sel = s.collection.selected();
    return sel ? to_string(*sel) : std::string{"none"};
}

void handle_default(DeviceState& s, GestureKind g, SimTime t, const DeviceConfig& cfg,
                    std::vector<EventRecord>& out) {
    switch (g) {
        case GestureKind::TapR:
            if (!s.collection.empty()) {
                s.collection.select_next();
                auto rec = record(t, s.id, EventKind::PictureSelect);
                rec.fields["picture"] = selected_text(s);
                out.push_back(std::move(rec));
            }
            break;
        case GestureKind::TapL: {
            s.anim_index = (s.anim_index + 1) % cfg.animation_count(s.tier);
            auto rec = record(t, s.id, EventKind::AnimSelect);
            rec.fields["anim"] = std::to_string(s.anim_index);
            rec.fields["tier"] = std::string{to_string(s.tier)};
            out.push_back(std::move(rec));
            break;
        }
        case GestureKind::HoldRStart: {
            s.mode = Mode::Searching;
            s.searching_since = t;
            auto rec = record(t, s.id, EventKind::SearchStart);
            rec.fields["picture"] = selected_text(s);
            out.push_back(std::move(rec));
            break;
        }
        case GestureKind::HoldLStart:
            s.mode = Mode::BeatMode;
            s.mode_expires = t + cfg.beat_window;
            s.beat_taps.clear();
            break;
        case GestureKind::PushB:
            s.mode = Mode::BatteryDisplay;
            s.mode_expires = t + cfg.battery_display;
            out.push_back(battery_record(s, t));
            break;
        case GestureKind::PushA:
            s.status_until = t + cfg.status_overlay;
            break;
        case GestureKind::HoldLEnd:
        case GestureKind::HoldREnd:
        case GestureKind::HoldLR:
            break;
    }
}

}  // namespace

std::string_view to_string(Tier tier) noexcept {
    switch (tier) {
        case Tier::None: return "NONE";
        case Tier::Peer: return "PEER";
        case Tier::Stranger: return "STRANGER";
    }
    return "NONE";
}

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::Default: return "DEFAULT";
        case Mode::BatteryDisplay: return "BATTERY_DISPLAY";
        case Mode::BeatMode: return "BEAT_MODE";
        case Mode::Searching: return "SEARCHING";
    }
    return "DEFAULT";
}

EventKind event_kind(GestureKind g) noexcept {
    switch (g) {
        case GestureKind::TapL: return EventKind::TapL;
        case GestureKind::TapR: return EventKind::TapR;
        case GestureKind::HoldLStart: return EventKind::HoldLStart;
        case GestureKind::HoldLEnd: return EventKind::HoldLEnd;
        case GestureKind::HoldRStart: return EventKind::HoldRStart;
        case GestureKind::HoldREnd: return EventKind::HoldREnd;
        case GestureKind::HoldLR: return EventKind::HoldLR;
        case GestureKind::PushA: return EventKind::PushA;
        case GestureKind::PushB: return EventKind::PushB;
    }
    return EventKind::TapL;
}

DeviceState make_device(DeviceId id, const std::vector<PictureId>& initial, const DeviceConfig& cfg) {
    DeviceState s;
    s.id = id;
    s.collection = PictureCollection{initial};
    s.tempo_bpm = cfg.default_tempo_bpm;
    s.battery_mah = cfg.capacity_mah;
    return s;
}

DeviceState expire_timers(DeviceState s, SimTime now) {
    if (s.mode_expires && now >= *s.mode_expires) {
        if (s.mode == Mode::BeatMode || s.mode == Mode::BatteryDisplay) {
            s.mode = Mode::Default;
            s.beat_taps.clear();
        }
        s.mode_expires.reset();
    }
    if (s.status_until && now >= *s.status_until) {
        s.status_until.reset();
    }
    return s;
}

Transition handle_gesture(DeviceState s, const Gesture& g, const DeviceConfig& cfg) {
    const SimTime t = std::max(g.time, s.last_time);
    s = expire_timers(std::move(s), t);
    s.last_time = t;

    std::vector<EventRecord> out;
    out.push_back(record(t, s.id, event_kind(g.kind)));

    auto append = [&out](Transition tr) {
        out.insert(out.end(), tr.records.begin(), tr.records.end());
        return std::move(tr.state);
    };

    if (g.kind == GestureKind::HoldLR) {
        s = s.powered() ? append(power_off(std::move(s), t, "user")) : append(power_on(std::move(s), t, cfg));
        return {std::move(s), std::move(out)};
    }
    if (!s.powered()) {
        if (g.kind == GestureKind::PushA) {
            s = append(power_on(std::move(s), t, cfg));
        }
        return {std::move(s), std::move(out)};
    }

    switch (s.mode) {
        case Mode::Default:
            handle_default(s, g.kind, t, cfg, out);
            break;
        case Mode::Searching:
            if (g.kind == GestureKind::HoldREnd) {
                s.mode = Mode::Default;
                s.searching_since.reset();
                out.push_back(record(t, s.id, EventKind::SearchStop));
            }
            break;
        case Mode::BeatMode:
            if (g.kind == GestureKind::TapL) {
                auto res = apply_tap_tempo(std::move(s), t, cfg);
                s = std::move(res.state);
                if (res.tempo_bpm) {
                    out.push_back(tempo_record(s, t, s.id));
                }
            }
            break;
        case Mode::BatteryDisplay:
            break;
    }
    return {std::move(s), std::move(out)};
}

Transition power_on(DeviceState s, SimTime now, const DeviceConfig& cfg) {
    if (s.powered() || s.battery_mah <= 0.0) {
        return {std::move(s), {}};
    }
    s.power = Power::On;
    s.mode = Mode::Default;
    s.tier = Tier::None;
    s.anim_index = 0;
    s.tempo_bpm = cfg.default_tempo_bpm;
    s.beat_taps.clear();
    s.mode_expires.reset();
    s.status_until.reset();
    s.searching_since.reset();
    s.last_time = std::max(s.last_time, now);

    auto rec = record(s.last_time, s.id, EventKind::PowerOn);
    rec.fields["battery"] = format_fixed3(s.battery_mah);
    rec.fields["pictures"] = format_picture_list(s.collection.owned());
    rec.fields["selected"] = selected_text(s);
    return {std::move(s), {std::move(rec)}};
}

Transition power_off(DeviceState s, SimTime now, std::string_view reason) {
    if (!s.powered()) {
        return {std::move(s), {}};
    }
    const SimTime t = std::max(s.last_time, now);
    std::vector<EventRecord> out;
    if (s.mode == Mode::Searching) {
        out.push_back(record(t, s.id, EventKind::SearchStop));
    }
    s.power = Power::Off;
    s.mode = Mode::Default;
    s.tier = Tier::None;
    s.anim_index = 0;
    s.beat_taps.clear();
    s.mode_expires.reset();
    s.status_until.reset();
    s.searching_since.reset();
    s.last_time = t;
    auto rec = record(t, s.id, EventKind::PowerOff);
    rec.fields["reason"] = std::string{reason};
    out.push_back(std::move(rec));
    return {std::move(s), std::move(out)};
}

Tier tier_for(const ProximitySummary& p) noexcept {
    if (p.strangers_in_range > 0) {
        return Tier::Stranger;
    }
    if (p.peers_in_range > 0) {
        return Tier::Peer;
    }
    return Tier::None;
}

std::pair<DeviceState, std::optional<EventRecord>> on_proximity(DeviceState s, const ProximitySummary& p,
                                                                 SimTime now) {
    if (!s.powered()) {
        return {std::move(s), std::nullopt};
    }
    const Tier next = tier_for(p);
    if (next == s.tier) {
        return {std::move(s), std::nullopt};
    }
    s.tier = next;
    s.anim_index = 0;
    auto rec = record(std::max(now, s.last_time), s.id, EventKind::TierChange);
    rec.fields["peers"] = std::to_string(p.peers_in_range);
    rec.fields["strangers"] = std::to_string(p.strangers_in_range);
    rec.fields["tier"] = std::string{to_string(next)};
    return {std::move(s), std::move(rec)};
}

TapTempoResult apply_tap_tempo(DeviceState s, SimTime tap_time, const DeviceConfig& cfg) {
    if (!s.powered() || s.mode != Mode::BeatMode || !s.mode_expires || tap_time >= *s.mode_expires) {
        return {std::move(s), std::nullopt};
    }
    s.beat_taps.push_back(tap_time);
    if (s.beat_taps.size() < 2) {
        return {std::move(s), std::nullopt};
    }
    // Mean of consecutive intervals telescopes to span / (n - 1).
    const auto span_ms = (s.beat_taps.back() - s.beat_taps.front()).ms();
    const auto intervals = static_cast<double>(s.beat_taps.size() - 1);
    double bpm = cfg.max_tempo_bpm;
    if (span_ms > 0) {
        bpm = 60.0 / ((static_cast<double>(span_ms) / 1000.0) / intervals);
    }
    s.tempo_bpm = clamp_tempo(bpm, cfg);
    const double tempo = s.tempo_bpm;
    return {std::move(s), tempo};
}

Transition receive_tempo(DeviceState s, double bpm, DeviceId source, SimTime now, const DeviceConfig& cfg) {
    if (!s.powered()) {
        return {std::move(s), {}};
    }
    s.tempo_bpm = clamp_tempo(bpm, cfg);
    s.last_time = std::max(s.last_time, now);
    auto rec = tempo_record(s, s.last_time, source);
    return {std::move(s), {std::move(rec)}};
}

std::pair<DeviceState, bool> commit_exchange(DeviceState s, PictureId incoming) {
    const bool added = s.collection.add(incoming);
    return {std::move(s), !added};
}

bool drain_battery(DeviceState& s, SimTime dt, const DeviceConfig& cfg) {
    if (!s.powered() || dt <= SimTime{}) {
        return false;
    }
    const double hours = dt.seconds() / 3600.0;
    s.battery_mah = std::max(0.0, s.battery_mah - cfg.drain_mah_per_h(s.tier) * hours);
    return s.battery_mah <= 0.0;
}

Transition battery_step(DeviceState s, SimTime dt, SimTime now, const DeviceConfig& cfg) {
    if (drain_battery(s, dt, cfg)) {
        return power_off(std::move(s), now, "battery");
    }
    return {std::move(s), {}};
}

std::optional<PictureId> outgoing_picture(const DeviceState& s, SimTime now, const LockTable& locks) {
    auto sel = s.collection.selected();
    if (!sel) {
        return std::nullopt;
    }
    auto it = locks.find(*sel);
    if (it != locks.end() && !it->second.unlocked_at(now)) {
        return std::nullopt;
    }
    return sel;
}

EventRecord battery_record(const DeviceState& s, SimTime now) {
    auto rec = record(now, s.id, EventKind::Battery);
    rec.fields["mah"] = format_fixed3(s.battery_mah);
    return rec;
}

std::vector<std::string> invariant_violations(const DeviceState& s, const DeviceConfig& cfg) {
    std::vector<std::string> v;
    if (!s.powered() && (s.mode != Mode::Default || s.tier != Tier::None)) {
        v.push_back(fmt::format("device {} is off but in mode {} tier {}", raw(s.id), to_string(s.mode),
                                to_string(s.tier)));
    }
    if (!(s.tempo_bpm >= cfg.min_tempo_bpm && s.tempo_bpm <= cfg.max_tempo_bpm)) {
        v.push_back(fmt::format("device {} tempo {} outside [{}, {}]", raw(s.id), s.tempo_bpm, cfg.min_tempo_bpm,
                                cfg.max_tempo_bpm));
    }
    if (!(s.battery_mah >= 0.0 && s.battery_mah <= cfg.capacity_mah)) {
        v.push_back(fmt::format("device {} battery {} outside [0, {}]", raw(s.id), s.battery_mah, cfg.capacity_mah));
    }
    if (s.anim_index >= cfg.animation_count(s.tier)) {
        v.push_back(fmt::format("device {} anim_index {} invalid for tier {}", raw(s.id), s.anim_index,
                                to_string(s.tier)));
    }
    const auto& owned = s.collection.owned();
    if (!owned.empty() && s.collection.selected_index() >= owned.size()) {
        v.push_back(fmt::format("device {} selection out of range", raw(s.id)));
    }
    if (std::set<PictureId>(owned.begin(), owned.end()).size() != owned.size()) {
        v.push_back(fmt::format("device {} collection holds duplicates", raw(s.id)));
    }
    if (s.searching() != s.searching_since.has_value()) {
        v.push_back(fmt::format("device {} searching flag and timer disagree", raw(s.id)));
    }
    return v;
}

}  // namespace merkki
