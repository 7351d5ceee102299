#include "merkki/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace merkki {

std::string_view to_string(Archetype a) noexcept {
    switch (a) {
        case Archetype::Trader: return "trader";
        case Archetype::Spammer: return "spammer";
        case Archetype::Collector: return "collector";
        case Archetype::ChallengeKeeper: return "challenge_keeper";
        case Archetype::Idle: return "idle";
    }
    return "idle";
}

GroupConfig Scenario::groups() const {
    GroupConfig g;
    for (const auto& d : devices) {
        g.group[d.id] = d.group;
        g.colour[d.id] = d.colour;
    }
    return g;
}

LockTable Scenario::locks() const {
    LockTable table;
    for (const auto& p : pictures) {
        if (p.lock) {
            table[p.id] = *p.lock;
        }
    }
    return table;
}

const DeviceSpec* Scenario::find_device(DeviceId id) const {
    auto it = std::find_if(devices.begin(), devices.end(), [id](const auto& d) { return d.id == id; });
    return it == devices.end() ? nullptr : &*it;
}

const Picture* Scenario::find_picture(PictureId id) const {
    auto it = std::find_if(pictures.begin(), pictures.end(), [id](const auto& p) { return p.id == id; });
    return it == pictures.end() ? nullptr : &*it;
}

std::vector<DeviceId> Scenario::attendees(const Gathering& g) const {
    std::vector<DeviceId> out;
    if (g.devices.empty()) {
        for (const auto& d : devices) {
            out.push_back(d.id);
        }
    } else {
        out = g.devices;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> v = s.radio.violations();

    std::set<DeviceId> device_ids;
    for (const auto& d : s.devices) {
        if (!device_ids.insert(d.id).second) {
            v.push_back(fmt::format("duplicate DeviceId {}", raw(d.id)));
        }
        if (d.group.empty()) {
            v.push_back(fmt::format("device {} has no group", raw(d.id)));
        }
    }

    std::set<PictureId> picture_ids;
    for (const auto& p : s.pictures) {
        if (!picture_ids.insert(p.id).second) {
            v.push_back(fmt::format("duplicate PictureId {}", raw(p.id)));
        }
    }

    // Who lists each picture in their initial collection.
    std::map<PictureId, std::vector<DeviceId>> listed_by;
    for (const auto& d : s.devices) {
        std::set<PictureId> seen;
        for (auto p : d.initial_pictures) {
            if (!seen.insert(p).second) {
                v.push_back(fmt::format("device {} lists picture {} twice", raw(d.id), raw(p)));
                continue;
            }
            listed_by[p].push_back(d.id);
            const auto* pic = s.find_picture(p);
            if (!pic) {
                v.push_back(fmt::format("device {} lists undefined picture {}", raw(d.id), raw(p)));
            } else if (pic->initial_owner && *pic->initial_owner != d.id) {
                v.push_back(fmt::format("device {} lists picture {} owned by device {}", raw(d.id), raw(p),
                                        raw(*pic->initial_owner)));
            }
        }
    }

    for (const auto& p : s.pictures) {
        if (!p.initial_owner) {
            v.push_back(fmt::format("picture {} unowned", raw(p.id)));
            continue;
        }
        if (!device_ids.count(*p.initial_owner)) {
            v.push_back(fmt::format("picture {} owner {} is not a device", raw(p.id), raw(*p.initial_owner)));
            continue;
        }
        const auto& lst = listed_by[p.id];
        if (std::find(lst.begin(), lst.end(), *p.initial_owner) == lst.end()) {
            v.push_back(fmt::format("picture {} missing from owner {}'s initial collection", raw(p.id),
                                    raw(*p.initial_owner)));
        }
        if (lst.size() > 1) {
            v.push_back(fmt::format("picture {} listed by {} devices", raw(p.id), lst.size()));
        }
    }

    std::map<DeviceId, std::vector<std::pair<SimTime, SimTime>>> windows;
    for (std::size_t i = 0; i < s.gatherings.size(); ++i) {
        const auto& g = s.gatherings[i];
        if (g.end <= g.start) {
            v.push_back(fmt::format("gathering {} ends before it starts", i));
        }
        if (g.start < SimTime{}) {
            v.push_back(fmt::format("gathering {} starts before time 0", i));
        }
        if (s.duration && g.end > *s.duration) {
            v.push_back(fmt::format("gathering {} ends after the scenario duration", i));
        }
        if (g.placement.spacing_m < 0.0 || g.placement.radius_m < 0.0 ||
            !std::isfinite(g.placement.spacing_m) || !std::isfinite(g.placement.radius_m)) {
            v.push_back(fmt::format("gathering {} has an invalid placement", i));
        }
        for (auto d : s.attendees(g)) {
            if (!device_ids.count(d)) {
                v.push_back(fmt::format("gathering {} references unknown device {}", i, raw(d)));
                continue;
            }
            windows[d].emplace_back(g.start, g.end);
        }
    }
    for (auto& [d, ws] : windows) {
        std::sort(ws.begin(), ws.end());
        for (std::size_t i = 1; i < ws.size(); ++i) {
            if (ws[i].first < ws[i - 1].second) {
                v.push_back(fmt::format("device {} attends overlapping gatherings", raw(d)));
                break;
            }
        }
    }

    for (const auto& [d, b] : s.behaviors) {
        const auto* dev = s.find_device(d);
        if (!dev) {
            v.push_back(fmt::format("behavior for unknown device {}", raw(d)));
            continue;
        }
        if (b.trade_rate_per_min < 0.0 || b.beat_rate_per_min < 0.0) {
            v.push_back(fmt::format("device {} has a negative behavior rate", raw(d)));
        }
        if (b.hold_min <= SimTime{} || b.hold_max < b.hold_min) {
            v.push_back(fmt::format("device {} has an invalid hold range", raw(d)));
        }
        const auto& initial = dev->initial_pictures;
        auto owns = [&](PictureId p) { return std::find(initial.begin(), initial.end(), p) != initial.end(); };
        switch (b.archetype) {
            case Archetype::Spammer:
                if (!b.spam_picture) {
                    v.push_back(fmt::format("spammer {} has no spam picture", raw(d)));
                } else if (!owns(*b.spam_picture)) {
                    v.push_back(fmt::format("spammer {} spam picture {} not in its initial collection", raw(d),
                                            raw(*b.spam_picture)));
                }
                break;
            case Archetype::ChallengeKeeper:
                if (b.locked_fraction < 0.0 || b.locked_fraction > 1.0) {
                    v.push_back(fmt::format("challenge keeper {} locked_fraction outside [0, 1]", raw(d)));
                }
                for (auto p : b.locked) {
                    const auto* pic = s.find_picture(p);
                    if (!pic || !pic->lock) {
                        v.push_back(fmt::format("challenge keeper {} picture {} has no lock", raw(d), raw(p)));
                    }
                }
                break;
            case Archetype::Collector:
                for (auto p : b.targets) {
                    if (!s.find_picture(p)) {
                        v.push_back(fmt::format("collector {} targets undefined picture {}", raw(d), raw(p)));
                    }
                }
                break;
            case Archetype::Trader:
            case Archetype::Idle:
                break;
        }
    }
    return v;
}

}  // namespace merkki
