#pragma once

// Helpers shared by the unit tests and the acceptance binary: small scenario
// builders, random log generators and brute-force oracles that deliberately
// avoid the production code paths they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "merkki/analysis.hpp"
#include "merkki/event_log.hpp"
#include "merkki/rng.hpp"
#include "merkki/scenario.hpp"

namespace merkki::testing {

inline std::string scenario_path(const std::string& name) { return std::string{MERKKI_SCENARIO_DIR} + "/" + name; }

inline SimTime secs(double s) { return SimTime::from_seconds(s); }

inline EventRecord power_on_record(SimTime t, DeviceId d, const std::vector<PictureId>& pictures, double x = 0.0,
                                   double y = 0.0) {
    EventRecord r{t, d, EventKind::PowerOn, {}};
    r.fields["battery"] = "1000.000";
    r.fields["pictures"] = format_picture_list(pictures);
    r.fields["selected"] = pictures.empty() ? "none" : to_string(pictures.front());
    r.fields["x"] = format_fixed3(x);
    r.fields["y"] = format_fixed3(y);
    return r;
}

// Appends the two mirrored records of one trade.
inline void push_trade(EventLog& log, SimTime t, DeviceId a, PictureId a_sends, bool a_dup, DeviceId b,
                       PictureId b_sends, bool b_dup) {
    log.push_back(make_exchange_record(t, a, {b, a_sends, b_sends, a_dup}));
    log.push_back(make_exchange_record(t, b, {a, b_sends, a_sends, b_dup}));
}

// A well-formed log: every device powers on at 0 with a disjoint initial
// collection, then random trades of owned pictures. Timestamps repeat with
// probability ~1/3 so same-time deliveries are exercised.
struct RandomLog {
    EventLog log;
    std::map<DeviceId, std::vector<PictureId>> initial;
    std::map<DeviceId, std::set<PictureId>> final_owned;
};

inline RandomLog random_exchange_log(Rng& rng, std::size_t devices, std::size_t per_device, std::size_t max_events) {
    RandomLog out;
    std::uint32_t next_pic = 1;
    for (std::uint32_t d = 1; d <= devices; ++d) {
        std::vector<PictureId> pics;
        for (std::size_t i = 0; i < per_device; ++i) {
            pics.push_back(PictureId{next_pic++});
        }
        out.initial[DeviceId{d}] = pics;
        out.final_owned[DeviceId{d}] = {pics.begin(), pics.end()};
        out.log.push_back(power_on_record(SimTime{}, DeviceId{d}, pics));
    }
    // Trades start after every device has powered on.
    std::int64_t ms = 1000;
    while (out.log.size() + 2 <= max_events) {
        if (rng.uniform_index(3) != 0) {
            ms += 100 * static_cast<std::int64_t>(1 + rng.uniform_index(50));
        }
        const auto a = DeviceId{static_cast<std::uint32_t>(1 + rng.uniform_index(devices))};
        auto b = DeviceId{static_cast<std::uint32_t>(1 + rng.uniform_index(devices - 1))};
        if (raw(b) >= raw(a)) {
            b = DeviceId{raw(b) + 1};
        }
        auto pick = [&](DeviceId d) {
            const auto& s = out.final_owned[d];
            auto it = s.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(rng.uniform_index(s.size())));
            return *it;
        };
        const auto pa = pick(a);
        const auto pb = pick(b);
        const bool a_dup = out.final_owned[a].count(pb) != 0;
        const bool b_dup = out.final_owned[b].count(pa) != 0;
        push_trade(out.log, SimTime::from_ms(ms), a, pa, a_dup, b, pb, b_dup);
        out.final_owned[a].insert(pb);
        out.final_owned[b].insert(pa);
    }
    sort_log(out.log);
    return out;
}

// For every delivery of `picture`, in log order: true iff the receiver had it
// strictly before the delivery time, either initially or through an earlier
// delivery. Rescans the whole log for each delivery.
inline std::vector<bool> brute_force_rereceive(const EventLog& log, PictureId picture,
                                               const std::map<DeviceId, std::vector<PictureId>>& initial) {
    std::vector<bool> out;
    for (const auto& rec : log) {
        const auto p = exchange_payload(rec);
        if (!p || p->received != picture) {
            continue;
        }
        bool held = false;
        if (auto it = initial.find(rec.device); it != initial.end()) {
            held = std::find(it->second.begin(), it->second.end(), picture) != it->second.end();
        }
        for (const auto& earlier : log) {
            const auto q = exchange_payload(earlier);
            if (q && earlier.device == rec.device && q->received == picture && earlier.time < rec.time) {
                held = true;
            }
        }
        out.push_back(held);
    }
    return out;
}

// Probability that `target` ends up in a commit when the greedy rendezvous
// rule runs over `ripe` (undirected pairs), enumerating every branch of the
// uniform choices exactly.
inline double enumerate_participation(const std::set<std::pair<DeviceId, DeviceId>>& ripe, DeviceId target) {
    std::set<DeviceId> nodes;
    for (const auto& [a, b] : ripe) {
        nodes.insert(a);
        nodes.insert(b);
    }
    const std::vector<DeviceId> order(nodes.begin(), nodes.end());
    auto is_ripe = [&](DeviceId a, DeviceId b) {
        return ripe.count({std::min(a, b), std::max(a, b)}) != 0;
    };
    // Depth-first over the visit order with the branch probability carried.
    double total = 0.0;
    std::vector<std::pair<std::set<DeviceId>, std::pair<std::size_t, double>>> stack;
    stack.push_back({{}, {0, 1.0}});
    while (!stack.empty()) {
        auto [committed, pos_prob] = stack.back();
        stack.pop_back();
        auto [pos, prob] = pos_prob;
        while (pos < order.size()) {
            const auto d = order[pos];
            std::vector<DeviceId> options;
            if (!committed.count(d)) {
                for (auto e : order) {
                    if (e != d && !committed.count(e) && is_ripe(d, e)) {
                        options.push_back(e);
                    }
                }
            }
            if (!options.empty()) {
                break;
            }
            ++pos;
        }
        if (pos == order.size()) {
            if (committed.count(target)) {
                total += prob;
            }
            continue;
        }
        const auto d = order[pos];
        std::vector<DeviceId> options;
        for (auto e : order) {
            if (e != d && !committed.count(e) && is_ripe(d, e)) {
                options.push_back(e);
            }
        }
        for (auto e : options) {
            auto next = committed;
            next.insert(d);
            next.insert(e);
            stack.push_back({next, {pos + 1, prob / static_cast<double>(options.size())}});
        }
    }
    return total;
}

}  // namespace merkki::testing
