#include "merkki/radio.hpp"

#include <algorithm>

namespace merkki {

bool within_range(const Position& a, const Position& b, double range_m) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy <= range_m * range_m;
}

Adjacency::Adjacency(const std::vector<DeviceId>& nodes) {
    for (auto d : nodes) {
        add_node(d);
    }
}

void Adjacency::add_node(DeviceId d) { adj_.try_emplace(d); }

void Adjacency::connect(DeviceId a, DeviceId b) {
    if (a == b) {
        return;
    }
    adj_[a].insert(b);
    adj_[b].insert(a);
}

bool Adjacency::connected(DeviceId a, DeviceId b) const {
    auto it = adj_.find(a);
    return it != adj_.end() && it->second.count(b) != 0;
}

const std::set<DeviceId>& Adjacency::neighbors(DeviceId d) const {
    static const std::set<DeviceId> empty;
    auto it = adj_.find(d);
    return it == adj_.end() ? empty : it->second;
}

std::vector<DeviceId> Adjacency::nodes() const {
    std::vector<DeviceId> out;
    out.reserve(adj_.size());
    for (const auto& [d, _] : adj_) {
        out.push_back(d);
    }
    return out;
}

std::size_t Adjacency::edge_count() const {
    std::size_t n = 0;
    for (const auto& [_, ns] : adj_) {
        n += ns.size();
    }
    return n / 2;
}

Adjacency connectivity(const WorldSnapshot& world, const RadioParams& params) {
    std::vector<std::pair<DeviceId, Position>> live;
    for (const auto& [d, pos] : world.positions) {
        if (world.powered.count(d)) {
            live.emplace_back(d, pos);
        }
    }
    Adjacency adj;
    for (const auto& [d, _] : live) {
        adj.add_node(d);
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
        for (std::size_t j = i + 1; j < live.size(); ++j) {
            if (within_range(live[i].second, live[j].second, params.range_m)) {
                adj.connect(live[i].first, live[j].first);
            }
        }
    }
    return adj;
}

ProximitySummary proximity_summary(DeviceId d, const Adjacency& adjacency, const GroupConfig& groups) {
    ProximitySummary p;
    for (auto n : adjacency.neighbors(d)) {
        if (groups.same_group(d, n)) {
            ++p.peers_in_range;
        } else {
            ++p.strangers_in_range;
        }
    }
    return p;
}

SimTime OverlapTimers::get(DeviceId a, DeviceId b) const {
    auto it = timers_.find(key(a, b));
    return it == timers_.end() ? SimTime{} : it->second;
}

void OverlapTimers::set(DeviceId a, DeviceId b, SimTime value) {
    if (value <= SimTime{}) {
        timers_.erase(key(a, b));
    } else {
        timers_[key(a, b)] = value;
    }
}

RendezvousResult rendezvous_step(const std::map<DeviceId, std::optional<PictureId>>& searchers,
                                 const Adjacency& adjacency, OverlapTimers timers, SimTime dt,
                                 const RadioParams& params, Rng& rng) {
    RendezvousResult result;
    // Ascending, like the timer keys.
    std::vector<OverlapTimers::Key> live;
    for (auto ia = searchers.begin(); ia != searchers.end(); ++ia) {
        for (auto ib = std::next(ia); ib != searchers.end(); ++ib) {
            if (adjacency.connected(ia->first, ib->first)) {
                live.emplace_back(ia->first, ib->first);
            }
        }
    }
    result.timers = std::move(timers);
    result.timers.erase_if(
        [&live](const OverlapTimers::Key& k) { return !std::binary_search(live.begin(), live.end(), k); });
    for (const auto& [a, b] : live) {
        result.timers.advance(a, b, dt);
    }

    std::map<DeviceId, std::vector<DeviceId>> ripe;
    for (const auto& [key, value] : result.timers.entries()) {
        if (value < params.hold_duration) {
            continue;
        }
        if (!searchers.at(key.first) || !searchers.at(key.second)) {
            continue;
        }
        ripe[key.first].push_back(key.second);
        ripe[key.second].push_back(key.first);
    }

    std::set<DeviceId> committed;
    for (auto& [d, candidates] : ripe) {
        if (committed.count(d)) {
            continue;
        }
        std::vector<DeviceId> open;
        for (auto c : candidates) {
            if (!committed.count(c)) {
                open.push_back(c);
            }
        }
        if (open.empty()) {
            continue;
        }
        std::sort(open.begin(), open.end());
        const DeviceId partner = open[rng.uniform_index(open.size())];
        committed.insert(d);
        committed.insert(partner);
        const DeviceId a = std::min(d, partner);
        const DeviceId b = std::max(d, partner);
        result.commits.push_back(Commit{a, b, *searchers.at(a), *searchers.at(b)});
    }

    if (!committed.empty()) {
        result.timers.erase_if([&](const OverlapTimers::Key& k) {
            return committed.count(k.first) || committed.count(k.second);
        });
    }
    return result;
}

std::vector<TempoDelivery> propagate_tempo(DeviceId source, const Adjacency& adjacency, const RadioParams& params,
                                           Rng& rng) {
    std::vector<TempoDelivery> out{{source, 0, SimTime{}}};
    std::set<DeviceId> reached{source};
    std::vector<DeviceId> frontier{source};
    std::size_t hops = 0;
    while (!frontier.empty()) {
        ++hops;
        std::set<DeviceId> next;
        for (auto u : frontier) {
            for (auto v : adjacency.neighbors(u)) {
                if (reached.count(v) || next.count(v)) {
                    continue;
                }
                if (rng.bernoulli(params.loss_prob)) {
                    continue;
                }
                next.insert(v);
            }
        }
        frontier.assign(next.begin(), next.end());
        for (auto v : frontier) {
            reached.insert(v);
            out.push_back({v, hops, SimTime::from_ms(params.latency.ms() * static_cast<std::int64_t>(hops))});
        }
    }
    return out;
}

}  // namespace merkki
