#pragma once

// Simulated short-range radio. Proximity and trading use the single-hop disk
// graph; tempo changes flood across it hop by hop.

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "merkki/core.hpp"
#include "merkki/device.hpp"
#include "merkki/rng.hpp"

namespace merkki {

struct Position {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

bool within_range(const Position& a, const Position& b, double range_m) noexcept;

struct WorldSnapshot {
    std::map<DeviceId, Position> positions;
    std::set<DeviceId> powered;
};

// Undirected, irreflexive graph over a fixed node set.
class Adjacency {
public:
    Adjacency() = default;
    explicit Adjacency(const std::vector<DeviceId>& nodes);

    void add_node(DeviceId d);
    void connect(DeviceId a, DeviceId b);

    bool contains(DeviceId d) const { return adj_.count(d) != 0; }
    bool connected(DeviceId a, DeviceId b) const;
    // Ascending. Empty for unknown nodes.
    const std::set<DeviceId>& neighbors(DeviceId d) const;
    std::vector<DeviceId> nodes() const;
    std::size_t edge_count() const;

    bool operator==(const Adjacency&) const = default;

private:
    std::map<DeviceId, std::set<DeviceId>> adj_;
};

// Edge (a, b) iff both are powered, both have positions and their distance
// is at most range_m. Nodes are the powered, positioned devices.
Adjacency connectivity(const WorldSnapshot& world, const RadioParams& params);

ProximitySummary proximity_summary(DeviceId d, const Adjacency& adjacency, const GroupConfig& groups);

// Accumulated concurrent-searching time per unordered device pair.
class OverlapTimers {
public:
    using Key = std::pair<DeviceId, DeviceId>;

    static Key key(DeviceId a, DeviceId b) { return a < b ? Key{a, b} : Key{b, a}; }

    SimTime get(DeviceId a, DeviceId b) const;
    void set(DeviceId a, DeviceId b, SimTime value);
    void advance(DeviceId a, DeviceId b, SimTime dt) { timers_[key(a, b)] += dt; }
    template <class Pred>
    void erase_if(Pred pred) {
        std::erase_if(timers_, [&pred](const auto& kv) { return pred(kv.first); });
    }
    const std::map<Key, SimTime>& entries() const noexcept { return timers_; }

private:
    std::map<Key, SimTime> timers_;
};

struct Commit {
    DeviceId a{};  // a < b
    DeviceId b{};
    PictureId a_sends{};
    PictureId b_sends{};

    bool operator==(const Commit&) const = default;
};

struct RendezvousResult {
    OverlapTimers timers;
    std::vector<Commit> commits;
};

// One synchronisation step of the trade rendezvous.
//
// `searchers` maps every device that has been searching for the whole step to
// its outgoing picture (nullopt when the selection is locked). Timers of
// adjacent co-searching pairs advance by dt; every other timer resets. Pairs
// whose timer reached hold_duration are ripe. Devices are then visited in
// ascending id; each uncommitted device with uncommitted ripe partners picks
// one uniformly at random. Committed devices have all their timers reset.
// Devices without an outgoing picture never commit.
RendezvousResult rendezvous_step(const std::map<DeviceId, std::optional<PictureId>>& searchers,
                                 const Adjacency& adjacency, OverlapTimers timers, SimTime dt,
                                 const RadioParams& params, Rng& rng);

struct TempoDelivery {
    DeviceId device{};
    std::size_t hops = 0;
    SimTime offset;  // latency * hops

    bool operator==(const TempoDelivery&) const = default;
};

// Hop-delayed flood of a tempo change from `source`. The source itself is the
// first entry (0 hops). Each hop transmission is lost with loss_prob; a lost
// transmission only cuts that path. Ordered by (hops, device).
std::vector<TempoDelivery> propagate_tempo(DeviceId source, const Adjacency& adjacency, const RadioParams& params,
                                           Rng& rng);

}  // namespace merkki
