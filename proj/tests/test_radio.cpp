#include <doctest.h>

#include <cmath>
#include <deque>

#include "merkki/radio.hpp"
#include "support.hpp"

using namespace merkki;

namespace {

DeviceId dev(std::uint32_t i) { return DeviceId{i}; }

WorldSnapshot world_of(const std::vector<Position>& ps) {
    WorldSnapshot w;
    for (std::uint32_t i = 0; i < ps.size(); ++i) {
        w.positions[dev(i + 1)] = ps[i];
        w.powered.insert(dev(i + 1));
    }
    return w;
}

Adjacency star(std::uint32_t leaves) {
    Adjacency a;
    a.add_node(dev(1));
    for (std::uint32_t i = 2; i <= leaves + 1; ++i) {
        a.connect(dev(1), dev(i));
    }
    return a;
}

Adjacency line(std::uint32_t n) {
    Adjacency a;
    a.add_node(dev(1));
    for (std::uint32_t i = 2; i <= n; ++i) {
        a.connect(dev(i - 1), dev(i));
    }
    return a;
}

std::map<DeviceId, std::optional<PictureId>> searching(std::initializer_list<std::uint32_t> ids) {
    std::map<DeviceId, std::optional<PictureId>> out;
    for (auto i : ids) {
        out[dev(i)] = PictureId{100 + i};
    }
    return out;
}

}  // namespace

TEST_CASE("disk connectivity") {
    RadioParams p;
    CHECK(connectivity(world_of({{0, 0}, {49, 0}}), p).connected(dev(1), dev(2)));
    CHECK_FALSE(connectivity(world_of({{0, 0}, {51, 0}}), p).connected(dev(1), dev(2)));
    CHECK(connectivity(world_of({{0, 0}, {30, 40}}), p).connected(dev(1), dev(2)));

    auto w = world_of({{0, 0}, {1, 0}});
    w.powered.erase(dev(2));
    const auto adj = connectivity(w, p);
    CHECK_FALSE(adj.contains(dev(2)));
    CHECK(adj.edge_count() == 0);
}

TEST_CASE("connectivity equals a brute-force distance check") {
    Rng rng(11);
    RadioParams p;
    p.range_m = 30.0;
    for (int round = 0; round < 50; ++round) {
        std::vector<Position> ps;
        for (int i = 0; i < 10; ++i) {
            ps.push_back({rng.uniform01() * 100.0, rng.uniform01() * 100.0});
        }
        const auto adj = connectivity(world_of(ps), p);
        std::size_t edges = 0;
        for (std::uint32_t i = 0; i < 10; ++i) {
            for (std::uint32_t j = 0; j < 10; ++j) {
                if (i == j) {
                    CHECK_FALSE(adj.connected(dev(i + 1), dev(j + 1)));
                    continue;
                }
                const bool near = std::hypot(ps[i].x - ps[j].x, ps[i].y - ps[j].y) <= 30.0;
                CHECK(adj.connected(dev(i + 1), dev(j + 1)) == near);
                edges += near ? 1 : 0;
            }
        }
        CHECK(adj.edge_count() == edges / 2);
    }
}

TEST_CASE("proximity summary") {
    GroupConfig g;
    g.group = {{dev(1), "a"}, {dev(2), "a"}, {dev(3), "a"}, {dev(4), "b"}};
    Adjacency all;
    all.connect(dev(1), dev(2));
    all.connect(dev(1), dev(3));
    CHECK(proximity_summary(dev(1), all, g) == ProximitySummary{0, 2});
    all.connect(dev(1), dev(4));
    CHECK(proximity_summary(dev(1), all, g) == ProximitySummary{1, 2});
    Adjacency none;
    none.add_node(dev(1));
    CHECK(proximity_summary(dev(1), none, g) == ProximitySummary{0, 0});
}

TEST_CASE("two co-searching devices commit after the hold duration") {
    RadioParams p;
    Rng rng(1);
    const auto adj = star(1);
    OverlapTimers timers;
    int steps = 0;
    std::vector<Commit> commits;
    while (commits.empty() && steps < 100) {
        auto r = rendezvous_step(searching({1, 2}), adj, timers, SimTime::from_ms(100), p, rng);
        timers = r.timers;
        commits = r.commits;
        ++steps;
    }
    CHECK(steps == 50);
    REQUIRE(commits.size() == 1);
    CHECK(commits[0] == Commit{dev(1), dev(2), PictureId{101}, PictureId{102}});
    CHECK(timers.entries().empty());
}

TEST_CASE("a single searcher never commits and non-adjacent timers reset") {
    RadioParams p;
    Rng rng(1);
    OverlapTimers timers;
    for (int i = 0; i < 200; ++i) {
        auto r = rendezvous_step(searching({1}), star(1), timers, SimTime::from_ms(100), p, rng);
        CHECK(r.commits.empty());
        timers = r.timers;
    }
    timers.set(dev(1), dev(2), SimTime::from_ms(4900));
    Adjacency apart;
    apart.add_node(dev(1));
    apart.add_node(dev(2));
    auto r = rendezvous_step(searching({1, 2}), apart, timers, SimTime::from_ms(100), p, rng);
    CHECK(r.commits.empty());
    CHECK(r.timers.get(dev(1), dev(2)) == SimTime{});
}

TEST_CASE("locked selections never commit") {
    RadioParams p;
    Rng rng(1);
    std::map<DeviceId, std::optional<PictureId>> s{{dev(1), std::nullopt}, {dev(2), PictureId{5}}};
    OverlapTimers timers;
    timers.set(dev(1), dev(2), SimTime::from_ms(60000));
    auto r = rendezvous_step(s, star(1), timers, SimTime::from_ms(100), p, rng);
    CHECK(r.commits.empty());
}

TEST_CASE("three mutually ripe devices: the first picks each partner half the time") {
    CHECK(testing::enumerate_participation({{dev(1), dev(2)}, {dev(1), dev(3)}, {dev(2), dev(3)}}, dev(2)) ==
          doctest::Approx(0.5));
    CHECK(testing::enumerate_participation({{dev(1), dev(2)}, {dev(1), dev(3)}, {dev(2), dev(3)}}, dev(1)) ==
          doctest::Approx(1.0));
    CHECK(testing::enumerate_participation({{dev(1), dev(3)}, {dev(2), dev(3)}}, dev(2)) == doctest::Approx(0.0));

    RadioParams p;
    Adjacency full;
    full.connect(dev(1), dev(2));
    full.connect(dev(1), dev(3));
    full.connect(dev(2), dev(3));
    Rng rng(5);
    int with_two = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        OverlapTimers t;
        t.set(dev(1), dev(2), SimTime::from_ms(5000));
        t.set(dev(1), dev(3), SimTime::from_ms(5000));
        t.set(dev(2), dev(3), SimTime::from_ms(5000));
        auto r = rendezvous_step(searching({1, 2, 3}), full, t, SimTime::from_ms(100), p, rng);
        REQUIRE(r.commits.size() == 1);
        CHECK(r.commits[0].a == dev(1));
        with_two += r.commits[0].b == dev(2) ? 1 : 0;
        // The device left over keeps no timer with the committed pair.
        CHECK(r.timers.entries().empty());
    }
    CHECK(static_cast<double>(with_two) / trials == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("rendezvous matches the enumeration on random ripe graphs") {
    Rng gen(21);
    RadioParams p;
    for (int round = 0; round < 20; ++round) {
        const std::uint32_t n = 3 + static_cast<std::uint32_t>(gen.uniform_index(3));
        Adjacency adj;
        OverlapTimers timers;
        std::set<std::pair<DeviceId, DeviceId>> ripe;
        std::map<DeviceId, std::optional<PictureId>> s;
        for (std::uint32_t i = 1; i <= n; ++i) {
            adj.add_node(dev(i));
            s[dev(i)] = PictureId{i};
            for (std::uint32_t j = i + 1; j <= n; ++j) {
                if (gen.bernoulli(0.6)) {
                    adj.connect(dev(i), dev(j));
                    timers.set(dev(i), dev(j), SimTime::from_ms(5000));
                    ripe.insert({dev(i), dev(j)});
                }
            }
        }
        const DeviceId target = dev(1 + static_cast<std::uint32_t>(gen.uniform_index(n)));
        const double expected = testing::enumerate_participation(ripe, target);
        Rng rng(round);
        int hits = 0;
        const int trials = 4000;
        for (int i = 0; i < trials; ++i) {
            auto r = rendezvous_step(s, adj, timers, SimTime::from_ms(100), p, rng);
            for (const auto& c : r.commits) {
                hits += (c.a == target || c.b == target) ? 1 : 0;
            }
        }
        CHECK(static_cast<double>(hits) / trials == doctest::Approx(expected).epsilon(0.04));
    }
}

TEST_CASE("tempo flood timing") {
    RadioParams p;
    Rng rng(3);
    const auto s = propagate_tempo(dev(1), star(4), p, rng);
    REQUIRE(s.size() == 5);
    CHECK(s[0] == TempoDelivery{dev(1), 0, SimTime{}});
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].hops == 1);
        CHECK(s[i].offset == SimTime::from_ms(100));
    }

    const auto l = propagate_tempo(dev(1), line(3), p, rng);
    REQUIRE(l.size() == 3);
    CHECK(l[2] == TempoDelivery{dev(3), 2, SimTime::from_ms(200)});

    RadioParams lossy;
    lossy.loss_prob = 1.0;
    const auto only = propagate_tempo(dev(1), star(4), lossy, rng);
    REQUIRE(only.size() == 1);
    CHECK(only[0].device == dev(1));
}

TEST_CASE("tempo flood reaches the BFS component at BFS depth") {
    Rng gen(8);
    RadioParams p;
    for (int round = 0; round < 30; ++round) {
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(gen.uniform_index(12));
        Adjacency adj;
        for (std::uint32_t i = 1; i <= n; ++i) {
            adj.add_node(dev(i));
            for (std::uint32_t j = 1; j < i; ++j) {
                if (gen.bernoulli(0.25)) {
                    adj.connect(dev(i), dev(j));
                }
            }
        }
        std::map<DeviceId, std::size_t> depth{{dev(1), 0}};
        std::deque<DeviceId> q{dev(1)};
        while (!q.empty()) {
            const auto d = q.front();
            q.pop_front();
            for (auto nb : adj.neighbors(d)) {
                if (depth.emplace(nb, depth[d] + 1).second) {
                    q.push_back(nb);
                }
            }
        }
        const auto got = propagate_tempo(dev(1), adj, p, gen);
        REQUIRE(got.size() == depth.size());
        for (const auto& t : got) {
            REQUIRE(depth.count(t.device));
            CHECK(t.hops == depth[t.device]);
            CHECK(t.offset == SimTime::from_ms(100 * static_cast<std::int64_t>(t.hops)));
        }
    }
}
