#include "merkki/analysis.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <fmt/format.h>

namespace merkki {
namespace {

template <typename T>
std::vector<T> sorted(const std::set<T>& s) {
    return {s.begin(), s.end()};
}

std::set<PictureId> exchanged_pictures(const EventLog& log) {
    std::set<PictureId> out;
    for (const auto& rec : log) {
        if (auto p = exchange_payload(rec)) {
            out.insert(p->sent);
            out.insert(p->received);
        }
    }
    return out;
}

std::string_view class_name(EdgeClass c) { return c == EdgeClass::InitialSpread ? "initial_spread" : "re_receive"; }

}  // namespace

UnknownPicture::UnknownPicture(PictureId p) : std::runtime_error(fmt::format("unknown picture {}", raw(p))) {}
UnknownDevice::UnknownDevice(DeviceId d) : std::runtime_error(fmt::format("unknown device {}", raw(d))) {}

Universe universe_from_log(const EventLog& log) {
    Universe u;
    std::set<DeviceId> devices;
    std::set<PictureId> pictures = exchanged_pictures(log);
    std::set<PictureId> delivered;
    for (const auto& rec : log) {
        devices.insert(rec.device);
        if (auto p = exchange_payload(rec)) {
            devices.insert(p->partner);
            delivered.insert(p->received);
            continue;
        }
        if (rec.kind != EventKind::PowerOn || u.initial_collection.count(rec.device)) {
            continue;
        }
        const auto* list = rec.field("pictures");
        if (!list) {
            continue;
        }
        auto owned = parse_picture_list(*list);
        if (!owned) {
            continue;
        }
        u.initial_collection[rec.device] = *owned;
        for (auto p : *owned) {
            pictures.insert(p);
            if (!delivered.count(p)) {
                u.initial_owner.try_emplace(p, rec.device);
            }
        }
    }
    u.devices = sorted(devices);
    u.pictures = sorted(pictures);
    return u;
}

Universe universe_from_scenario(const Scenario& scenario) {
    Universe u;
    std::set<DeviceId> devices;
    std::set<PictureId> pictures;
    for (const auto& d : scenario.devices) {
        devices.insert(d.id);
        u.initial_collection[d.id] = d.initial_pictures;
    }
    for (const auto& p : scenario.pictures) {
        pictures.insert(p.id);
        if (p.initial_owner) {
            u.initial_owner[p.id] = *p.initial_owner;
        }
    }
    u.devices = sorted(devices);
    u.pictures = sorted(pictures);
    return u;
}

Universe merge(const Universe& primary, const Universe& secondary) {
    Universe u = primary;
    std::set<DeviceId> devices(primary.devices.begin(), primary.devices.end());
    devices.insert(secondary.devices.begin(), secondary.devices.end());
    std::set<PictureId> pictures(primary.pictures.begin(), primary.pictures.end());
    pictures.insert(secondary.pictures.begin(), secondary.pictures.end());
    u.devices = sorted(devices);
    u.pictures = sorted(pictures);
    for (const auto& [p, d] : secondary.initial_owner) {
        u.initial_owner.try_emplace(p, d);
    }
    for (const auto& [d, c] : secondary.initial_collection) {
        u.initial_collection.try_emplace(d, c);
    }
    return u;
}

std::vector<PictureStats> picture_stats(const EventLog& log, const Universe& universe) {
    std::map<PictureId, std::size_t> deliveries;
    std::map<PictureId, std::set<DeviceId>> recipients;
    for (const auto& rec : log) {
        auto p = exchange_payload(rec);
        if (!p) {
            continue;
        }
        ++deliveries[p->received];
        auto owner = universe.initial_owner.find(p->received);
        if (owner == universe.initial_owner.end() || owner->second != rec.device) {
            recipients[p->received].insert(rec.device);
        }
    }
    std::set<PictureId> ids(universe.pictures.begin(), universe.pictures.end());
    for (const auto& [p, _] : deliveries) {
        ids.insert(p);
    }
    std::vector<PictureStats> out;
    for (auto p : ids) {
        out.push_back({p, deliveries[p], recipients[p].size()});
    }
    return out;
}

std::vector<PictureStats> picture_stats(const EventLog& log) { return picture_stats(log, universe_from_log(log)); }

std::string format_stats(const std::vector<PictureStats>& stats) {
    std::string out;
    for (const auto& s : stats) {
        out += fmt::format("{:02d}: {}, {}\n", raw(s.picture), s.times_exchanged, s.distinct_recipients);
    }
    return out;
}

std::size_t ShareMatrix::at(DeviceId sender, PictureId picture) const {
    auto r = std::lower_bound(senders.begin(), senders.end(), sender);
    auto c = std::lower_bound(pictures.begin(), pictures.end(), picture);
    if (r == senders.end() || *r != sender || c == pictures.end() || *c != picture) {
        return 0;
    }
    return cells[static_cast<std::size_t>(r - senders.begin())][static_cast<std::size_t>(c - pictures.begin())];
}

std::size_t ShareMatrix::row_sum(std::size_t row) const {
    std::size_t n = 0;
    for (auto v : cells[row]) {
        n += v;
    }
    return n;
}

std::size_t ShareMatrix::total() const {
    std::size_t n = 0;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        n += row_sum(r);
    }
    return n;
}

ShareMatrix share_heatmap(const EventLog& log, const Universe& universe) {
    std::set<DeviceId> senders(universe.devices.begin(), universe.devices.end());
    std::set<PictureId> pictures(universe.pictures.begin(), universe.pictures.end());
    std::map<std::pair<DeviceId, PictureId>, std::size_t> counts;
    for (const auto& rec : log) {
        if (auto p = exchange_payload(rec)) {
            senders.insert(rec.device);
            pictures.insert(p->sent);
            ++counts[{rec.device, p->sent}];
        }
    }
    ShareMatrix m;
    m.senders = sorted(senders);
    m.pictures = sorted(pictures);
    m.cells.assign(m.senders.size(), std::vector<std::size_t>(m.pictures.size(), 0));
    for (std::size_t r = 0; r < m.senders.size(); ++r) {
        for (std::size_t c = 0; c < m.pictures.size(); ++c) {
            auto it = counts.find({m.senders[r], m.pictures[c]});
            if (it != counts.end()) {
                m.cells[r][c] = it->second;
            }
        }
    }
    return m;
}

ShareMatrix share_heatmap(const EventLog& log) { return share_heatmap(log, universe_from_log(log)); }

std::string format_matrix(const ShareMatrix& m) {
    std::string out = "sender";
    for (auto p : m.pictures) {
        out += fmt::format("\t{}", raw(p));
    }
    out += '\n';
    for (std::size_t r = 0; r < m.senders.size(); ++r) {
        out += to_string(m.senders[r]);
        for (auto v : m.cells[r]) {
            out += fmt::format("\t{}", v);
        }
        out += '\n';
    }
    return out;
}

DiffusionGraph diffusion_graph(const EventLog& log, PictureId picture, const Universe& universe) {
    auto owner = universe.initial_owner.find(picture);
    if (owner == universe.initial_owner.end()) {
        throw UnknownPicture(picture);
    }
    DiffusionGraph g{picture, owner->second, {}};
    std::map<DeviceId, SimTime> first_received;
    for (const auto& rec : log) {
        auto p = exchange_payload(rec);
        if (!p || p->received != picture) {
            continue;
        }
        const DeviceId receiver = rec.device;
        bool held = receiver == g.initial_owner;
        if (auto it = first_received.find(receiver); it != first_received.end() && it->second < rec.time) {
            held = true;
        }
        g.edges.push_back({p->partner, receiver, rec.time, held ? EdgeClass::ReReceive : EdgeClass::InitialSpread});
        first_received.try_emplace(receiver, rec.time);
    }
    return g;
}

DiffusionGraph diffusion_graph(const EventLog& log, PictureId picture) {
    return diffusion_graph(log, picture, universe_from_log(log));
}

std::string export_graph(const DiffusionGraph& g) {
    std::set<DeviceId> nodes{g.initial_owner};
    for (const auto& e : g.edges) {
        nodes.insert(e.sender);
        nodes.insert(e.receiver);
    }
    std::string out = fmt::format("digraph picture_{} {{\n", raw(g.picture));
    out += fmt::format("  graph [picture={}, initial_owner={}];\n", raw(g.picture), raw(g.initial_owner));
    for (auto n : nodes) {
        const bool owner = n == g.initial_owner;
        out += fmt::format("  {} [initial_owner={}, color={}];\n", raw(n), owner ? "true" : "false",
                           owner ? "magenta" : "black");
    }
    for (const auto& e : g.edges) {
        out += fmt::format("  {} -> {} [class={}, time=\"{}\", color={}];\n", raw(e.sender), raw(e.receiver),
                           class_name(e.cls), e.time.to_string(),
                           e.cls == EdgeClass::InitialSpread ? "magenta" : "blue");
    }
    out += "}\n";
    return out;
}

GraphParseError::GraphParseError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)) {}

DiffusionGraph parse_graph(std::string_view text) {
    static const std::regex header(R"(^digraph picture_(\d+) \{$)");
    static const std::regex attrs(R"(^  graph \[picture=(\d+), initial_owner=(\d+)\];$)");
    static const std::regex node(R"(^  (\d+) \[initial_owner=(true|false), color=\w+\];$)");
    static const std::regex edge(
        R"re(^  (\d+) -> (\d+) \[class=(initial_spread|re_receive), time="([0-9]+\.[0-9]{3})", color=\w+\];$)re");

    DiffusionGraph g;
    bool seen_header = false;
    bool seen_attrs = false;
    bool closed = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto to_u32 = [](const std::string& s) { return static_cast<std::uint32_t>(std::stoul(s)); };
    while (pos < text.size()) {
        ++line_no;
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string line{text.substr(pos, end - pos)};
        pos = end + 1;
        std::smatch m;
        if (closed) {
            throw GraphParseError(line_no, "content after closing brace");
        }
        if (!seen_header) {
            if (!std::regex_match(line, m, header)) {
                throw GraphParseError(line_no, "expected digraph header");
            }
            g.picture = PictureId{to_u32(m[1])};
            seen_header = true;
        } else if (!seen_attrs) {
            if (!std::regex_match(line, m, attrs)) {
                throw GraphParseError(line_no, "expected graph attributes");
            }
            if (PictureId{to_u32(m[1])} != g.picture) {
                throw GraphParseError(line_no, "picture id mismatch");
            }
            g.initial_owner = DeviceId{to_u32(m[2])};
            seen_attrs = true;
        } else if (std::regex_match(line, m, node)) {
            const bool owner = m[2] == "true";
            if (owner != (DeviceId{to_u32(m[1])} == g.initial_owner)) {
                throw GraphParseError(line_no, "initial_owner attribute disagrees with graph");
            }
        } else if (std::regex_match(line, m, edge)) {
            auto t = SimTime::parse(m[4].str());
            if (!t) {
                throw GraphParseError(line_no, "bad edge time");
            }
            g.edges.push_back({DeviceId{to_u32(m[1])}, DeviceId{to_u32(m[2])}, *t,
                               m[3] == "initial_spread" ? EdgeClass::InitialSpread : EdgeClass::ReReceive});
        } else if (line == "}") {
            closed = true;
        } else {
            throw GraphParseError(line_no, fmt::format("unrecognised line '{}'", line));
        }
    }
    if (!closed) {
        throw GraphParseError(line_no, "missing closing brace");
    }
    return g;
}

std::vector<RepetitionEntry> repetition_index(const EventLog& log) {
    std::map<std::pair<DeviceId, PictureId>, std::size_t> sends;
    for (const auto& rec : log) {
        if (auto p = exchange_payload(rec)) {
            ++sends[{rec.device, p->sent}];
        }
    }
    std::vector<RepetitionEntry> out;
    for (const auto& [key, n] : sends) {
        const double index = n <= 1 ? 0.0 : static_cast<double>(n - 1) / static_cast<double>(n);
        out.push_back({key.first, key.second, n, index});
    }
    return out;
}

std::string format_repetition(const std::vector<RepetitionEntry>& entries) {
    std::string out = "sender\tpicture\tsends\tindex\n";
    for (const auto& e : entries) {
        out += fmt::format("{}\t{}\t{}\t{:.6f}\n", raw(e.sender), raw(e.picture), e.sends, e.index);
    }
    return out;
}

std::vector<TimelineEntry> collection_timeline(const EventLog& log, DeviceId device, const Universe& universe) {
    if (!std::binary_search(universe.devices.begin(), universe.devices.end(), device)) {
        throw UnknownDevice(device);
    }
    std::set<PictureId> owned;
    if (auto it = universe.initial_collection.find(device); it != universe.initial_collection.end()) {
        owned.insert(it->second.begin(), it->second.end());
    }
    std::vector<TimelineEntry> out;
    for (const auto& rec : log) {
        if (rec.device != device) {
            continue;
        }
        if (auto p = exchange_payload(rec)) {
            const bool fresh = owned.insert(p->received).second;
            out.push_back({rec.time, p->received, fresh ? Acquisition::New : Acquisition::Duplicate});
        }
    }
    return out;
}

std::vector<TimelineEntry> collection_timeline(const EventLog& log, DeviceId device) {
    return collection_timeline(log, device, universe_from_log(log));
}

std::string format_timeline(const std::vector<TimelineEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += fmt::format("{}\t{}\t{}\n", e.time.to_string(), raw(e.picture),
                           e.kind == Acquisition::New ? "NEW" : "DUPLICATE");
    }
    return out;
}

}  // namespace merkki
