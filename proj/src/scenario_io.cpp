#include "merkki/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace merkki {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        const auto start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

class LineParser {
public:
    explicit LineParser(std::size_t line) : line_(line) {}

    [[noreturn]] void fail(const std::string& message) const { throw ScenarioParseError(line_, message); }

    double number(std::string_view key, std::string_view text) const {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
            fail(fmt::format("{}: expected a number, got '{}'", key, text));
        }
        return value;
    }

    std::uint64_t integer(std::string_view key, std::string_view text) const {
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(fmt::format("{}: expected a non-negative integer, got '{}'", key, text));
        }
        return value;
    }

    std::uint32_t id(std::string_view key, std::string_view text) const {
        const auto v = integer(key, text);
        if (v > 0xffffffffULL) {
            fail(fmt::format("{}: id out of range", key));
        }
        return static_cast<std::uint32_t>(v);
    }

    SimTime seconds(std::string_view key, std::string_view text) const {
        const double v = number(key, text);
        if (v < 0.0) {
            fail(fmt::format("{}: time must be non-negative", key));
        }
        return SimTime::from_seconds(v);
    }

    template <typename Id>
    std::vector<Id> id_list(std::string_view key, std::string_view text) const {
        std::vector<Id> out;
        if (text.empty()) {
            return out;
        }
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            const auto part = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
            out.push_back(Id{id(key, part)});
            if (comma == std::string_view::npos) {
                return out;
            }
            start = comma + 1;
        }
    }

    // "k=v k=v ..." -> map; duplicate keys rejected.
    std::map<std::string, std::string> attributes(const std::vector<std::string_view>& tokens,
                                                  std::size_t first) const {
        std::map<std::string, std::string> out;
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string_view::npos || eq == 0) {
                fail(fmt::format("expected key=value, got '{}'", tokens[i]));
            }
            std::string key{tokens[i].substr(0, eq)};
            if (!out.emplace(key, std::string{tokens[i].substr(eq + 1)}).second) {
                fail(fmt::format("attribute '{}' given twice", key));
            }
        }
        return out;
    }

    void reject_unknown(const std::map<std::string, std::string>& attrs,
                        std::initializer_list<std::string_view> allowed) const {
        for (const auto& [k, _] : attrs) {
            bool ok = false;
            for (auto a : allowed) {
                ok = ok || a == k;
            }
            if (!ok) {
                fail(fmt::format("unknown attribute '{}'", k));
            }
        }
    }

private:
    std::size_t line_;
};

Archetype parse_archetype(const LineParser& lp, std::string_view token) {
    for (auto a : {Archetype::Trader, Archetype::Spammer, Archetype::Collector, Archetype::ChallengeKeeper,
                   Archetype::Idle}) {
        if (to_string(a) == token) {
            return a;
        }
    }
    lp.fail(fmt::format("unknown archetype '{}'", token));
}

void parse_scenario_key(const LineParser& lp, Scenario& s, std::string_view key, std::string_view value) {
    if (key == "seed") {
        s.seed = lp.integer(key, value);
    } else if (key == "duration_s") {
        s.duration = lp.seconds(key, value);
    } else if (key == "max_events") {
        s.max_events = static_cast<std::size_t>(lp.integer(key, value));
    } else {
        lp.fail(fmt::format("unknown [scenario] key '{}'", key));
    }
}

void parse_radio_key(const LineParser& lp, RadioParams& r, std::string_view key, std::string_view value) {
    if (key == "range_m") {
        r.range_m = lp.number(key, value);
    } else if (key == "latency_s") {
        r.latency = lp.seconds(key, value);
    } else if (key == "loss_prob") {
        r.loss_prob = lp.number(key, value);
    } else if (key == "hold_duration_s") {
        r.hold_duration = lp.seconds(key, value);
    } else if (key == "beat_window_s") {
        r.beat_window = lp.seconds(key, value);
    } else {
        lp.fail(fmt::format("unknown [radio] key '{}'", key));
    }
}

DeviceSpec parse_device(const LineParser& lp, std::string_view key, std::string_view value) {
    DeviceSpec d;
    d.id = DeviceId{lp.id("device id", key)};
    const auto attrs = lp.attributes(split_ws(value), 0);
    lp.reject_unknown(attrs, {"group", "colour", "pictures"});
    if (auto it = attrs.find("group"); it != attrs.end()) {
        d.group = it->second;
    }
    if (auto it = attrs.find("colour"); it != attrs.end()) {
        d.colour = it->second;
    }
    if (auto it = attrs.find("pictures"); it != attrs.end()) {
        d.initial_pictures = lp.id_list<PictureId>("pictures", it->second);
    }
    return d;
}

Picture parse_picture(const LineParser& lp, std::string_view key, std::string_view value) {
    Picture p;
    p.id = PictureId{lp.id("picture id", key)};
    const auto attrs = lp.attributes(split_ws(value), 0);
    lp.reject_unknown(attrs, {"owner", "lock"});
    if (auto it = attrs.find("owner"); it != attrs.end()) {
        p.initial_owner = DeviceId{lp.id("owner", it->second)};
    }
    if (auto it = attrs.find("lock"); it != attrs.end()) {
        p.lock = it->second == "never" ? ChallengeLock::never() : ChallengeLock::until(lp.seconds("lock", it->second));
    }
    return p;
}

Gathering parse_gathering(const LineParser& lp, std::string_view value) {
    Gathering g;
    const auto attrs = lp.attributes(split_ws(value), 0);
    lp.reject_unknown(attrs, {"start", "end", "placement", "spacing", "radius", "devices"});
    auto require = [&](const char* k) -> const std::string& {
        auto it = attrs.find(k);
        if (it == attrs.end()) {
            lp.fail(fmt::format("gathering needs '{}'", k));
        }
        return it->second;
    };
    g.start = lp.seconds("start", require("start"));
    g.end = lp.seconds("end", require("end"));
    if (auto it = attrs.find("placement"); it != attrs.end()) {
        if (it->second == "grid") {
            g.placement.kind = PlacementKind::Grid;
        } else if (it->second == "disc") {
            g.placement.kind = PlacementKind::Disc;
        } else if (it->second == "line") {
            g.placement.kind = PlacementKind::Line;
        } else {
            lp.fail(fmt::format("unknown placement '{}'", it->second));
        }
    }
    if (auto it = attrs.find("spacing"); it != attrs.end()) {
        g.placement.spacing_m = lp.number("spacing", it->second);
    }
    if (auto it = attrs.find("radius"); it != attrs.end()) {
        g.placement.radius_m = lp.number("radius", it->second);
    }
    if (auto it = attrs.find("devices"); it != attrs.end() && it->second != "all") {
        g.devices = lp.id_list<DeviceId>("devices", it->second);
    }
    return g;
}

BehaviorSpec parse_behavior(const LineParser& lp, std::string_view value) {
    const auto tokens = split_ws(value);
    if (tokens.empty()) {
        lp.fail("behavior needs an archetype");
    }
    BehaviorSpec b;
    b.archetype = parse_archetype(lp, tokens[0]);
    const auto attrs = lp.attributes(tokens, 1);
    lp.reject_unknown(attrs,
                      {"rate", "hold_min", "hold_max", "beat_rate", "picture", "targets", "locked", "locked_fraction"});
    if (auto it = attrs.find("rate"); it != attrs.end()) {
        b.trade_rate_per_min = lp.number("rate", it->second);
    }
    if (auto it = attrs.find("hold_min"); it != attrs.end()) {
        b.hold_min = lp.seconds("hold_min", it->second);
    }
    if (auto it = attrs.find("hold_max"); it != attrs.end()) {
        b.hold_max = lp.seconds("hold_max", it->second);
    }
    if (auto it = attrs.find("beat_rate"); it != attrs.end()) {
        b.beat_rate_per_min = lp.number("beat_rate", it->second);
    }
    if (auto it = attrs.find("picture"); it != attrs.end()) {
        b.spam_picture = PictureId{lp.id("picture", it->second)};
    }
    if (auto it = attrs.find("targets"); it != attrs.end()) {
        b.targets = lp.id_list<PictureId>("targets", it->second);
    }
    if (auto it = attrs.find("locked"); it != attrs.end()) {
        b.locked = lp.id_list<PictureId>("locked", it->second);
    }
    if (auto it = attrs.find("locked_fraction"); it != attrs.end()) {
        b.locked_fraction = lp.number("locked_fraction", it->second);
    }
    return b;
}

}  // namespace

ScenarioParseError::ScenarioParseError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {
std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid scenario:";
    for (const auto& s : v) {
        out += "\n  ";
        out += s;
    }
    return out;
}
}  // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) {
            continue;
        }
        const LineParser lp{line_no};
        if (line.front() == '[') {
            if (line.back() != ']') {
                lp.fail("unterminated section header");
            }
            section = std::string{line.substr(1, line.size() - 2)};
            if (section != "scenario" && section != "radio" && section != "devices" && section != "pictures" &&
                section != "gatherings" && section != "behaviors") {
                lp.fail(fmt::format("unknown section [{}]", section));
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            lp.fail("expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            lp.fail("empty key");
        }

        if (section == "scenario") {
            parse_scenario_key(lp, s, key, value);
        } else if (section == "radio") {
            parse_radio_key(lp, s.radio, key, value);
        } else if (section == "devices") {
            s.devices.push_back(parse_device(lp, key, value));
        } else if (section == "pictures") {
            s.pictures.push_back(parse_picture(lp, key, value));
        } else if (section == "gatherings") {
            s.gatherings.push_back(parse_gathering(lp, value));
        } else if (section == "behaviors") {
            const DeviceId d{lp.id("device id", key)};
            if (!s.behaviors.emplace(d, parse_behavior(lp, value)).second) {
                lp.fail(fmt::format("second behavior for device {}", raw(d)));
            }
        } else {
            lp.fail("key outside of any section");
        }
    }
    return s;
}

Scenario load_scenario(std::string_view text) {
    Scenario s = parse_scenario(text);
    auto violations = validate_scenario(s);
    if (!violations.empty()) {
        throw ScenarioValidationError(std::move(violations));
    }
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace merkki
