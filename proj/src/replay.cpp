#include "merkki/replay.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "merkki/radio.hpp"

namespace merkki {
namespace {

struct Replayed {
    bool powered = false;
    std::optional<Position> position;
    std::optional<SimTime> searching_since;
    std::optional<SimTime> last_commit;
    std::optional<SimTime> committed_at;
    std::set<PictureId> owned;
};

std::optional<double> parse_double(const std::string* text) {
    if (!text) {
        return std::nullopt;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc{} || ptr != text->data() + text->size()) {
        return std::nullopt;
    }
    return v;
}

class Replayer {
public:
    Replayer(const EventLog& log, const Scenario& scenario) : log_(log), scenario_(scenario) {
        for (const auto& d : scenario.devices) {
            auto& r = state_[d.id];
            r.owned.insert(d.initial_pictures.begin(), d.initial_pictures.end());
        }
    }

    std::vector<std::string> run() {
        std::vector<bool> consumed(log_.size(), false);
        for (std::size_t i = 0; i < log_.size(); ++i) {
            const auto& rec = log_[i];
            const auto at = rec.time.to_string();
            if (i > 0 && rec.time < log_[i - 1].time) {
                report("records out of time order at t={}", at);
            }
            auto it = state_.find(rec.device);
            if (it == state_.end()) {
                if (unknown_reported_.insert(rec.device).second) {
                    report("unknown device {} at t={}", raw(rec.device), at);
                }
                continue;
            }
            auto& dev = it->second;
            switch (rec.kind) {
                case EventKind::PowerOn:
                    power_on(rec, dev);
                    break;
                case EventKind::PowerOff:
                    dev.powered = false;
                    dev.searching_since.reset();
                    break;
                case EventKind::SearchStart:
                    if (!dev.powered) {
                        report("device {} started searching while off at t={}", raw(rec.device), at);
                    }
                    dev.searching_since = rec.time;
                    break;
                case EventKind::SearchStop:
                    dev.searching_since.reset();
                    break;
                case EventKind::Exchange:
                    if (!consumed[i]) {
                        consumed[i] = true;
                        exchange(i, consumed);
                    }
                    break;
                default:
                    break;
            }
        }
        return std::move(violations_);
    }

private:
    template <typename... Args>
    void report(fmt::format_string<Args...> f, Args&&... args) {
        violations_.push_back(fmt::format(f, std::forward<Args>(args)...));
    }

    void power_on(const EventRecord& rec, Replayed& dev) {
        dev.powered = true;
        dev.searching_since.reset();
        dev.position.reset();
        auto x = parse_double(rec.field("x"));
        auto y = parse_double(rec.field("y"));
        if (x && y) {
            dev.position = Position{*x, *y};
        }
        if (const auto* list = rec.field("pictures")) {
            auto pictures = parse_picture_list(*list);
            if (!pictures) {
                report("device {} has a malformed picture list at t={}", raw(rec.device), rec.time.to_string());
                return;
            }
            std::set<PictureId> shown(pictures->begin(), pictures->end());
            for (auto p : dev.owned) {
                if (!shown.count(p)) {
                    report("collection of device {} lost picture {} by t={}", raw(rec.device), raw(p),
                           rec.time.to_string());
                }
            }
            for (auto p : shown) {
                if (!dev.owned.count(p)) {
                    report("device {} shows unexplained picture {} at t={}", raw(rec.device), raw(p),
                           rec.time.to_string());
                }
            }
        }
    }

    std::optional<std::size_t> find_mirror(std::size_t i, const ExchangePayload& p,
                                           const std::vector<bool>& consumed) const {
        const auto& rec = log_[i];
        for (std::size_t j = i + 1; j < log_.size() && log_[j].time == rec.time; ++j) {
            if (consumed[j] || log_[j].device != p.partner) {
                continue;
            }
            auto q = exchange_payload(log_[j]);
            if (q && q->partner == rec.device && q->sent == p.received && q->received == p.sent) {
                return j;
            }
        }
        return std::nullopt;
    }

    void check_side(DeviceId d, Replayed& dev, const ExchangePayload& p, const std::string& at) {
        const auto* pic = scenario_.find_picture(p.sent);
        if (!pic) {
            report("unknown picture {} sent by device {} at t={}", raw(p.sent), raw(d), at);
        } else if (!pic->tradable_at(log_time_)) {
            report("locked picture {} left device {} at t={}", raw(p.sent), raw(d), at);
        }
        if (!dev.owned.count(p.sent)) {
            report("device {} sent picture {} it did not own at t={}", raw(d), raw(p.sent), at);
        }
        if (p.duplicate != (dev.owned.count(p.received) != 0)) {
            report("device {} duplicate flag for picture {} is wrong at t={}", raw(d), raw(p.received), at);
        }
        if (!dev.powered || !dev.searching_since) {
            report("device {} traded without searching at t={}", raw(d), at);
        }
        if (dev.committed_at == log_time_) {
            report("device {} is in two exchanges at t={}", raw(d), at);
        }
    }

    void exchange(std::size_t i, std::vector<bool>& consumed) {
        const auto& rec = log_[i];
        const auto at = rec.time.to_string();
        log_time_ = rec.time;
        const auto p = *exchange_payload(rec);
        const auto mirror = find_mirror(i, p, consumed);
        if (!mirror) {
            report("unmatched EXCHANGE record for device {} at t={}", raw(rec.device), at);
            return;
        }
        consumed[*mirror] = true;
        const auto q = *exchange_payload(log_[*mirror]);

        auto it_b = state_.find(p.partner);
        if (it_b == state_.end()) {
            if (unknown_reported_.insert(p.partner).second) {
                report("unknown device {} at t={}", raw(p.partner), at);
            }
            return;
        }
        auto& a = state_.at(rec.device);
        auto& b = it_b->second;

        check_side(rec.device, a, p, at);
        check_side(p.partner, b, q, at);

        if (!a.position || !b.position ||
            !within_range(*a.position, *b.position, scenario_.radio.range_m)) {
            report("exchange locality violated at t={}: devices {} and {}", at, raw(rec.device), raw(p.partner));
        }

        if (a.searching_since && b.searching_since) {
            SimTime since = std::max(*a.searching_since, *b.searching_since);
            if (a.last_commit) since = std::max(since, *a.last_commit);
            if (b.last_commit) since = std::max(since, *b.last_commit);
            const SimTime overlap = rec.time - since;
            if (overlap < scenario_.radio.hold_duration) {
                report("hold-time violated at t={}: devices {} and {} overlapped {} s < {} s", at, raw(rec.device),
                       raw(p.partner), overlap.to_string(), scenario_.radio.hold_duration.to_string());
            }
        }

        a.owned.insert(p.received);
        b.owned.insert(q.received);
        a.last_commit = b.last_commit = rec.time;
        a.committed_at = b.committed_at = rec.time;
    }

    const EventLog& log_;
    const Scenario& scenario_;
    std::map<DeviceId, Replayed> state_;
    std::set<DeviceId> unknown_reported_;
    SimTime log_time_;
    std::vector<std::string> violations_;
};

}  // namespace

std::vector<std::string> replay_check(const EventLog& log, const Scenario& scenario) {
    return Replayer(log, scenario).run();
}

}  // namespace merkki
