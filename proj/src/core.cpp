#include "merkki/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace merkki {

std::string to_string(DeviceId id) { return std::to_string(raw(id)); }
std::string to_string(PictureId id) { return std::to_string(raw(id)); }

SimTime SimTime::from_seconds(double seconds) {
    return SimTime{static_cast<std::int64_t>(std::llround(seconds * 1000.0))};
}

std::string SimTime::to_string() const {
    const auto whole = ms_ / 1000;
    const auto frac = ms_ % 1000;
    if (ms_ < 0) {
        return fmt::format("-{}.{:03d}", -whole, -frac);
    }
    return fmt::format("{}.{:03d}", whole, frac);
}

std::optional<SimTime> SimTime::parse(std::string_view text) {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0 || text.size() - dot - 1 != 3) {
        return std::nullopt;
    }
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (whole.size() > 1 && whole.front() == '0') {
        return std::nullopt;
    }
    auto all_digits = [](std::string_view s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!all_digits(whole) || !all_digits(frac)) {
        return std::nullopt;
    }
    std::int64_t w = 0;
    std::int64_t f = 0;
    if (std::from_chars(whole.data(), whole.data() + whole.size(), w).ec != std::errc{}) {
        return std::nullopt;
    }
    std::from_chars(frac.data(), frac.data() + frac.size(), f);
    return SimTime{w * 1000 + f};
}

PictureCollection::PictureCollection(const std::vector<PictureId>& initial) {
    for (auto p : initial) {
        add(p);
    }
}

bool PictureCollection::contains(PictureId p) const {
    return std::find(owned_.begin(), owned_.end(), p) != owned_.end();
}

std::optional<PictureId> PictureCollection::selected() const {
    if (owned_.empty()) {
        return std::nullopt;
    }
    return owned_[selected_];
}

void PictureCollection::select_next() {
    if (!owned_.empty()) {
        selected_ = (selected_ + 1) % owned_.size();
    }
}

bool PictureCollection::select(PictureId p) {
    auto it = std::find(owned_.begin(), owned_.end(), p);
    if (it == owned_.end()) {
        return false;
    }
    selected_ = static_cast<std::size_t>(it - owned_.begin());
    return true;
}

bool PictureCollection::add(PictureId p) {
    if (contains(p)) {
        return false;
    }
    owned_.push_back(p);
    return true;
}

bool GroupConfig::same_group(DeviceId a, DeviceId b) const {
    auto ia = group.find(a);
    auto ib = group.find(b);
    return ia != group.end() && ib != group.end() && ia->second == ib->second;
}

std::vector<std::string> RadioParams::violations() const {
    std::vector<std::string> out;
    if (!(range_m > 0.0) || !std::isfinite(range_m)) {
        out.push_back(fmt::format("radio range_m must be > 0 (got {})", range_m));
    }
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
        out.push_back(fmt::format("radio loss_prob must be in [0, 1] (got {})", loss_prob));
    }
    if (hold_duration <= SimTime{}) {
        out.push_back("radio hold_duration_s must be > 0");
    }
    if (latency < SimTime{}) {
        out.push_back("radio latency_s must be >= 0");
    }
    if (beat_window <= SimTime{}) {
        out.push_back("radio beat_window_s must be > 0");
    }
    return out;
}

}  // namespace merkki
