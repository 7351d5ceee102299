#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "merkki/event_log.hpp"
#include "merkki/radio.hpp"
#include "merkki/scenario.hpp"

namespace merkki {

// Radio synchronisation step: rendezvous, battery and mode expiry all advance
// on this grid, counted from each gathering's start.
inline constexpr SimTime kTick = SimTime::from_ms(100);
// Every powered device logs its charge once per simulated minute.
inline constexpr SimTime kBatteryReportInterval = SimTime::from_ms(60000);

class ResourceLimitExceeded : public std::runtime_error {
public:
    explicit ResourceLimitExceeded(std::size_t cap);
};

DeviceConfig device_config_for(const Scenario& scenario);

// Static positions for the attendees of one gathering, quantised to the
// millimetre so that positions written to the log replay exactly.
std::map<DeviceId, Position> place_devices(const Placement& placement, const std::vector<DeviceId>& attendees,
                                           Rng& rng);

// Runs the scenario to completion. The result is a pure function of
// (scenario, effective seed); the scenario must be valid.
EventLog run(const Scenario& scenario, std::optional<std::uint64_t> seed_override = std::nullopt);

// MERKKI_SEED, if set to a valid unsigned integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace merkki
