#pragma once

#include <string>
#include <vector>

#include "merkki/event_log.hpp"
#include "merkki/scenario.hpp"

namespace merkki {

// Replays `log` against `scenario` and reports every violated invariant:
// exchange locality, hold-time soundness, mirror-record pairing, matching
// validity, sender possession and duplicate flags (collection monotonicity),
// locked-picture containment, time ordering and unknown ids. Empty iff clean.
std::vector<std::string> replay_check(const EventLog& log, const Scenario& scenario);

}  // namespace merkki
