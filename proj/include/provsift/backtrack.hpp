#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "provsift/event.hpp"

namespace provsift {

// Backward causality closure from the POI: starting at poi, repeatedly add
// every event e' with e'.object == e.subject and e'.ti < e.ti for some
// included e. Pure reference implementation used as the evaluation baseline.
// Returns the included eids, sorted.
std::vector<uint64_t> backtrack_closure(std::span<const Event> log, const Event& poi);

}  // namespace provsift
