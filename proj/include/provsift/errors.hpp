#pragma once

#include <stdexcept>

namespace provsift {

// Event arrived with ti decreasing beyond the configured slack.
struct SequencingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Investigation target never received suspicious semantics.
struct EntityNotSuspiciousError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// POI event is not part of its object's related-event snapshot.
struct PoiNotReachableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cold tier or checkpoint write failed; ingestion must not continue silently.
struct StorageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace provsift
