#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "provsift/event.hpp"

namespace provsift {

enum class LineStatus : uint8_t {
    Ok,                 // event populated (eid left to the caller's sequencer)
    Blank,              // empty or whitespace-only line, counted and skipped
    SkippedUnsupported, // record with an op outside the supported set
    SyntaxError,        // not a well-formed record; error_offset is the byte position
    SemanticError,      // well-formed but invalid (kind mismatch, bad field value)
};

struct ParsedLine {
    LineStatus status = LineStatus::Blank;
    Event event;
    std::string error;
    size_t error_offset = 0;
};

// Parses one record of the canonical line format:
//   {"ts":<int>,"op":"<op>","subj":{...},"obj":{...},"bytes":<int>}
// where subj/obj carry "kind" plus the kind-specific fields
// (path | name,pid | sip,sport,dip,dport). Field order is free-form JSON;
// the canonical order produced by serialize_event takes a fast path.
ParsedLine parse_event_line(std::string_view line);

// Canonical single-line form, stable field order. The eid is not part of the
// wire format.
std::string serialize_event(const Event& e);
void serialize_event_to(const Event& e, std::string& out);

// Running tallies for a stream of parse results.
struct ParseCounters {
    uint64_t ok = 0;
    uint64_t blank = 0;
    uint64_t skipped_unsupported = 0;
    uint64_t syntax_errors = 0;
    uint64_t semantic_errors = 0;

    void add(LineStatus s);
    uint64_t total() const { return ok + blank + skipped_unsupported + syntax_errors + semantic_errors; }
};

}  // namespace provsift
