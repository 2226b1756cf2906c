#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "provsift/entity.hpp"

namespace provsift {

enum class Op : uint8_t { Recvfrom, Sendto, Read, Write, Execve, Clone };
inline constexpr size_t kOpCount = 6;

const char* to_string(Op op);
std::optional<Op> op_from_string(std::string_view s);

// The quintuple driving all analysis: subject, object, operation, time, data
// amount, plus the ingestion sequence number.
struct Event {
    uint64_t eid = 0;   // assigned by the ingest sequencer, 1-based
    EntityId subject;
    EntityId object;
    Op op = Op::Read;
    int64_t ti = 0;     // ns since epoch
    uint64_t bytes = 0; // data flow amount

    bool operator==(const Event&) const = default;
};

// One row of the suspicious-semantic transfer table. A row may cover more
// than one op (execve and clone share the process->process row).
struct TransferRule {
    uint8_t op_mask;
    EntityKind subject_kind;
    EntityKind object_kind;
    const char* description;

    bool covers(Op op) const { return (op_mask >> static_cast<uint8_t>(op)) & 1u; }
};

// The five transfer rows. Any (op, subject kind, object kind) outside this
// set never moves suspicion and is rejected at parse time.
std::span<const TransferRule, 5> transfer_rules();
const TransferRule* find_rule(Op op, EntityKind subject, EntityKind object);
bool kinds_match(Op op, EntityKind subject, EntityKind object);

// Kinds are determined by the op alone since every op sits in one rule row.
EntityKind expected_subject_kind(Op op);
EntityKind expected_object_kind(Op op);

struct OrientedEvent {
    EntityId subject;
    EntityId object;
    Op op;
};

// Assigns subject/object along the data or control flow direction for a raw
// syscall name (read/readv, write/writev, recvfrom, sendto, execve, clone).
// readv/writev fold into Read/Write. Returns nullopt for syscalls outside
// the supported set; the caller counts the skip. Throws std::invalid_argument
// when the target descriptor kind cannot satisfy the op's rule row.
std::optional<OrientedEvent> orient(std::string_view raw_op,
                                    const ProcessDescriptor& actor,
                                    const RawDescriptor& target);

}  // namespace provsift
