#include "provsift/event.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace provsift {

namespace {

constexpr uint8_t mask(Op op) { return static_cast<uint8_t>(1u << static_cast<uint8_t>(op)); }

constexpr std::array<TransferRule, 5> kRules = {{
    {mask(Op::Recvfrom), EntityKind::Socket, EntityKind::Process,
     "a process receives data from the network"},
    {mask(Op::Sendto), EntityKind::Process, EntityKind::Socket,
     "a suspicious process sends data to the network"},
    {mask(Op::Read), EntityKind::File, EntityKind::Process,
     "a process reads a suspicious file"},
    {mask(Op::Write), EntityKind::Process, EntityKind::File,
     "a suspicious process writes a file"},
    {static_cast<uint8_t>(mask(Op::Execve) | mask(Op::Clone)), EntityKind::Process, EntityKind::Process,
     "a process is started by a suspicious process"},
}};

}  // namespace

const char* to_string(Op op) {
    switch (op) {
        case Op::Recvfrom: return "recvfrom";
        case Op::Sendto: return "sendto";
        case Op::Read: return "read";
        case Op::Write: return "write";
        case Op::Execve: return "execve";
        case Op::Clone: return "clone";
    }
    return "?";
}

std::optional<Op> op_from_string(std::string_view s) {
    if (s == "recvfrom") return Op::Recvfrom;
    if (s == "sendto") return Op::Sendto;
    if (s == "read") return Op::Read;
    if (s == "write") return Op::Write;
    if (s == "execve") return Op::Execve;
    if (s == "clone") return Op::Clone;
    return std::nullopt;
}

std::span<const TransferRule, 5> transfer_rules() { return kRules; }

const TransferRule* find_rule(Op op, EntityKind subject, EntityKind object) {
    for (const auto& rule : kRules) {
        if (rule.covers(op) && rule.subject_kind == subject && rule.object_kind == object) {
            return &rule;
        }
    }
    return nullptr;
}

bool kinds_match(Op op, EntityKind subject, EntityKind object) {
    return find_rule(op, subject, object) != nullptr;
}

EntityKind expected_subject_kind(Op op) {
    for (const auto& rule : kRules) {
        if (rule.covers(op)) return rule.subject_kind;
    }
    throw std::logic_error("op without a rule row");
}

EntityKind expected_object_kind(Op op) {
    for (const auto& rule : kRules) {
        if (rule.covers(op)) return rule.object_kind;
    }
    throw std::logic_error("op without a rule row");
}

std::optional<OrientedEvent> orient(std::string_view raw_op,
                                    const ProcessDescriptor& actor,
                                    const RawDescriptor& target) {
    Op op;
    bool target_is_subject;
    if (raw_op == "read" || raw_op == "readv") {
        op = Op::Read;
        target_is_subject = true;   // data flows file -> process
    } else if (raw_op == "write" || raw_op == "writev") {
        op = Op::Write;
        target_is_subject = false;  // data flows process -> file
    } else if (raw_op == "recvfrom") {
        op = Op::Recvfrom;
        target_is_subject = true;
    } else if (raw_op == "sendto") {
        op = Op::Sendto;
        target_is_subject = false;
    } else if (raw_op == "execve") {
        op = Op::Execve;
        target_is_subject = false;  // control flows parent -> child
    } else if (raw_op == "clone") {
        op = Op::Clone;
        target_is_subject = false;
    } else {
        return std::nullopt;
    }

    EntityId actor_id = canonicalize(actor);
    EntityId target_id = canonicalize(target);
    OrientedEvent oriented;
    oriented.op = op;
    if (target_is_subject) {
        oriented.subject = std::move(target_id);
        oriented.object = std::move(actor_id);
    } else {
        oriented.subject = std::move(actor_id);
        oriented.object = std::move(target_id);
    }
    if (!kinds_match(op, oriented.subject.kind, oriented.object.kind)) {
        throw std::invalid_argument(std::string("target kind ") +
                                    to_string(target_is_subject ? oriented.subject.kind
                                                                : oriented.object.kind) +
                                    " does not fit op '" + std::string(raw_op) + "'");
    }
    return oriented;
}

}  // namespace provsift
