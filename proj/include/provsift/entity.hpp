#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace provsift {

enum class EntityKind : uint8_t { File, Process, Socket };

const char* to_string(EntityKind k);
std::optional<EntityKind> entity_kind_from_string(std::string_view s);

// Canonical unique identifier for a system entity.
//   File    -> absolute path
//   Process -> name#pid
//   Socket  -> srcip:srcport>dstip:dstport
struct EntityId {
    EntityKind kind = EntityKind::File;
    std::string key;

    bool operator==(const EntityId&) const = default;
    auto operator<=>(const EntityId&) const = default;
};

struct EntityIdHash {
    size_t operator()(const EntityId& id) const noexcept;
};

// Raw descriptors as they appear in audit records, before canonicalization.
struct FileDescriptor {
    std::string path;
};

struct ProcessDescriptor {
    std::string name;
    int64_t pid = -1;
};

struct SocketDescriptor {
    std::string src_ip;
    int64_t src_port = -1;
    std::string dst_ip;
    int64_t dst_port = -1;
};

using RawDescriptor = std::variant<FileDescriptor, ProcessDescriptor, SocketDescriptor>;

// Builds the canonical EntityId for a descriptor. Pure and idempotent: equal
// descriptors always map to the same id. Throws std::invalid_argument naming
// the offending field (relative path, negative pid, port out of range,
// malformed address).
EntityId canonicalize(const RawDescriptor& d);

// Dotted-quad IPv4 to host-order integer; nullopt on malformed input.
std::optional<uint32_t> parse_ipv4(std::string_view s);

// Extracts the dst ip of a canonical socket key ("sip:sport>dip:dport").
std::optional<uint32_t> socket_key_dst_ip(std::string_view key);

}  // namespace provsift
