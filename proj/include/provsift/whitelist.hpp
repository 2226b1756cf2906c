#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "provsift/entity.hpp"

namespace provsift {

// Socket whitelist: exact canonical socket keys plus destination-address
// CIDR prefixes. A socket matches when its full key is listed or its dst ip
// falls inside a listed prefix.
class SocketWhitelist {
  public:
    void add_exact(std::string socket_key);
    void add_prefix(std::string_view cidr);  // "a.b.c.d/len", throws std::invalid_argument
    void add_entry(std::string_view entry);  // auto-detects the form

    // One entry per line; blank lines and '#' comments ignored.
    static SocketWhitelist load_file(const std::filesystem::path& path);

    bool contains(const EntityId& sock) const;
    bool contains_key(std::string_view socket_key) const;

    bool empty() const { return exact_.empty() && prefixes_.empty(); }
    size_t size() const { return exact_.size() + prefixes_.size(); }
    std::vector<std::string> entries() const;  // for checkpointing, stable order

  private:
    std::unordered_set<std::string> exact_;
    std::vector<std::pair<uint32_t, int>> prefixes_;  // (network address, bits)
};

}  // namespace provsift
