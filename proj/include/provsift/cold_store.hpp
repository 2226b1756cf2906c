#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "provsift/entity.hpp"

namespace provsift {

// Disk tier for low-modification RET entries. Entries are appended to a
// single data file as per-entity segments; an append-only index file maps
// each entity to its latest segment. Within a version, a stored eid list
// reads back byte-identical.
class ColdStore {
  public:
    ColdStore() = default;  // detached: store/load unavailable
    explicit ColdStore(std::filesystem::path dir);

    bool attached() const { return !dir_.empty(); }

    void store(const EntityId& id, std::span<const uint64_t> eids);  // throws StorageError
    std::optional<std::vector<uint64_t>> load(const EntityId& id) const;
    bool contains(const EntityId& id) const { return index_.count(id) > 0; }

    size_t entry_count() const { return index_.size(); }
    uint64_t data_bytes() const { return data_offset_; }
    std::vector<EntityId> keys() const;

  private:
    struct Segment {
        uint64_t offset = 0;
        uint64_t count = 0;
    };

    std::filesystem::path dir_;
    std::filesystem::path data_path_;
    std::filesystem::path index_path_;
    std::ofstream data_out_;
    std::ofstream index_out_;
    uint64_t data_offset_ = 0;
    std::unordered_map<EntityId, Segment, EntityIdHash> index_;
};

}  // namespace provsift
