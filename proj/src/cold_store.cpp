#include "provsift/cold_store.hpp"

#include <algorithm>

#include "provsift/errors.hpp"

namespace provsift {

namespace {

// little-endian fixed-width records; the cold layout is versioned by the
// state-dir manifest, not self-describing

void put_u8(std::ofstream& out, uint8_t v) { out.put(static_cast<char>(v)); }

void put_u32(std::ofstream& out, uint32_t v) {
    char buf[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                   static_cast<char>(v >> 24)};
    out.write(buf, 4);
}

void put_u64(std::ofstream& out, uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
    out.write(buf, 8);
}

bool get_u8(std::istream& in, uint8_t& v) {
    int c = in.get();
    if (c == EOF) return false;
    v = static_cast<uint8_t>(c);
    return true;
}

bool get_u32(std::istream& in, uint32_t& v) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) return false;
    v = static_cast<uint32_t>(buf[0]) | (static_cast<uint32_t>(buf[1]) << 8) |
        (static_cast<uint32_t>(buf[2]) << 16) | (static_cast<uint32_t>(buf[3]) << 24);
    return true;
}

bool get_u64(std::istream& in, uint64_t& v) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
    return true;
}

}  // namespace

ColdStore::ColdStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    data_path_ = dir_ / "cold.dat";
    index_path_ = dir_ / "cold.idx";

    // replay the index; the last record per key wins
    if (std::filesystem::exists(index_path_)) {
        std::ifstream idx(index_path_, std::ios::binary);
        while (idx) {
            uint8_t kind = 0;
            uint32_t key_len = 0;
            if (!get_u8(idx, kind)) break;
            if (!get_u32(idx, key_len)) throw StorageError("truncated cold index: " + index_path_.string());
            std::string key(key_len, '\0');
            if (!idx.read(key.data(), key_len)) throw StorageError("truncated cold index: " + index_path_.string());
            Segment seg;
            if (!get_u64(idx, seg.offset) || !get_u64(idx, seg.count)) {
                throw StorageError("truncated cold index: " + index_path_.string());
            }
            index_[EntityId{static_cast<EntityKind>(kind), std::move(key)}] = seg;
        }
    }
    if (std::filesystem::exists(data_path_)) {
        data_offset_ = std::filesystem::file_size(data_path_);
    }
    data_out_.open(data_path_, std::ios::binary | std::ios::app);
    index_out_.open(index_path_, std::ios::binary | std::ios::app);
    if (!data_out_ || !index_out_) {
        throw StorageError("cannot open cold tier files in " + dir_.string());
    }
}

void ColdStore::store(const EntityId& id, std::span<const uint64_t> eids) {
    if (!attached()) throw StorageError("cold store is not attached to a state directory");
    Segment seg;
    seg.offset = data_offset_;
    seg.count = eids.size();

    put_u8(data_out_, static_cast<uint8_t>(id.kind));
    put_u32(data_out_, static_cast<uint32_t>(id.key.size()));
    data_out_.write(id.key.data(), static_cast<std::streamsize>(id.key.size()));
    put_u64(data_out_, seg.count);
    for (uint64_t eid : eids) put_u64(data_out_, eid);
    data_out_.flush();
    if (!data_out_) throw StorageError("cold tier data write failed: " + data_path_.string());
    data_offset_ += 1 + 4 + id.key.size() + 8 + 8 * eids.size();

    put_u8(index_out_, static_cast<uint8_t>(id.kind));
    put_u32(index_out_, static_cast<uint32_t>(id.key.size()));
    index_out_.write(id.key.data(), static_cast<std::streamsize>(id.key.size()));
    put_u64(index_out_, seg.offset);
    put_u64(index_out_, seg.count);
    index_out_.flush();
    if (!index_out_) throw StorageError("cold tier index write failed: " + index_path_.string());

    index_[id] = seg;
}

std::optional<std::vector<uint64_t>> ColdStore::load(const EntityId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    std::ifstream in(data_path_, std::ios::binary);
    if (!in) throw StorageError("cannot open cold tier data: " + data_path_.string());
    in.seekg(static_cast<std::streamoff>(it->second.offset));

    uint8_t kind = 0;
    uint32_t key_len = 0;
    if (!get_u8(in, kind) || !get_u32(in, key_len)) {
        throw StorageError("corrupt cold segment for " + id.key);
    }
    std::string key(key_len, '\0');
    uint64_t count = 0;
    if (!in.read(key.data(), key_len) || !get_u64(in, count)) {
        throw StorageError("corrupt cold segment for " + id.key);
    }
    if (static_cast<EntityKind>(kind) != id.kind || key != id.key || count != it->second.count) {
        throw StorageError("cold segment mismatch for " + id.key);
    }
    std::vector<uint64_t> eids(count);
    for (uint64_t& eid : eids) {
        if (!get_u64(in, eid)) throw StorageError("corrupt cold segment for " + id.key);
    }
    return eids;
}

std::vector<EntityId> ColdStore::keys() const {
    std::vector<EntityId> out;
    out.reserve(index_.size());
    for (const auto& [id, seg] : index_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace provsift
