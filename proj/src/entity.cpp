#include "provsift/entity.hpp"

#include <charconv>
#include <stdexcept>

namespace provsift {

const char* to_string(EntityKind k) {
    switch (k) {
        case EntityKind::File: return "file";
        case EntityKind::Process: return "process";
        case EntityKind::Socket: return "socket";
    }
    return "?";
}

std::optional<EntityKind> entity_kind_from_string(std::string_view s) {
    if (s == "file") return EntityKind::File;
    if (s == "process") return EntityKind::Process;
    if (s == "socket") return EntityKind::Socket;
    return std::nullopt;
}

size_t EntityIdHash::operator()(const EntityId& id) const noexcept {
    size_t h = std::hash<std::string>{}(id.key);
    return h ^ (static_cast<size_t>(id.kind) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::optional<uint32_t> parse_ipv4(std::string_view s) {
    uint32_t out = 0;
    size_t pos = 0;
    for (int octet = 0; octet < 4; ++octet) {
        if (pos >= s.size()) return std::nullopt;
        uint32_t value = 0;
        const char* begin = s.data() + pos;
        const char* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr == begin || value > 255) return std::nullopt;
        // reject leading zeros like "01" to keep the canonical form unique
        if (ptr - begin > 1 && *begin == '0') return std::nullopt;
        out = (out << 8) | value;
        pos = static_cast<size_t>(ptr - s.data());
        if (octet < 3) {
            if (pos >= s.size() || s[pos] != '.') return std::nullopt;
            ++pos;
        }
    }
    if (pos != s.size()) return std::nullopt;
    return out;
}

std::optional<uint32_t> socket_key_dst_ip(std::string_view key) {
    size_t gt = key.find('>');
    if (gt == std::string_view::npos) return std::nullopt;
    std::string_view dst = key.substr(gt + 1);
    size_t colon = dst.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    return parse_ipv4(dst.substr(0, colon));
}

namespace {

void require_port(int64_t port, const char* field) {
    if (port < 0 || port > 65535) {
        throw std::invalid_argument(std::string("socket ") + field +
                                    " out of range [0, 65535]: " + std::to_string(port));
    }
}

void require_ip(const std::string& ip, const char* field) {
    if (!parse_ipv4(ip)) {
        throw std::invalid_argument(std::string("socket ") + field + " is not a valid IPv4 address: '" + ip + "'");
    }
}

}  // namespace

EntityId canonicalize(const RawDescriptor& d) {
    if (const auto* f = std::get_if<FileDescriptor>(&d)) {
        if (f->path.empty() || f->path.front() != '/') {
            throw std::invalid_argument("file path must be absolute: '" + f->path + "'");
        }
        return {EntityKind::File, f->path};
    }
    if (const auto* p = std::get_if<ProcessDescriptor>(&d)) {
        if (p->name.empty()) {
            throw std::invalid_argument("process name must be non-empty");
        }
        if (p->pid < 0) {
            throw std::invalid_argument("process pid must be non-negative: " + std::to_string(p->pid));
        }
        return {EntityKind::Process, p->name + "#" + std::to_string(p->pid)};
    }
    const auto& s = std::get<SocketDescriptor>(d);
    require_ip(s.src_ip, "sip");
    require_port(s.src_port, "sport");
    require_ip(s.dst_ip, "dip");
    require_port(s.dst_port, "dport");
    std::string key;
    key.reserve(s.src_ip.size() + s.dst_ip.size() + 14);
    key += s.src_ip;
    key += ':';
    key += std::to_string(s.src_port);
    key += '>';
    key += s.dst_ip;
    key += ':';
    key += std::to_string(s.dst_port);
    return {EntityKind::Socket, std::move(key)};
}

}  // namespace provsift
