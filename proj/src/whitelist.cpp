#include "provsift/whitelist.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace provsift {

void SocketWhitelist::add_exact(std::string socket_key) {
    exact_.insert(std::move(socket_key));
}

void SocketWhitelist::add_prefix(std::string_view cidr) {
    size_t slash = cidr.find('/');
    if (slash == std::string_view::npos) {
        throw std::invalid_argument("whitelist prefix missing '/': '" + std::string(cidr) + "'");
    }
    auto addr = parse_ipv4(cidr.substr(0, slash));
    if (!addr) {
        throw std::invalid_argument("whitelist prefix has a malformed address: '" + std::string(cidr) + "'");
    }
    int bits = -1;
    std::string_view len = cidr.substr(slash + 1);
    auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), bits);
    if (ec != std::errc{} || ptr != len.data() + len.size() || bits < 0 || bits > 32) {
        throw std::invalid_argument("whitelist prefix length must be 0..32: '" + std::string(cidr) + "'");
    }
    uint32_t net_mask = bits == 0 ? 0u : (~0u << (32 - bits));
    prefixes_.emplace_back(*addr & net_mask, bits);
}

void SocketWhitelist::add_entry(std::string_view entry) {
    if (entry.find('/') != std::string_view::npos) {
        add_prefix(entry);
    } else {
        add_exact(std::string(entry));
    }
}

SocketWhitelist SocketWhitelist::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open whitelist file: " + path.string());
    }
    SocketWhitelist wl;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        try {
            wl.add_entry(std::string_view(line).substr(start));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return wl;
}

bool SocketWhitelist::contains(const EntityId& sock) const {
    return sock.kind == EntityKind::Socket && contains_key(sock.key);
}

bool SocketWhitelist::contains_key(std::string_view socket_key) const {
    if (!exact_.empty() && exact_.count(std::string(socket_key)) > 0) return true;
    if (prefixes_.empty()) return false;
    auto dst = socket_key_dst_ip(socket_key);
    if (!dst) return false;
    for (auto [net, bits] : prefixes_) {
        uint32_t m = bits == 0 ? 0u : (~0u << (32 - bits));
        if ((*dst & m) == net) return true;
    }
    return false;
}

std::vector<std::string> SocketWhitelist::entries() const {
    std::vector<std::string> out(exact_.begin(), exact_.end());
    std::sort(out.begin(), out.end());
    for (auto [net, bits] : prefixes_) {
        std::string addr = std::to_string(net >> 24) + "." + std::to_string((net >> 16) & 0xff) + "." +
                           std::to_string((net >> 8) & 0xff) + "." + std::to_string(net & 0xff);
        out.push_back(addr + "/" + std::to_string(bits));
    }
    return out;
}

}  // namespace provsift
