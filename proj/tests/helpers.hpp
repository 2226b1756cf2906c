#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "provsift/engine.hpp"
#include "provsift/event.hpp"
#include "provsift/graph.hpp"

namespace provsift::testing {

inline EntityId file_id(std::string path) { return canonicalize(FileDescriptor{std::move(path)}); }
inline EntityId proc_id(std::string name, int64_t pid) {
    return canonicalize(ProcessDescriptor{std::move(name), pid});
}
inline EntityId sock_id(std::string sip, int64_t sport, std::string dip, int64_t dport) {
    return canonicalize(SocketDescriptor{std::move(sip), sport, std::move(dip), dport});
}

inline Event make_event(Op op, EntityId subject, EntityId object, int64_t ti, uint64_t bytes,
                        uint64_t eid = 0) {
    Event e;
    e.eid = eid;
    e.op = op;
    e.subject = std::move(subject);
    e.object = std::move(object);
    e.ti = ti;
    e.bytes = bytes;
    return e;
}

// The worked five-event example: socket -> A, B -> A (no transfer), A -> C,
// C -> D, C -> A.
struct FigStream {
    EntityId sock = sock_id("203.0.113.50", 4444, "172.16.0.2", 443);
    EntityId proc_a = proc_id("a", 100);
    EntityId file_b = file_id("/data/b");
    EntityId file_c = file_id("/data/c");
    EntityId proc_d = proc_id("d", 101);

    std::vector<Event> events() const {
        return {
            make_event(Op::Recvfrom, sock, proc_a, 1'000'000'000, 526),
            make_event(Op::Read, file_b, proc_a, 2'000'000'000, 100),
            make_event(Op::Write, proc_a, file_c, 3'000'000'000, 526),
            make_event(Op::Read, file_c, proc_d, 4'000'000'000, 526),
            make_event(Op::Read, file_c, proc_a, 5'000'000'000, 526),
        };
    }
};

// Unique scratch directory, removed on destruction.
class ScopedTempDir {
  public:
    explicit ScopedTempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("provsift_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~ScopedTempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Brute-force reference of the transfer rule: plain ordered containers,
// fresh copies everywhere, no tiering, no interning. Kept deliberately
// independent of the engine implementation.
class RefEngine {
  public:
    explicit RefEngine(const SocketWhitelist* whitelist) : whitelist_(whitelist) {}

    struct Key {
        int kind;
        std::string key;
        auto operator<=>(const Key&) const = default;
    };
    static Key key_of(const EntityId& id) { return {static_cast<int>(id.kind), id.key}; }

    // returns the assigned eid
    uint64_t process(const Event& e) {
        uint64_t eid = next_eid_++;
        if (e.subject == e.object) return eid;
        bool subject_suspicious;
        if (e.subject.kind == EntityKind::Socket) {
            subject_suspicious = !whitelist_->contains(e.subject);
        } else {
            subject_suspicious = sel_.count(key_of(e.subject)) > 0;
        }
        if (!subject_suspicious) return eid;

        std::vector<uint64_t> related;
        auto it = ret_.find(key_of(e.subject));
        if (it != ret_.end()) related = it->second;
        related.push_back(eid);
        ret_[key_of(e.object)] = related;
        if (e.object.kind != EntityKind::Socket) {
            sel_.insert(key_of(e.object));
        }
        return eid;
    }

    const std::set<Key>& sel() const { return sel_; }
    const std::map<Key, std::vector<uint64_t>>& ret() const { return ret_; }

  private:
    const SocketWhitelist* whitelist_;
    std::set<Key> sel_;
    std::map<Key, std::vector<uint64_t>> ret_;
    uint64_t next_eid_ = 1;
};

// Backward time-respecting reachability over graph edges by naive fixpoint.
inline std::set<size_t> ref_backward_reachable(const SemanticGraph& g) {
    std::set<size_t> included{g.poi_index};
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < g.edges.size(); ++i) {
            if (included.count(i)) continue;
            for (size_t j : included) {
                if (g.edges[i].object == g.edges[j].subject && g.edges[i].ti < g.edges[j].ti) {
                    included.insert(i);
                    changed = true;
                    break;
                }
            }
        }
    }
    return included;
}

// Independent CIDR check: textual binary expansion instead of mask math.
inline std::string ref_ip_bits(const std::string& dotted) {
    std::string bits;
    size_t start = 0;
    for (int i = 0; i < 4; ++i) {
        size_t dot = dotted.find('.', start);
        std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        int value = std::stoi(part);
        for (int b = 7; b >= 0; --b) bits += ((value >> b) & 1) ? '1' : '0';
        start = dot + 1;
    }
    return bits;
}

inline bool ref_cidr_match(const std::string& ip, const std::string& cidr) {
    size_t slash = cidr.find('/');
    int len = std::stoi(cidr.substr(slash + 1));
    return ref_ip_bits(ip).substr(0, len) == ref_ip_bits(cidr.substr(0, slash)).substr(0, len);
}

// Random valid-kind event streams for oracle equivalence runs.
struct RandomStream {
    std::vector<Event> events;
    SocketWhitelist whitelist;
};

inline RandomStream random_stream(std::mt19937_64& rng, size_t max_events) {
    auto below = [&rng](uint64_t n) { return n == 0 ? 0 : rng() % n; };

    std::vector<EntityId> files, procs, socks;
    const size_t n_files = 2 + below(6), n_procs = 2 + below(6), n_socks = 1 + below(4);
    for (size_t i = 0; i < n_files; ++i) files.push_back(file_id("/f/" + std::to_string(i)));
    for (size_t i = 0; i < n_procs; ++i) {
        procs.push_back(proc_id("p" + std::to_string(i), static_cast<int64_t>(100 + i)));
    }
    for (size_t i = 0; i < n_socks; ++i) {
        socks.push_back(sock_id("10.0.0." + std::to_string(i + 1), 1000 + static_cast<int64_t>(i),
                                std::to_string(10 + below(4) * 60) + ".1.2." + std::to_string(i + 1),
                                2000 + static_cast<int64_t>(i)));
    }

    RandomStream out;
    if (below(2) == 0) out.whitelist.add_prefix("10.0.0.0/8");
    if (below(3) == 0) out.whitelist.add_exact(socks.front().key);

    int64_t ti = 1'000'000'000;
    const size_t count = 1 + below(max_events);
    for (size_t i = 0; i < count; ++i) {
        if (below(3) != 0) ti += static_cast<int64_t>(below(3'000'000'000));  // ties allowed
        Event e;
        switch (below(6)) {
            case 0: e = make_event(Op::Recvfrom, socks[below(socks.size())], procs[below(procs.size())], ti, below(100'000)); break;
            case 1: e = make_event(Op::Sendto, procs[below(procs.size())], socks[below(socks.size())], ti, below(100'000)); break;
            case 2: e = make_event(Op::Read, files[below(files.size())], procs[below(procs.size())], ti, below(100'000)); break;
            case 3: e = make_event(Op::Write, procs[below(procs.size())], files[below(files.size())], ti, below(100'000)); break;
            case 4: e = make_event(Op::Execve, procs[below(procs.size())], procs[below(procs.size())], ti, 0); break;
            default: e = make_event(Op::Clone, procs[below(procs.size())], procs[below(procs.size())], ti, 0); break;
        }
        out.events.push_back(std::move(e));
    }
    return out;
}

}  // namespace provsift::testing
