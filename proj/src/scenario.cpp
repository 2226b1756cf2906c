#include "provsift/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "provsift/backtrack.hpp"

namespace provsift {

using json = nlohmann::ordered_json;

namespace {

constexpr int64_t kStartNs = 1'722'000'000'000'000'000;  // mid-2024, ns

EntityId file_id(std::string path) { return canonicalize(FileDescriptor{std::move(path)}); }
EntityId proc_id(std::string name, int64_t pid) { return canonicalize(ProcessDescriptor{std::move(name), pid}); }
EntityId sock_id(std::string sip, int64_t sport, std::string dip, int64_t dport) {
    return canonicalize(SocketDescriptor{std::move(sip), sport, std::move(dip), dport});
}

Event mk(Op op, EntityId subject, EntityId object, int64_t ti, uint64_t bytes) {
    Event e;
    e.op = op;
    e.subject = std::move(subject);
    e.object = std::move(object);
    e.ti = ti;
    e.bytes = bytes;
    return e;
}

uint64_t below(std::mt19937_64& rng, uint64_t n) { return n == 0 ? 0 : rng() % n; }

struct TaggedEvent {
    Event event;
    bool critical = false;
};

// --- dataleak template -----------------------------------------------------
//
// Ingress: a web process pulls a toolkit from an unlisted address, churns
// scratch files through a scan helper (junk mesh), then drops a script in
// chunks. A shell picks the script up, collects sensitive files into a
// hidden staging file with readback-interleaved write bursts, hands it to a
// packer, and ships the packed file out. The final sendto is the POI.
// Ground truth is the data-flow spine; scaffolding clones and all
// mesh/decoy noise stay out.
//
// The mesh sits between the ingress read and the dropper writes, so its
// lineage rides into the POI snapshot while its tree paths run several
// fan-in levels deep before touching the spine.
std::vector<TaggedEvent> dataleak_template(const ScenarioSpec& spec, std::mt19937_64& rng,
                                           int64_t start) {
    std::vector<TaggedEvent> out;
    auto emit = [&out](Event e, bool critical) { out.push_back({std::move(e), critical}); };

    const EntityId ingress_sock = sock_id("172.16.0.9", 49152, "203.0.113.7", 443);
    const EntityId web = proc_id("httpd", 1203);
    const EntityId dropper = file_id("/var/www/tmp/.fetch.sh");
    const EntityId shell = proc_id("sh", 1490);
    const EntityId scanner = proc_id("find", 1512);
    const EntityId staging = file_id("/tmp/.idx.db");
    const EntityId packer = proc_id("tar", 1544);
    const EntityId packed = file_id("/tmp/.idx.db.xz");
    const EntityId exfil_sock = sock_id("172.16.0.9", 49410, "203.0.113.9", 8443);

    int64_t t = start;
    const int64_t sec = 1'000'000'000;

    // upstream decoy: an unrelated suspicious process that pokes the ingress
    // address before the attack; its lineage gets stitched into the SSG
    if (spec.decoy_cycles > 0) {
        const EntityId decoy_sock = sock_id("172.16.0.31", 50231, "203.0.113.44", 80);
        const EntityId decoy_proc = proc_id("curl", 1777);
        const EntityId decoy_file = file_id("/tmp/.cache_d");
        emit(mk(Op::Recvfrom, decoy_sock, decoy_proc, t, 700 + below(rng, 4000)), false);
        for (size_t i = 0; i < spec.decoy_cycles; ++i) {
            t += 7 * sec;
            emit(mk(Op::Write, decoy_proc, decoy_file, t, 300 + below(rng, 2000)), false);
            t += 6 * sec;
            emit(mk(Op::Read, decoy_file, decoy_proc, t, 300 + below(rng, 2000)), false);
        }
        t += 9 * sec;
        emit(mk(Op::Sendto, decoy_proc, ingress_sock, t, 200 + below(rng, 900)), false);
        t += 30 * sec;
    }

    // ingress
    const uint64_t dropper_bytes = 430'000 + below(rng, 60'000);
    emit(mk(Op::Recvfrom, ingress_sock, web, t, dropper_bytes), true);

    // junk mesh: the web process seeds a scan helper which ping-pongs its
    // own scratch files; the web process reads the last one back, so the
    // whole mesh lands in the lineage ahead of the dropper writes
    if (spec.junk_cycle_rounds > 0 && spec.junk_cycle_files > 0) {
        std::vector<EntityId> junk;
        for (size_t k = 0; k < spec.junk_cycle_files; ++k) {
            junk.push_back(file_id("/tmp/.scan" + std::to_string(k) + ".tmp"));
        }
        auto gap = [&rng, sec]() { return 11 * sec + static_cast<int64_t>(below(rng, 5)) * sec; };
        t += 20 * sec;
        emit(mk(Op::Write, web, junk.front(), t, 200 + below(rng, 1200)), false);
        t += gap();
        emit(mk(Op::Read, junk.front(), scanner, t, 200 + below(rng, 1200)), false);
        for (size_t round = 0; round < spec.junk_cycle_rounds; ++round) {
            for (size_t k = 0; k < spec.junk_cycle_files; ++k) {
                t += gap();
                emit(mk(Op::Write, scanner, junk[k], t, 200 + below(rng, 3600)), false);
                t += gap();
                emit(mk(Op::Read, junk[k], scanner, t, 200 + below(rng, 3600)), false);
            }
        }
        t += gap();
        emit(mk(Op::Read, junk.back(), web, t, 400 + below(rng, 1200)), false);
    }

    // chunked drop: gaps above the compaction window keep the chunks as
    // separate edges, which splits shares below the dropper-read node
    t += 25 * sec;
    const size_t chunks = 3;
    for (size_t i = 0; i < chunks; ++i) {
        emit(mk(Op::Write, web, dropper, t, dropper_bytes / chunks), true);
        t += 12 * sec;
    }
    if (spec.scaffold_clones) {
        emit(mk(Op::Clone, web, shell, t, 0), false);
        t += 3 * sec;
    }
    emit(mk(Op::Read, dropper, shell, t, dropper_bytes), true);

    // collection: reads of benign sensitive files never transfer suspicion,
    // but they tie the backtracking closure into the benign graph
    const auto sensitive = sensitive_files();
    uint64_t collected = 0;
    for (size_t i = 0; i < sensitive.size(); ++i) {
        t += 5 * sec;
        uint64_t bytes = 150'000 + below(rng, 120'000);
        collected += bytes;
        emit(mk(Op::Read, sensitive[i], shell, t, bytes), false);
    }

    // staging bursts: writes interleaved with readbacks (sub-window gaps, so
    // compaction merges each direction into one edge); the block ends on a
    // write so the packer read sees every burst event
    t += 45 * sec;
    const size_t rounds = spec.staging_rounds;
    const uint64_t chunk = std::max<uint64_t>(collected / rounds, 1);
    for (size_t i = 0; i < rounds; ++i) {
        if (i > 0) {
            emit(mk(Op::Read, staging, shell, t, chunk), true);
            t += 2 * sec;
        }
        emit(mk(Op::Write, shell, staging, t, chunk), true);
        t += 2 * sec;
    }

    // pack and exfiltrate
    if (spec.scaffold_clones) {
        t += 20 * sec;
        emit(mk(Op::Clone, shell, packer, t, 0), false);
    }
    t += 8 * sec;
    emit(mk(Op::Read, staging, packer, t, chunk * rounds), true);
    t += 6 * sec;
    const uint64_t packed_bytes = (chunk * rounds) * 2 / 5;
    emit(mk(Op::Write, packer, packed, t, packed_bytes), true);
    t += 14 * sec;
    emit(mk(Op::Read, packed, shell, t, packed_bytes), true);
    t += 5 * sec;
    emit(mk(Op::Sendto, shell, exfil_sock, t, packed_bytes), true);  // POI
    return out;
}

// Six-event pure spine: every object has exactly one incoming transfer, so
// the SSG and the backtracking graph coincide.
std::vector<TaggedEvent> minimal_template(std::mt19937_64& rng, int64_t start) {
    std::vector<TaggedEvent> out;
    const int64_t sec = 1'000'000'000;
    const uint64_t bytes = 10'000 + below(rng, 5'000);
    const EntityId sock_in = sock_id("172.16.0.9", 41000, "203.0.113.20", 443);
    const EntityId p1 = proc_id("wget", 1300);
    const EntityId f1 = file_id("/tmp/payload.bin");
    const EntityId p2 = proc_id("sh", 1301);
    const EntityId f2 = file_id("/tmp/out.bin");
    const EntityId p3 = proc_id("nc", 1302);
    const EntityId sock_out = sock_id("172.16.0.9", 41002, "203.0.113.21", 8080);

    int64_t t = start;
    out.push_back({mk(Op::Recvfrom, sock_in, p1, t, bytes), true});
    out.push_back({mk(Op::Write, p1, f1, t += 5 * sec, bytes), true});
    out.push_back({mk(Op::Read, f1, p2, t += 5 * sec, bytes), true});
    out.push_back({mk(Op::Write, p2, f2, t += 5 * sec, bytes), true});
    out.push_back({mk(Op::Read, f2, p3, t += 5 * sec, bytes), true});
    out.push_back({mk(Op::Sendto, p3, sock_out, t += 5 * sec, bytes), true});
    return out;
}

}  // namespace

std::vector<EntityId> sensitive_files() {
    return {file_id("/home/user1/ledger0.db"), file_id("/home/user2/ledger1.db"),
            file_id("/home/user3/ledger2.db")};
}

int64_t scenario_start_ns() { return kStartNs; }

void ScenarioSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("scenario name must be non-empty");
    if (attack_template != "dataleak" && attack_template != "minimal" && attack_template != "none") {
        throw std::invalid_argument("unknown attack template '" + attack_template + "'");
    }
    if (benign_events > 0 && benign_rate_hz <= 0.0) {
        throw std::invalid_argument("benign_rate_hz must be positive when benign events are requested");
    }
    if (benign_events > 0 && (benign_processes == 0 || benign_files == 0)) {
        throw std::invalid_argument("benign pools must be non-empty when benign events are requested");
    }
    if (attack_template == "dataleak" && staging_rounds == 0) {
        throw std::invalid_argument("staging_rounds must be at least 1");
    }
    if ((junk_cycle_rounds == 0) != (junk_cycle_files == 0)) {
        throw std::invalid_argument("junk_cycle_files and junk_cycle_rounds must be set together");
    }
    if (attack_template == "none" && benign_events == 0) {
        throw std::invalid_argument("an empty scenario generates nothing");
    }
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
    json j = json::parse(text);
    ScenarioSpec spec;
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    if (j.contains("attack_template")) spec.attack_template = j.at("attack_template").get<std::string>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
    if (j.contains("benign_events")) spec.benign_events = j.at("benign_events").get<size_t>();
    if (j.contains("benign_rate_hz")) spec.benign_rate_hz = j.at("benign_rate_hz").get<double>();
    if (j.contains("benign_processes")) spec.benign_processes = j.at("benign_processes").get<size_t>();
    if (j.contains("benign_files")) spec.benign_files = j.at("benign_files").get<size_t>();
    if (j.contains("scaffold_clones")) spec.scaffold_clones = j.at("scaffold_clones").get<bool>();
    if (j.contains("staging_rounds")) spec.staging_rounds = j.at("staging_rounds").get<size_t>();
    if (j.contains("junk_cycle_files")) spec.junk_cycle_files = j.at("junk_cycle_files").get<size_t>();
    if (j.contains("junk_cycle_rounds")) spec.junk_cycle_rounds = j.at("junk_cycle_rounds").get<size_t>();
    if (j.contains("decoy_cycles")) spec.decoy_cycles = j.at("decoy_cycles").get<size_t>();
    if (j.contains("whitelist")) spec.whitelist = j.at("whitelist").get<std::vector<std::string>>();
    spec.validate();
    return spec;
}

ScenarioSpec ScenarioSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario spec: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

std::string ScenarioSpec::to_json() const {
    json j;
    j["name"] = name;
    j["attack_template"] = attack_template;
    j["seed"] = seed;
    j["benign_events"] = benign_events;
    j["benign_rate_hz"] = benign_rate_hz;
    j["benign_processes"] = benign_processes;
    j["benign_files"] = benign_files;
    j["scaffold_clones"] = scaffold_clones;
    j["staging_rounds"] = staging_rounds;
    j["junk_cycle_files"] = junk_cycle_files;
    j["junk_cycle_rounds"] = junk_cycle_rounds;
    j["decoy_cycles"] = decoy_cycles;
    j["whitelist"] = whitelist;
    return j.dump(2) + "\n";
}

BenignWorkload::BenignWorkload(uint64_t seed, size_t processes, size_t files, double rate_hz,
                               int64_t start_ns)
    : rng_(seed ^ 0x5eedb16e55ULL), clock_ns_(start_ns) {
    static const char* kProcMenu[] = {"make", "gcc", "vim", "sed", "python3", "rsync", "cat", "bash"};
    for (size_t i = 0; i < processes; ++i) {
        procs_.push_back(proc_id(kProcMenu[i % std::size(kProcMenu)], 2000 + static_cast<int64_t>(i)));
    }
    for (size_t i = 0; i < files; ++i) {
        switch (i % 4) {
            case 0: files_.push_back(file_id("/home/user" + std::to_string(i % 4 + 1) + "/notes" + std::to_string(i) + ".md")); break;
            case 1: files_.push_back(file_id("/src/app/mod" + std::to_string(i) + ".c")); break;
            case 2: files_.push_back(file_id("/build/out" + std::to_string(i) + ".o")); break;
            default: files_.push_back(file_id("/var/log/svc" + std::to_string(i) + ".log")); break;
        }
    }
    sensitive_ = sensitive_files();
    for (int i = 0; i < 6; ++i) {
        sockets_.push_back(sock_id("172.16.0." + std::to_string(5 + i), 51000 + i,
                                   "10." + std::to_string(1 + i) + ".0." + std::to_string(10 + i), 443));
    }
    mean_gap_ns_ = static_cast<int64_t>(1e9 / rate_hz);
}

void BenignWorkload::emit_motif() {
    auto pick = [this](const std::vector<EntityId>& pool) -> const EntityId& {
        return pool[below(rng_, pool.size())];
    };
    auto advance = [this]() {
        clock_ns_ += mean_gap_ns_ / 2 + static_cast<int64_t>(below(rng_, static_cast<uint64_t>(mean_gap_ns_)));
    };
    auto push = [this](Event e) { pending_.push_back(std::move(e)); };

    const EntityId& p = pick(procs_);
    const uint64_t draw = below(rng_, 100);
    if (draw < 30) {  // edit: read then write the same file
        const EntityId& f = pick(files_);
        advance();
        push(mk(Op::Read, f, p, clock_ns_, 400 + below(rng_, 60'000)));
        advance();
        push(mk(Op::Write, p, f, clock_ns_, 400 + below(rng_, 60'000)));
    } else if (draw < 50) {  // build: clone a child that reads a source, writes an object
        EntityId child = proc_id("cc1", static_cast<int64_t>(next_child_pid_++));
        advance();
        push(mk(Op::Clone, p, child, clock_ns_, 0));
        advance();
        push(mk(Op::Read, pick(files_), child, clock_ns_, 1'000 + below(rng_, 200'000)));
        advance();
        push(mk(Op::Write, child, pick(files_), clock_ns_, 1'000 + below(rng_, 200'000)));
    } else if (draw < 65) {  // fetch from a whitelisted mirror
        advance();
        push(mk(Op::Recvfrom, pick(sockets_), p, clock_ns_, 5'000 + below(rng_, 2'000'000)));
        advance();
        push(mk(Op::Write, p, pick(files_), clock_ns_, 5'000 + below(rng_, 2'000'000)));
    } else if (draw < 80) {  // log append
        advance();
        push(mk(Op::Write, p, pick(files_), clock_ns_, 100 + below(rng_, 4'000)));
    } else if (draw < 90) {  // scan a few files
        for (int i = 0; i < 3; ++i) {
            advance();
            push(mk(Op::Read, pick(files_), p, clock_ns_, 200 + below(rng_, 30'000)));
        }
    } else {  // a user touches a sensitive file
        const EntityId& f = pick(sensitive_);
        advance();
        push(mk(Op::Read, f, p, clock_ns_, 1'000 + below(rng_, 90'000)));
        advance();
        push(mk(Op::Write, p, f, clock_ns_, 1'000 + below(rng_, 90'000)));
    }
}

Event BenignWorkload::next() {
    while (pending_.empty()) emit_motif();
    Event e = std::move(pending_.front());
    pending_.pop_front();
    return e;
}

Scenario generate_scenario(const ScenarioSpec& spec) {
    spec.validate();

    std::vector<Event> benign;
    benign.reserve(spec.benign_events);
    if (spec.benign_events > 0) {
        BenignWorkload workload(spec.seed, spec.benign_processes, spec.benign_files,
                                spec.benign_rate_hz, kStartNs);
        for (size_t i = 0; i < spec.benign_events; ++i) benign.push_back(workload.next());
    }

    std::mt19937_64 attack_rng(spec.seed ^ 0xa77ac4ULL);
    std::vector<TaggedEvent> attack;
    const int64_t attack_start = kStartNs + 120'000'000'000;
    if (spec.attack_template == "dataleak") {
        attack = dataleak_template(spec, attack_rng, attack_start);
    } else if (spec.attack_template == "minimal") {
        attack = minimal_template(attack_rng, attack_start);
    }

    // merge by time; benign first on ties, original order otherwise
    Scenario scenario;
    scenario.spec = spec;
    scenario.log.reserve(benign.size() + attack.size());
    std::vector<char> critical_flags;
    critical_flags.reserve(benign.size() + attack.size());
    size_t bi = 0, ai = 0;
    while (bi < benign.size() || ai < attack.size()) {
        bool take_benign = ai >= attack.size() ||
                           (bi < benign.size() && benign[bi].ti <= attack[ai].event.ti);
        if (take_benign) {
            scenario.log.push_back(std::move(benign[bi++]));
            critical_flags.push_back(0);
        } else {
            critical_flags.push_back(attack[ai].critical ? 1 : 0);
            scenario.log.push_back(std::move(attack[ai++].event));
        }
    }
    for (size_t i = 0; i < scenario.log.size(); ++i) {
        scenario.log[i].eid = i + 1;
        if (critical_flags[i]) scenario.truth.critical_eids.push_back(i + 1);
    }

    scenario.truth.scenario = spec.name;
    if (!attack.empty()) {
        // the POI is the final attack event (the exfiltration edge)
        for (size_t i = scenario.log.size(); i-- > 0;) {
            if (critical_flags[i]) {
                scenario.poi = scenario.log[i];
                scenario.truth.poi_eid = scenario.poi.eid;
                break;
            }
        }
        scenario.truth.backtrack_edges = backtrack_closure(scenario.log, scenario.poi).size();
    }
    return scenario;
}

}  // namespace provsift
