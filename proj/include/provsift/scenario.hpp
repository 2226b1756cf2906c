#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "provsift/event.hpp"
#include "provsift/metrics.hpp"

namespace provsift {

// Deterministic labeled-scenario recipe: identical spec + seed produce an
// identical log and ground truth.
struct ScenarioSpec {
    std::string name = "dataleak-1";
    std::string attack_template = "dataleak";  // dataleak | minimal | none
    uint64_t seed = 1;

    // benign workload (builds, edits, fetches from whitelisted mirrors)
    size_t benign_events = 2000;
    double benign_rate_hz = 100.0;  // events per simulated second
    size_t benign_processes = 24;
    size_t benign_files = 80;

    // attack shaping (dataleak template)
    bool scaffold_clones = true;   // clone events outside the data-flow spine
    size_t staging_rounds = 5;     // staged write bursts, readback-interleaved
    size_t junk_cycle_files = 0;   // suspicious junk mesh width
    size_t junk_cycle_rounds = 0;  // mesh rounds per file; 0 disables the mesh
    size_t decoy_cycles = 0;       // upstream decoy lineage (w/r pairs)

    std::vector<std::string> whitelist = {"10.0.0.0/8"};

    void validate() const;  // throws std::invalid_argument

    static ScenarioSpec from_json(const std::string& text);
    static ScenarioSpec from_json_file(const std::filesystem::path& path);
    std::string to_json() const;
};

struct Scenario {
    ScenarioSpec spec;
    std::vector<Event> log;  // eids 1..n, nondecreasing ti
    GroundTruth truth;
    Event poi;
};

Scenario generate_scenario(const ScenarioSpec& spec);

// Unbounded benign-only stream sharing the scenario motifs; entity pools are
// fixed so engine state stays flat. Used for throughput and memory runs.
class BenignWorkload {
  public:
    BenignWorkload(uint64_t seed, size_t processes, size_t files, double rate_hz, int64_t start_ns);

    Event next();  // nondecreasing ti

  private:
    void emit_motif();

    std::mt19937_64 rng_;
    std::vector<EntityId> procs_;
    std::vector<EntityId> files_;
    std::vector<EntityId> sensitive_;
    std::vector<EntityId> sockets_;
    std::deque<Event> pending_;
    int64_t clock_ns_;
    int64_t mean_gap_ns_;
    uint64_t next_child_pid_ = 50000;
};

// The sensitive files shared between the benign workload (writers) and the
// dataleak template (collection reads); they keep the backtracking closure
// connected to the benign graph.
std::vector<EntityId> sensitive_files();

int64_t scenario_start_ns();

}  // namespace provsift
