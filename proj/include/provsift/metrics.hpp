#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "provsift/investigate.hpp"

namespace provsift {

// Labeled critical events of a scenario plus the backtracking-graph size the
// rates are computed against.
struct GroundTruth {
    std::string scenario;
    uint64_t poi_eid = 0;
    uint64_t backtrack_edges = 0;  // E_total
    std::vector<uint64_t> critical_eids;  // sorted

    void save(const std::filesystem::path& path) const;
    static GroundTruth load(const std::filesystem::path& path);
};

struct MetricsReport {
    double c = 0.0;
    double t = 0.0;
    uint64_t fp = 0;
    uint64_t fn = 0;
    double fpr = 0.0;  // fp / E_total
    double fnr = 0.0;  // fn / |critical|
    uint64_t identified = 0;  // constituent eids of CCG edges
    size_t backtrack_edges = 0;
    size_t ssg_edges = 0;
    size_t compacted_edges = 0;
    size_t ccg_edges = 0;
};

// Compares the eids identified by the CCG (every constituent of every CCG
// edge) against the critical set. Throws std::invalid_argument when the
// ground truth references eids outside the log (total_events is the number
// of sequenced events; eids are dense from 1).
MetricsReport evaluate(const Investigation& inv, const GroundTruth& gt, uint64_t total_events,
                       const ScoringParams& params);

// Grid search over (c, t); rescoring reuses the investigation's tree.
struct SweepResult {
    std::vector<MetricsReport> cells;  // row-major: c outer, t inner
    std::vector<double> c_values;
    std::vector<double> t_values;
};
SweepResult sweep(Investigation& inv, const GroundTruth& gt, uint64_t total_events,
                  const std::vector<double>& c_values, const std::vector<double>& t_values);

// Default grid: c in 1..9 step 1, t in 0.1..0.9 step 0.1.
std::vector<double> default_c_grid();
std::vector<double> default_t_grid();

// For a fixed c, identified counts must not increase with t.
bool sweep_is_monotone(const SweepResult& result, std::string* violation = nullptr);

std::string metrics_to_text(const MetricsReport& report);      // JSON object
std::string sweep_to_table(const SweepResult& result);         // one CSV row per cell

}  // namespace provsift
