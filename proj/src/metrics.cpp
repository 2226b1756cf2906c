#include "provsift/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace provsift {

using json = nlohmann::ordered_json;

void GroundTruth::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write ground truth file: " + path.string());
    out << "# scenario: " << scenario << "\n";
    out << "# poi: " << poi_eid << "\n";
    out << "# backtrack_edges: " << backtrack_edges << "\n";
    for (uint64_t eid : critical_eids) out << eid << "\n";
    out.flush();
    if (!out) throw std::runtime_error("ground truth write failed: " + path.string());
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ground truth file: " + path.string());
    GroundTruth gt;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto parse_header = [&line](std::string_view prefix) -> std::optional<std::string> {
                if (line.size() > prefix.size() && std::string_view(line).substr(0, prefix.size()) == prefix) {
                    return line.substr(prefix.size());
                }
                return std::nullopt;
            };
            if (auto v = parse_header("# scenario: ")) gt.scenario = *v;
            if (auto v = parse_header("# poi: ")) gt.poi_eid = std::stoull(*v);
            if (auto v = parse_header("# backtrack_edges: ")) gt.backtrack_edges = std::stoull(*v);
            continue;
        }
        uint64_t eid = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), eid);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected an eid, got '" + line + "'");
        }
        gt.critical_eids.push_back(eid);
    }
    std::sort(gt.critical_eids.begin(), gt.critical_eids.end());
    return gt;
}

MetricsReport evaluate(const Investigation& inv, const GroundTruth& gt, uint64_t total_events,
                       const ScoringParams& params) {
    if (gt.critical_eids.empty()) {
        throw std::invalid_argument("ground truth has no critical events");
    }
    for (uint64_t eid : gt.critical_eids) {
        if (eid == 0 || eid > total_events) {
            throw std::invalid_argument("ground truth references unknown eid " + std::to_string(eid));
        }
    }
    if (gt.poi_eid == 0 || gt.poi_eid > total_events) {
        throw std::invalid_argument("ground truth references unknown POI eid " + std::to_string(gt.poi_eid));
    }

    std::vector<uint64_t> identified = inv.ccg.edge_eids();
    std::vector<uint64_t> critical = gt.critical_eids;  // sorted by load/save contract
    std::sort(critical.begin(), critical.end());

    MetricsReport report;
    report.c = params.c;
    report.t = params.t;
    report.identified = identified.size();

    std::vector<uint64_t> diff;
    std::set_difference(identified.begin(), identified.end(), critical.begin(), critical.end(),
                        std::back_inserter(diff));
    report.fp = diff.size();
    diff.clear();
    std::set_difference(critical.begin(), critical.end(), identified.begin(), identified.end(),
                        std::back_inserter(diff));
    report.fn = diff.size();

    report.fpr = gt.backtrack_edges == 0 ? 0.0
                                         : static_cast<double>(report.fp) /
                                               static_cast<double>(gt.backtrack_edges);
    report.fnr = static_cast<double>(report.fn) / static_cast<double>(critical.size());
    report.backtrack_edges = gt.backtrack_edges;
    report.ssg_edges = inv.stats.ssg_edges;
    report.compacted_edges = inv.stats.compacted_edges;
    report.ccg_edges = inv.stats.ccg_edges;
    return report;
}

SweepResult sweep(Investigation& inv, const GroundTruth& gt, uint64_t total_events,
                  const std::vector<double>& c_values, const std::vector<double>& t_values) {
    if (c_values.empty() || t_values.empty()) {
        throw std::invalid_argument("sweep ranges must be nonempty");
    }
    SweepResult result;
    result.c_values = c_values;
    result.t_values = t_values;
    result.cells.reserve(c_values.size() * t_values.size());
    for (double c : c_values) {
        for (double t : t_values) {
            ScoringParams params{c, t};
            rescore(inv, params);
            result.cells.push_back(evaluate(inv, gt, total_events, params));
        }
    }
    return result;
}

std::vector<double> default_c_grid() {
    return {1, 2, 3, 4, 5, 6, 7, 8, 9};
}

std::vector<double> default_t_grid() {
    std::vector<double> t;
    for (int i = 1; i <= 9; ++i) t.push_back(i / 10.0);
    return t;
}

bool sweep_is_monotone(const SweepResult& result, std::string* violation) {
    const size_t nt = result.t_values.size();
    for (size_t ci = 0; ci < result.c_values.size(); ++ci) {
        for (size_t ti = 1; ti < nt; ++ti) {
            const MetricsReport& prev = result.cells[ci * nt + ti - 1];
            const MetricsReport& cur = result.cells[ci * nt + ti];
            if (cur.identified > prev.identified) {
                if (violation != nullptr) {
                    *violation = "identified count rose from " + std::to_string(prev.identified) +
                                 " to " + std::to_string(cur.identified) + " at c=" +
                                 std::to_string(result.c_values[ci]) + " between t=" +
                                 std::to_string(result.t_values[ti - 1]) + " and t=" +
                                 std::to_string(result.t_values[ti]);
                }
                return false;
            }
        }
    }
    return true;
}

std::string metrics_to_text(const MetricsReport& report) {
    json j;
    j["c"] = report.c;
    j["t"] = report.t;
    j["fp"] = report.fp;
    j["fn"] = report.fn;
    j["fpr"] = report.fpr;
    j["fnr"] = report.fnr;
    j["identified_events"] = report.identified;
    j["backtrack_edges"] = report.backtrack_edges;
    j["ssg_edges"] = report.ssg_edges;
    j["compacted_edges"] = report.compacted_edges;
    j["ccg_edges"] = report.ccg_edges;
    return j.dump(2) + "\n";
}

std::string sweep_to_table(const SweepResult& result) {
    std::string out = "c,t,fp,fn,fpr,fnr,identified,ccg_edges\n";
    const size_t nt = result.t_values.size();
    for (size_t ci = 0; ci < result.c_values.size(); ++ci) {
        for (size_t ti = 0; ti < nt; ++ti) {
            const MetricsReport& cell = result.cells[ci * nt + ti];
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%g,%g,%llu,%llu,%.9g,%.9g,%llu,%zu\n", cell.c, cell.t,
                          static_cast<unsigned long long>(cell.fp),
                          static_cast<unsigned long long>(cell.fn), cell.fpr, cell.fnr,
                          static_cast<unsigned long long>(cell.identified), cell.ccg_edges);
            out += buf;
        }
    }
    return out;
}

}  // namespace provsift
