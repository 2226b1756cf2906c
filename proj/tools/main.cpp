// provsift: streaming provenance analysis. Ingests audit event streams,
// tracks suspicious-semantic propagation, and distills scored critical
// component graphs around a point-of-interest event.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "provsift/backtrack.hpp"
#include "provsift/engine.hpp"
#include "provsift/errors.hpp"
#include "provsift/export.hpp"
#include "provsift/investigate.hpp"
#include "provsift/metrics.hpp"
#include "provsift/parser.hpp"
#include "provsift/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace provsift;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct CommonOpts {
    std::string state_dir;
    std::string out_dir;
    double c = 5.0;
    double t = 0.5;
    double window_secs = 10.0;
    size_t hot_cap = 4096;
    int64_t ooo_slack_ns = 0;
    std::string whitelist_path;
    std::vector<std::string> formats{"graph-text"};
};

int64_t window_ns_of(const CommonOpts& opts) {
    return static_cast<int64_t>(opts.window_secs * 1e9);
}

EngineConfig engine_config(const CommonOpts& opts) {
    EngineConfig cfg;
    cfg.hot_cap = opts.hot_cap;
    cfg.ooo_slack_ns = opts.ooo_slack_ns;
    if (!opts.whitelist_path.empty()) {
        cfg.whitelist = SocketWhitelist::load_file(opts.whitelist_path);
    }
    return cfg;
}

// --- ingest ----------------------------------------------------------------

int cmd_ingest(const CommonOpts& opts, const std::string& input, size_t checkpoint_every) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (input != "-") {
        file.open(input, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot open input " << input << "\n";
            return 1;
        }
        in = &file;
    }

    Engine engine{engine_config(opts), opts.state_dir};
    ParseCounters counters;
    uint64_t transfers = 0;
    size_t lineno = 0;
    auto start = Clock::now();

    std::string line;
    while (std::getline(*in, line)) {
        ++lineno;
        ParsedLine parsed = parse_event_line(line);
        counters.add(parsed.status);
        switch (parsed.status) {
            case LineStatus::Ok: {
                try {
                    if (engine.process_event(std::move(parsed.event)).transferred) ++transfers;
                } catch (const SequencingError& e) {
                    std::cerr << "error: line " << lineno << ": " << e.what() << "\n";
                    return 2;
                }
                if (checkpoint_every != 0 && counters.ok % checkpoint_every == 0) {
                    engine.checkpoint();
                }
                break;
            }
            case LineStatus::SyntaxError:
                std::cerr << "error: line " << lineno << " byte " << parsed.error_offset << ": "
                          << parsed.error << "\n";
                break;
            case LineStatus::SemanticError:
                std::cerr << "error: line " << lineno << ": " << parsed.error << "\n";
                break;
            default:
                break;
        }
    }
    double elapsed = seconds_since(start);
    engine.checkpoint();

    json summary;
    summary["events_consumed"] = counters.ok;
    summary["blank_lines"] = counters.blank;
    summary["skipped_unsupported"] = counters.skipped_unsupported;
    summary["syntax_errors"] = counters.syntax_errors;
    summary["semantic_errors"] = counters.semantic_errors;
    summary["transfers"] = transfers;
    summary["events_per_sec"] = elapsed > 0 ? static_cast<double>(counters.ok) / elapsed : 0.0;
    summary["sel_size"] = engine.sel_size();
    summary["ret_hot_entries"] = engine.hot_count();
    summary["ret_cold_entries"] = engine.cold_count();
    summary["state_bytes_estimate"] = engine.state_bytes_estimate();
    summary["elapsed_secs"] = elapsed;
    std::cout << summary.dump(2) << "\n";
    return counters.syntax_errors + counters.semantic_errors > 0 ? 1 : 0;
}

// --- investigate -----------------------------------------------------------

std::optional<Event> resolve_poi(const Engine& engine, uint64_t poi_eid,
                                 const std::string& poi_object, const std::string& poi_kind,
                                 const std::string& poi_op, std::string& error) {
    if (poi_eid != 0) {
        const Event* e = engine.events().find(poi_eid);
        if (e == nullptr) {
            error = "no stored event with eid " + std::to_string(poi_eid) +
                    " (the POI must be a transferring event)";
            return std::nullopt;
        }
        return *e;
    }
    if (poi_object.empty()) {
        error = "either --poi-eid or --poi-object is required";
        return std::nullopt;
    }
    auto kind = entity_kind_from_string(poi_kind);
    if (!kind) {
        error = "--poi-kind must be file, process, or socket";
        return std::nullopt;
    }
    std::optional<Op> op;
    if (!poi_op.empty()) {
        op = op_from_string(poi_op);
        if (!op) {
            error = "unknown --poi-op '" + poi_op + "'";
            return std::nullopt;
        }
    }
    auto eid = engine.events().latest_matching(EntityId{*kind, poi_object}, op);
    if (!eid) {
        error = "no stored event matches object '" + poi_object + "'";
        return std::nullopt;
    }
    return *engine.events().find(*eid);
}

void write_artifacts(const CommonOpts& opts, const Investigation& inv, const ScoringParams& params) {
    fs::create_directories(opts.out_dir);
    const fs::path out = opts.out_dir;
    bool text = std::find(opts.formats.begin(), opts.formats.end(), "graph-text") != opts.formats.end();
    bool dot = std::find(opts.formats.begin(), opts.formats.end(), "visualization") != opts.formats.end();

    auto annotations = ccg_annotations(inv, params.t);
    if (text) {
        write_file(out / "ssg.json", graph_to_text(inv.ssg));
        write_file(out / "ssg_compacted.json", graph_to_text(inv.compacted));
        write_file(out / "ccg.json", graph_to_text(inv.ccg, &annotations));
        write_file(out / "paths.json", paths_to_text(inv, params));
    }
    if (dot) {
        write_file(out / "ssg.dot", graph_to_dot(inv.ssg));
        write_file(out / "ssg_compacted.dot", graph_to_dot(inv.compacted));
        write_file(out / "ccg.dot", graph_to_dot(inv.ccg));
    }
}

json stats_json(const Investigation& inv) {
    json j;
    j["snapshot_events"] = inv.stats.snapshot_events;
    j["ssg_edges"] = inv.stats.ssg_edges;
    j["compacted_edges"] = inv.stats.compacted_edges;
    j["tree_nodes"] = inv.stats.tree_nodes;
    j["paths"] = inv.stats.path_count;
    j["relevant_paths"] = inv.stats.relevant_paths;
    j["ccg_edges"] = inv.stats.ccg_edges;
    j["ccg_events"] = inv.stats.ccg_events;
    j["all_paths_filtered"] = inv.ccg.all_paths_filtered;
    return j;
}

int cmd_investigate(const CommonOpts& opts, uint64_t poi_eid, const std::string& poi_object,
                    const std::string& poi_kind, const std::string& poi_op) {
    Engine engine = Engine::restore(opts.state_dir);
    std::string error;
    auto poi = resolve_poi(engine, poi_eid, poi_object, poi_kind, poi_op, error);
    if (!poi) {
        std::cerr << "error: " << error << "\n";
        return 1;
    }

    auto start = Clock::now();
    ScoringParams params{opts.c, opts.t};
    Investigation inv;
    try {
        auto snapshot = engine.snapshot_related(poi->object);
        inv = investigate(snapshot, *poi, params, window_ns_of(opts));
    } catch (const EntityNotSuspiciousError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const PoiNotReachableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    double elapsed = seconds_since(start);
    write_artifacts(opts, inv, params);

    json summary = stats_json(inv);
    summary["poi_eid"] = poi->eid;
    summary["c"] = params.c;
    summary["t"] = params.t;
    summary["window_secs"] = opts.window_secs;
    summary["elapsed_secs"] = elapsed;
    summary["out_dir"] = opts.out_dir;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// --- eval --------------------------------------------------------------------

int cmd_eval(const CommonOpts& opts, const std::string& gt_path, const std::string& log_path,
             bool run_sweep) {
    GroundTruth gt = GroundTruth::load(gt_path);

    Engine engine = Engine::restore(opts.state_dir);
    const Event* poi = engine.events().find(gt.poi_eid);
    if (poi == nullptr) {
        std::cerr << "error: ground-truth POI eid " << gt.poi_eid << " is not a stored event\n";
        return 1;
    }
    uint64_t total_events = engine.last_eid();

    // E_total comes from the ground-truth file; recompute when a raw log is
    // supplied so stale files are caught
    if (!log_path.empty()) {
        std::ifstream in(log_path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot open log " << log_path << "\n";
            return 1;
        }
        std::vector<Event> log;
        std::string line;
        uint64_t eid = 0;
        while (std::getline(in, line)) {
            ParsedLine parsed = parse_event_line(line);
            if (parsed.status == LineStatus::Ok) {
                parsed.event.eid = ++eid;
                log.push_back(std::move(parsed.event));
            }
        }
        auto closure = backtrack_closure(log, *poi);
        if (gt.backtrack_edges != closure.size()) {
            std::cerr << "warning: ground truth lists " << gt.backtrack_edges
                      << " backtracking edges, recomputed " << closure.size() << "\n";
            gt.backtrack_edges = closure.size();
        }
    }

    ScoringParams params{opts.c, opts.t};
    Investigation inv = investigate(engine.snapshot_related(poi->object), *poi, params,
                                    window_ns_of(opts));
    MetricsReport report = evaluate(inv, gt, total_events, params);

    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / "metrics.json", metrics_to_text(report));

    json summary = json::parse(metrics_to_text(report));
    if (run_sweep) {
        SweepResult grid = sweep(inv, gt, total_events, default_c_grid(), default_t_grid());
        write_file(fs::path(opts.out_dir) / "sweep.csv", sweep_to_table(grid));
        std::string violation;
        summary["sweep_cells"] = grid.cells.size();
        summary["sweep_monotone"] = sweep_is_monotone(grid, &violation);
        if (!violation.empty()) summary["sweep_violation"] = violation;
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// --- generate ----------------------------------------------------------------

int cmd_generate(const std::string& spec_path, const std::string& out_dir,
                 std::optional<uint64_t> seed_override) {
    ScenarioSpec spec;
    if (!spec_path.empty()) {
        spec = ScenarioSpec::from_json_file(spec_path);
    }
    if (seed_override) spec.seed = *seed_override;
    spec.validate();

    Scenario scenario = generate_scenario(spec);
    fs::create_directories(out_dir);
    const fs::path out = out_dir;

    {
        std::ofstream events(out / "events.jsonl", std::ios::trunc | std::ios::binary);
        if (!events) throw std::runtime_error("cannot write events.jsonl");
        std::string line;
        for (const Event& e : scenario.log) {
            line.clear();
            serialize_event_to(e, line);
            line += '\n';
            events.write(line.data(), static_cast<std::streamsize>(line.size()));
        }
        if (!events) throw std::runtime_error("events.jsonl write failed");
    }
    scenario.truth.save(out / "ground_truth.txt");
    {
        std::string wl;
        for (const auto& entry : spec.whitelist) wl += entry + "\n";
        write_file(out / "whitelist.txt", wl);
    }
    write_file(out / "scenario.json", spec.to_json());

    json summary;
    summary["scenario"] = spec.name;
    summary["events"] = scenario.log.size();
    summary["critical_events"] = scenario.truth.critical_eids.size();
    summary["poi_eid"] = scenario.truth.poi_eid;
    summary["backtrack_edges"] = scenario.truth.backtrack_edges;
    summary["out_dir"] = out_dir;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming provenance analysis and critical component graph extraction"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto add_common = [&opts](CLI::App* cmd) {
        cmd->add_option("--state-dir", opts.state_dir, "engine state directory")
            ->envname("PROVSIFT_STATE_DIR")
            ->required();
        cmd->add_option("--out-dir", opts.out_dir, "artifact output directory")
            ->envname("PROVSIFT_OUT_DIR")
            ->required();
        cmd->add_option("--c", opts.c, "inflation divisor")->envname("PROVSIFT_C");
        cmd->add_option("--t", opts.t, "path score threshold")->envname("PROVSIFT_T");
        cmd->add_option("--window-secs", opts.window_secs, "edge compaction window, seconds")
            ->envname("PROVSIFT_WINDOW_SECS");
    };

    // ingest
    std::string input = "-";
    size_t checkpoint_every = 0;
    CLI::App* ingest = app.add_subcommand("ingest", "consume an event stream into engine state");
    ingest->add_option("--input", input, "event stream path, or - for stdin")
        ->envname("PROVSIFT_INPUT");
    ingest->add_option("--state-dir", opts.state_dir, "engine state directory")
        ->envname("PROVSIFT_STATE_DIR")
        ->required();
    ingest->add_option("--hot-cap", opts.hot_cap, "hot RET entry cap")->envname("PROVSIFT_HOT_CAP");
    ingest->add_option("--ooo-slack-ns", opts.ooo_slack_ns, "out-of-order timestamp slack, ns")
        ->envname("PROVSIFT_OOO_SLACK_NS");
    ingest->add_option("--whitelist", opts.whitelist_path, "socket whitelist file")
        ->envname("PROVSIFT_WHITELIST");
    ingest->add_option("--checkpoint-every", checkpoint_every, "checkpoint every N events");

    // investigate
    uint64_t poi_eid = 0;
    std::string poi_object, poi_kind = "process", poi_op;
    CLI::App* investigate_cmd = app.add_subcommand("investigate", "build SSG, paths, and CCG for a POI");
    add_common(investigate_cmd);
    investigate_cmd->add_option("--poi-eid", poi_eid, "POI event id")->envname("PROVSIFT_POI_EID");
    investigate_cmd->add_option("--poi-object", poi_object, "POI object canonical key");
    investigate_cmd->add_option("--poi-kind", poi_kind, "POI object kind (with --poi-object)");
    investigate_cmd->add_option("--poi-op", poi_op, "restrict key-based POI lookup to an op");
    investigate_cmd->add_option("--format", opts.formats, "graph-text and/or visualization")
        ->check(CLI::IsMember({"graph-text", "visualization"}))
        ->envname("PROVSIFT_FORMAT");

    // eval
    std::string gt_path, log_path;
    bool run_sweep = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a CCG against ground truth");
    add_common(eval_cmd);
    eval_cmd->add_option("--gt", gt_path, "ground truth file")->required();
    eval_cmd->add_option("--log", log_path, "raw log for backtracking-size verification");
    eval_cmd->add_flag("--sweep", run_sweep, "grid-search c and t");

    // generate
    std::string spec_path, gen_out;
    uint64_t seed_value = 0;
    CLI::App* generate_cmd = app.add_subcommand("generate", "emit a labeled synthetic scenario");
    generate_cmd->add_option("--spec", spec_path, "scenario spec JSON (defaults when omitted)");
    generate_cmd->add_option("--out-dir", gen_out, "scenario output directory")
        ->envname("PROVSIFT_OUT_DIR")
        ->required();
    CLI::Option* seed_opt = generate_cmd->add_option("--seed", seed_value, "override the spec seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(ingest)) {
            return cmd_ingest(opts, input, checkpoint_every);
        }
        if (app.got_subcommand(investigate_cmd)) {
            return cmd_investigate(opts, poi_eid, poi_object, poi_kind, poi_op);
        }
        if (app.got_subcommand(eval_cmd)) {
            return cmd_eval(opts, gt_path, log_path, run_sweep);
        }
        if (app.got_subcommand(generate_cmd)) {
            std::optional<uint64_t> seed_override;
            if (seed_opt->count() > 0) seed_override = seed_value;
            return cmd_generate(spec_path, gen_out, seed_override);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
