#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bufsim/errors.hpp"
#include "bufsim/harness.hpp"
#include "bufsim/rng.hpp"
#include "bufsim/trace.hpp"

namespace {

using namespace bufsim;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open output file: " + path);
    }
    out << text;
    if (!out) {
        throw ValidationError("short write to " + path);
    }
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text(path, text);
    }
}

NamedTrace load_trace(const std::string& path) {
    return NamedTrace{std::filesystem::path(path).stem().string(), read_trace_file(path)};
}

struct RunFlags {
    std::string trace_path;
    std::vector<std::string> trace_paths;  // compare only
    std::string config_path;
    std::string out_path;
    std::string csv_path;
    std::string policy;
    std::vector<std::string> policies;  // compare only
    std::uint64_t capacity = 0;
    std::uint64_t seed = 0;
    std::uint32_t pin_hold = 0;
    std::uint64_t ring_pages = 0;
    double bgwriter_rate = 0.0;
    double seq_us = 0.0;
    double rand_us = 0.0;
    double dirty_us = 0.0;
    bool ring = false;
    bool omit_wall_time = false;
};

/// Config file first, then any explicitly given flag wins.
void add_sim_flags(CLI::App& cmd, RunFlags& f) {
    cmd.add_option("--config", f.config_path, "key=value config file")
        ->check(CLI::ExistingFile);
    cmd.add_option("--capacity", f.capacity, "pool capacity in pages");
    cmd.add_option("--seed", f.seed, "master RNG seed");
    cmd.add_option("--pin-hold", f.pin_hold, "recent pages each stream keeps pinned");
    cmd.add_flag("--ring", f.ring, "route large scans through private ring buffers");
    cmd.add_option("--ring-pages", f.ring_pages, "slots per ring buffer");
    cmd.add_option("--bgwriter", f.bgwriter_rate,
                   "enable the background writer at this pages-per-request rate");
    cmd.add_option("--seq-us", f.seq_us, "sequential read cost in microseconds");
    cmd.add_option("--rand-us", f.rand_us, "random read cost in microseconds");
    cmd.add_option("--dirty-us", f.dirty_us, "dirty writeback cost in microseconds");
    cmd.add_flag("--omit-wall-time", f.omit_wall_time,
                 "drop wall_time_ms so re-runs are byte-identical");
    cmd.add_option("--out", f.out_path, "report JSON path ('-' or empty = stdout)");
    cmd.add_option("--csv", f.csv_path, "also write the flat metrics CSV here");
}

SimConfig resolve_config(const CLI::App& cmd, const RunFlags& f) {
    SimConfig cfg;
    if (!f.config_path.empty()) {
        cfg = parse_config_file(f.config_path);
    }
    if (cmd.count("--capacity")) {
        cfg.capacity_pages = f.capacity;
    }
    if (cmd.count("--seed")) {
        cfg.seed = f.seed;
    }
    if (cmd.count("--pin-hold")) {
        cfg.pin_hold_window = f.pin_hold;
    }
    if (cmd.count("--ring")) {
        cfg.ring_buffer_enabled = true;
    }
    if (cmd.count("--ring-pages")) {
        cfg.ring_buffer_pages = f.ring_pages;
    }
    if (cmd.count("--bgwriter")) {
        cfg.background_writer_enabled = true;
        cfg.background_writer_pages_per_tick = f.bgwriter_rate;
    }
    if (cmd.count("--seq-us")) {
        cfg.cost_model.seq_read_us = f.seq_us;
    }
    if (cmd.count("--rand-us")) {
        cfg.cost_model.rand_read_us = f.rand_us;
    }
    if (cmd.count("--dirty-us")) {
        cfg.cost_model.dirty_writeback_us = f.dirty_us;
    }
    return cfg;
}

int cmd_run(const CLI::App& cmd, const RunFlags& f) {
    SimConfig cfg = resolve_config(cmd, f);
    if (cmd.count("--policy")) {
        cfg.policy = f.policy;
    }
    const NamedTrace trace = load_trace(f.trace_path);
    const RunReport report = run_simulation(trace, cfg);
    emit(f.out_path, to_json(report, !f.omit_wall_time));
    if (!f.csv_path.empty()) {
        write_text(f.csv_path, metrics_csv(report));
    }
    return 0;
}

int cmd_compare(const CLI::App& cmd, const RunFlags& f) {
    const SimConfig cfg = resolve_config(cmd, f);
    std::vector<NamedTrace> traces;
    traces.reserve(f.trace_paths.size());
    for (const std::string& p : f.trace_paths) {
        traces.push_back(load_trace(p));
    }
    const ComparisonReport report = compare_policies(traces, f.policies, cfg);
    emit(f.out_path, to_json(report, !f.omit_wall_time));
    if (!f.csv_path.empty()) {
        write_text(f.csv_path, metrics_csv(report));
    }
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& csv_path) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open report: " + in_path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::string csv;
    try {
        csv = metrics_csv(comparison_report_from_json(text));
    } catch (const ValidationError&) {
        csv = metrics_csv(run_report_from_json(text));
    }
    emit(csv_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-driven buffer pool simulator"};
    app.require_subcommand(1);

    // trace gen-scan | gen-point | gen-mixed
    CLI::App* trace_cmd = app.add_subcommand("trace", "Generate workload traces");
    trace_cmd->require_subcommand(1);

    ScanWorkloadParams scan_params;
    PointWorkloadParams point_params;
    double mixed_ratio = 0.5;
    std::uint64_t gen_seed = 1;
    std::string gen_out;

    CLI::App* gen_scan = trace_cmd->add_subcommand(
        "gen-scan", "Sequential sweeps over randomly chosen relations");
    gen_scan->add_option("--relations", scan_params.num_relations, "number of relations")
        ->capture_default_str();
    gen_scan->add_option("--blocks", scan_params.relation_blocks, "blocks per relation")
        ->capture_default_str();
    gen_scan->add_option("--streams", scan_params.num_streams, "concurrent scan streams")
        ->capture_default_str();
    gen_scan->add_option("--sweeps", scan_params.scans_per_stream, "full sweeps per stream")
        ->capture_default_str();
    gen_scan->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen_scan->add_option("--out", gen_out, "trace CSV path ('-' or empty = stdout)");

    CLI::App* gen_point = trace_cmd->add_subcommand(
        "gen-point", "Zipf-distributed point reads and writes on one relation");
    gen_point->add_option("--blocks", point_params.relation_blocks, "blocks in the relation")
        ->capture_default_str();
    gen_point->add_option("--requests", point_params.num_requests, "number of requests")
        ->required();
    gen_point->add_option("--zipf", point_params.zipf_s, "Zipf exponent (0 = uniform)")
        ->capture_default_str();
    gen_point
        ->add_option("--write-fraction", point_params.write_fraction,
                     "probability a request is a write")
        ->capture_default_str();
    gen_point->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen_point->add_option("--out", gen_out, "trace CSV path ('-' or empty = stdout)");

    CLI::App* gen_mixed =
        trace_cmd->add_subcommand("gen-mixed", "Blend of scan and point workloads");
    gen_mixed->add_option("--ratio", mixed_ratio, "sequential share of requests, in [0,1]")
        ->capture_default_str();
    gen_mixed->add_option("--relations", scan_params.num_relations, "scan side: relations")
        ->capture_default_str();
    gen_mixed->add_option("--blocks", scan_params.relation_blocks, "scan side: blocks/relation")
        ->capture_default_str();
    gen_mixed->add_option("--streams", scan_params.num_streams, "scan side: streams")
        ->capture_default_str();
    gen_mixed->add_option("--sweeps", scan_params.scans_per_stream, "scan side: sweeps/stream")
        ->capture_default_str();
    gen_mixed
        ->add_option("--point-blocks", point_params.relation_blocks,
                     "point side: blocks in the relation")
        ->capture_default_str();
    gen_mixed->add_option("--requests", point_params.num_requests, "point side: requests")
        ->required();
    gen_mixed->add_option("--zipf", point_params.zipf_s, "point side: Zipf exponent")
        ->capture_default_str();
    gen_mixed
        ->add_option("--write-fraction", point_params.write_fraction,
                     "point side: write probability")
        ->capture_default_str();
    gen_mixed->add_option("--seed", gen_seed, "seed for both sides and the merge")
        ->capture_default_str();
    gen_mixed->add_option("--out", gen_out, "trace CSV path ('-' or empty = stdout)");

    // run
    RunFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "Replay a trace under one policy");
    run_cmd->add_option("--trace", run_flags.trace_path, "trace CSV")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--policy", run_flags.policy,
                        "clock | pbm-sampling | evolved | belady");
    add_sim_flags(*run_cmd, run_flags);

    // compare
    RunFlags cmp_flags;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "Rank policies over shared traces");
    cmp_cmd->add_option("--trace", cmp_flags.trace_paths, "trace CSV (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    cmp_cmd->add_option("--policies", cmp_flags.policies, "comma-separated policy names")
        ->required()
        ->delimiter(',');
    add_sim_flags(*cmp_cmd, cmp_flags);

    // report
    std::string report_in;
    std::string report_csv;
    CLI::App* report_cmd =
        app.add_subcommand("report", "Re-emit a stored report as metrics CSV");
    report_cmd->add_option("--in", report_in, "RunReport or ComparisonReport JSON")
        ->required()
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--csv", report_csv, "CSV path ('-' or empty = stdout)");

    try {
        app.parse(argc, argv);

        if (gen_scan->parsed() || gen_point->parsed() || gen_mixed->parsed()) {
            Trace t;
            if (gen_scan->parsed()) {
                scan_params.seed = gen_seed;
                t = generate_scan_workload(scan_params);
            } else if (gen_point->parsed()) {
                point_params.seed = gen_seed;
                t = generate_point_workload(point_params);
            } else {
                scan_params.seed = mix_seed(gen_seed, 1);
                point_params.seed = mix_seed(gen_seed, 2);
                t = generate_mixed_workload(scan_params, point_params, mixed_ratio, gen_seed);
            }
            if (gen_out.empty() || gen_out == "-") {
                write_trace(t, std::cout);
            } else {
                write_trace_file(t, gen_out);
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            return cmd_run(*run_cmd, run_flags);
        }
        if (cmp_cmd->parsed()) {
            return cmd_compare(*cmp_cmd, cmp_flags);
        }
        return cmd_report(report_in, report_csv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
