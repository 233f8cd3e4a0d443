#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bufsim/costmodel.hpp"
#include "bufsim/policies.hpp"
#include "bufsim/scantrack.hpp"
#include "bufsim/trace.hpp"

namespace bufsim {

/// Everything one run needs besides the trace itself. The flat key=value
/// config file mirrors these field names (nested configs flattened).
struct SimConfig {
    std::size_t capacity_pages = 1024;
    std::string policy = "clock";
    PolicyConfig policy_config;
    IoCostModel cost_model;
    ScanTrackConfig scantrack;
    std::uint64_t seed = 42;
    std::uint32_t pin_hold_window = 1;  // recent pages each stream keeps pinned
    bool ring_buffer_enabled = false;
    std::size_t ring_buffer_pages = 32;
    bool background_writer_enabled = false;
    double background_writer_pages_per_tick = 0.0;

    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

/// A trace plus the stable identifier used for seed derivation.
struct NamedTrace {
    std::string id;
    Trace trace;
};

struct RunReport {
    SimConfig config;
    std::string trace_id;
    std::uint64_t run_seed = 0;
    RunMetrics metrics;
    double hit_rate = 0.0;
    double avg_io_wait_us = 0.0;
    double latency_score = 0.0;
    double wall_time_ms = 0.0;

    bool operator==(const RunReport&) const = default;
};

struct PolicySummary {
    std::string policy;
    double mean_hit_rate = 0.0;
    double mean_latency_score = 0.0;

    bool operator==(const PolicySummary&) const = default;
};

struct PairwiseDelta {
    std::string policy_a;
    std::string policy_b;
    double hit_rate_delta = 0.0;       // mean(a) - mean(b)
    double latency_score_delta = 0.0;  // mean(a) - mean(b)

    bool operator==(const PairwiseDelta&) const = default;
};

struct ComparisonReport {
    std::vector<RunReport> runs;  // trace-major, then policy, in input order
    std::vector<PolicySummary> ranking;  // descending mean latency_score
    std::vector<PairwiseDelta> deltas;   // all pairs in ranking order

    bool operator==(const ComparisonReport&) const = default;
};

/// Per-run RNG stream: adding a trace or policy never perturbs the seeds of
/// existing runs.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::string_view trace_id,
                              std::string_view policy_name);

/// Replays the trace against one policy and returns the scored report.
/// Deterministic for a fixed (trace, config) apart from wall_time_ms.
RunReport run_simulation(const NamedTrace& trace, const SimConfig& config);

/// Cross product of traces x policies under a shared base config (each run
/// overrides only the policy name). Runs execute concurrently; reports are
/// merged in input order. Errors are tagged with (trace, policy).
ComparisonReport compare_policies(const std::vector<NamedTrace>& traces,
                                  const std::vector<std::string>& policies,
                                  const SimConfig& base_config);

/// Canonical JSON (sorted keys, two-space indent, trailing newline).
/// Omitting wall time yields byte-identical output across re-runs.
std::string to_json(const RunReport& report, bool include_wall_time = true);
std::string to_json(const ComparisonReport& report, bool include_wall_time = true);

RunReport run_report_from_json(const std::string& text);
ComparisonReport comparison_report_from_json(const std::string& text);

/// One metric row per run, for plotting. Columns:
/// trace,policy,seed,requests,hits,seq_misses,rand_misses,dirty_evictions,
/// total_io_wait_us,hit_rate,avg_io_wait_us,latency_score
std::string metrics_csv(const RunReport& report);
std::string metrics_csv(const ComparisonReport& report);

/// Flat key=value config, '#' comments, blank lines ignored. Unknown keys
/// are rejected. Missing keys keep their defaults.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_file(const std::filesystem::path& path);

}  // namespace bufsim
