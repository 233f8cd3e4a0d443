#include <doctest.h>

#include <bufsim/errors.hpp>
#include <bufsim/harness.hpp>
#include <bufsim/rng.hpp>

#include "support.hpp"

#include <sstream>
#include <string>
#include <vector>

using namespace bufsim;
using namespace bufsim::test;

namespace {

NamedTrace point_trace(std::string id, std::uint32_t blocks, std::uint64_t requests,
                       double zipf, double write_fraction, std::uint64_t seed) {
    PointWorkloadParams p;
    p.relation_blocks = blocks;
    p.num_requests = requests;
    p.zipf_s = zipf;
    p.write_fraction = write_fraction;
    p.seed = seed;
    return {std::move(id), generate_point_workload(p)};
}

NamedTrace scan_trace(std::string id, std::uint32_t blocks, std::uint32_t streams,
                      std::uint32_t sweeps, std::uint64_t seed) {
    ScanWorkloadParams p;
    p.relation_blocks = blocks;
    p.num_streams = streams;
    p.scans_per_stream = sweeps;
    p.seed = seed;
    return {std::move(id), generate_scan_workload(p)};
}

/// Six random reads cycling three pages: forces an eviction per request
/// once the two-slot pool is warm.
NamedTrace abc_trace() {
    Trace t;
    t.relations[0] = 3;
    for (std::uint64_t i = 0; i < 6; ++i) {
        t.requests.push_back(make_request(i, {0, static_cast<BlockNumber>(i % 3)}));
    }
    return {"abc", std::move(t)};
}

void check_conservation(const RunReport& r) {
    const IoCostModel& m = r.config.cost_model;
    CHECK(r.metrics.total_io_wait_us ==
          m.seq_read_us * static_cast<double>(r.metrics.seq_misses) +
              m.rand_read_us * static_cast<double>(r.metrics.rand_misses) +
              m.dirty_writeback_us * static_cast<double>(r.metrics.dirty_evictions) +
              m.hit_us * static_cast<double>(r.metrics.hits));
    CHECK(r.metrics.hits + r.metrics.seq_misses + r.metrics.rand_misses == r.metrics.requests);
}

}  // namespace

TEST_CASE("run seeds mix master seed, trace id, and policy name") {
    CHECK(derive_run_seed(42, "t0", "clock") ==
          mix_seed(mix_seed(42, fnv1a("t0")), fnv1a("clock")));
    CHECK(derive_run_seed(42, "t0", "clock") != derive_run_seed(42, "t0", "evolved"));
    CHECK(derive_run_seed(42, "t0", "clock") != derive_run_seed(42, "t1", "clock"));
    CHECK(derive_run_seed(42, "t0", "clock") != derive_run_seed(43, "t0", "clock"));
}

TEST_CASE("sim config validation") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());

    c.capacity_pages = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);

    c = {};
    c.ring_buffer_enabled = true;
    c.ring_buffer_pages = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.ring_buffer_pages = c.capacity_pages;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.ring_buffer_enabled = false;
    c.ring_buffer_pages = 0;  // ignored while disabled
    CHECK_NOTHROW(c.validate());

    c = {};
    c.background_writer_pages_per_tick = -0.1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.background_writer_pages_per_tick = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(c.validate(), ValidationError);

    c = {};
    c.scantrack.group_size = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.scantrack.ewma_alpha = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.policy_config.max_draws = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.cost_model.rand_read_us = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("a pool larger than the working set only cold-misses") {
    NamedTrace t = point_trace("pt", 10, 100, 0.0, 0.0, 3);
    SimConfig cfg;
    cfg.capacity_pages = 16;

    RunReport r = run_simulation(t, cfg);
    CHECK(r.metrics.requests == 100);
    CHECK(r.metrics.hits == 90);
    CHECK(r.metrics.rand_misses == 10);
    CHECK(r.metrics.seq_misses == 0);
    CHECK(r.metrics.dirty_evictions == 0);
    CHECK(r.hit_rate == 0.9);
    check_conservation(r);

    CHECK(r.trace_id == "pt");
    CHECK(r.config == cfg);
    CHECK(r.run_seed == derive_run_seed(cfg.seed, "pt", "clock"));
    CHECK(r.hit_rate == r.metrics.hit_rate());
    CHECK(r.avg_io_wait_us == r.metrics.avg_io_wait_us());
    CHECK(r.latency_score == r.metrics.latency_score());
    CHECK(r.wall_time_ms >= 0.0);
}

TEST_CASE("runs are deterministic apart from wall time") {
    NamedTrace t = point_trace("det", 64, 2000, 0.9, 0.4, 5);
    SimConfig cfg;
    cfg.capacity_pages = 16;
    cfg.policy = "evolved";

    RunReport a = run_simulation(t, cfg);
    RunReport b = run_simulation(t, cfg);
    CHECK(a.metrics == b.metrics);
    CHECK(to_json(a, false) == to_json(b, false));
    check_conservation(a);
}

TEST_CASE("every policy completes an eviction-heavy mixed run") {
    ScanWorkloadParams sp;
    sp.relation_blocks = 128;
    sp.num_streams = 2;
    sp.seed = 31;
    PointWorkloadParams pp;
    pp.relation_blocks = 128;
    pp.num_requests = 256;
    pp.zipf_s = 0.9;
    pp.write_fraction = 0.4;
    pp.seed = 32;
    NamedTrace t{"mx", generate_mixed_workload(sp, pp, 0.5, 33)};

    for (std::string policy : {"clock", "pbm-sampling", "evolved", "belady"}) {
        SimConfig cfg;
        cfg.capacity_pages = 32;
        cfg.policy = policy;
        RunReport r = run_simulation(t, cfg);
        CHECK(r.metrics.requests == t.trace.requests.size());
        check_conservation(r);
    }
}

TEST_CASE("belady achieves the best hit rate on a thrashing scan mix") {
    NamedTrace t = scan_trace("sc", 256, 2, 2, 41);
    SimConfig cfg;
    cfg.capacity_pages = 64;
    cfg.pin_hold_window = 0;

    ComparisonReport rep =
        compare_policies({t}, {"clock", "pbm-sampling", "evolved", "belady"}, cfg);
    REQUIRE(rep.runs.size() == 4);

    double belady_rate = -1.0;
    for (const PolicySummary& s : rep.ranking) {
        if (s.policy == "belady") belady_rate = s.mean_hit_rate;
    }
    REQUIRE(belady_rate >= 0.0);
    for (const PolicySummary& s : rep.ranking) {
        CHECK(belady_rate >= s.mean_hit_rate);
    }
}

TEST_CASE("comparison reports are merged trace-major in input order") {
    NamedTrace t1 = point_trace("t1", 32, 300, 0.7, 0.2, 1);
    NamedTrace t2 = point_trace("t2", 32, 300, 0.7, 0.2, 2);
    SimConfig cfg;
    cfg.capacity_pages = 8;

    ComparisonReport rep = compare_policies({t1, t2}, {"clock", "evolved"}, cfg);
    REQUIRE(rep.runs.size() == 4);
    CHECK(rep.runs[0].trace_id == "t1");
    CHECK(rep.runs[0].config.policy == "clock");
    CHECK(rep.runs[1].trace_id == "t1");
    CHECK(rep.runs[1].config.policy == "evolved");
    CHECK(rep.runs[2].trace_id == "t2");
    CHECK(rep.runs[2].config.policy == "clock");
    CHECK(rep.runs[3].trace_id == "t2");
    CHECK(rep.runs[3].config.policy == "evolved");

    // Ranking is sorted by mean latency score, descending.
    REQUIRE(rep.ranking.size() == 2);
    CHECK(rep.ranking[0].mean_latency_score >= rep.ranking[1].mean_latency_score);

    // One delta per ordered pair, consistent with the ranking.
    REQUIRE(rep.deltas.size() == 1);
    CHECK(rep.deltas[0].policy_a == rep.ranking[0].policy);
    CHECK(rep.deltas[0].policy_b == rep.ranking[1].policy);
    CHECK(rep.deltas[0].hit_rate_delta ==
          doctest::Approx(rep.ranking[0].mean_hit_rate - rep.ranking[1].mean_hit_rate));
    CHECK(rep.deltas[0].latency_score_delta ==
          doctest::Approx(rep.ranking[0].mean_latency_score - rep.ranking[1].mean_latency_score));

    // Summaries are true means over each policy's runs.
    for (const PolicySummary& s : rep.ranking) {
        double rate = 0.0;
        for (const RunReport& r : rep.runs) {
            if (r.config.policy == s.policy) rate += r.hit_rate / 2.0;
        }
        CHECK(s.mean_hit_rate == doctest::Approx(rate));
    }
}

TEST_CASE("a single-policy comparison has a one-entry ranking and no deltas") {
    NamedTrace t = point_trace("solo", 16, 100, 0.0, 0.0, 9);
    SimConfig cfg;
    cfg.capacity_pages = 8;

    ComparisonReport rep = compare_policies({t}, {"clock"}, cfg);
    CHECK(rep.runs.size() == 1);
    REQUIRE(rep.ranking.size() == 1);
    CHECK(rep.ranking[0].policy == "clock");
    CHECK(rep.deltas.empty());
}

TEST_CASE("adding a policy to a comparison never perturbs existing runs") {
    NamedTrace t = point_trace("stable", 64, 1500, 0.8, 0.3, 11);
    SimConfig cfg;
    cfg.capacity_pages = 16;

    ComparisonReport solo = compare_policies({t}, {"pbm-sampling"}, cfg);
    ComparisonReport both = compare_policies({t}, {"pbm-sampling", "belady"}, cfg);
    CHECK(solo.runs[0].metrics == both.runs[0].metrics);
    CHECK(solo.runs[0].run_seed == both.runs[0].run_seed);
}

TEST_CASE("comparison input validation") {
    NamedTrace t = point_trace("v", 8, 10, 0.0, 0.0, 1);
    SimConfig cfg;

    CHECK_THROWS_AS(compare_policies({}, {"clock"}, cfg), ValidationError);
    CHECK_THROWS_AS(compare_policies({t}, {}, cfg), ValidationError);
    CHECK_THROWS_AS(compare_policies({t}, {"clock", "clock"}, cfg), ValidationError);

    try {
        compare_policies({t}, {"clock", "lfu"}, cfg);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("lfu") != std::string::npos);
    }
}

TEST_CASE("failures inside a comparison are tagged with trace and policy") {
    NamedTrace t = abc_trace();
    SimConfig cfg;
    cfg.capacity_pages = 2;
    cfg.pin_hold_window = 2;  // pins both slots; the third page cannot land

    try {
        compare_policies({t}, {"clock"}, cfg);
        FAIL("expected NoVictimError");
    } catch (const NoVictimError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[trace abc, policy clock]") != std::string::npos);
    }
}

TEST_CASE("pin holds can exhaust a tiny pool") {
    NamedTrace t = abc_trace();
    SimConfig cfg;
    cfg.capacity_pages = 2;

    cfg.pin_hold_window = 2;
    CHECK_THROWS_AS(run_simulation(t, cfg), NoVictimError);

    cfg.pin_hold_window = 1;
    RunReport r = run_simulation(t, cfg);
    CHECK(r.metrics.requests == 6);
    check_conservation(r);

    cfg.pin_hold_window = 0;
    CHECK_NOTHROW(run_simulation(t, cfg));
}

TEST_CASE("ring buffer and background writer toggles all complete") {
    ScanWorkloadParams sp;
    sp.relation_blocks = 256;
    sp.num_streams = 2;
    sp.scans_per_stream = 2;
    sp.seed = 51;
    PointWorkloadParams pp;
    pp.relation_blocks = 256;
    pp.num_requests = 1024;
    pp.zipf_s = 0.9;
    pp.write_fraction = 0.5;
    pp.seed = 52;
    NamedTrace t{"rich", generate_mixed_workload(sp, pp, 0.5, 53)};

    for (bool ring : {false, true}) {
        for (bool writer : {false, true}) {
            SimConfig cfg;
            cfg.capacity_pages = 64;
            cfg.policy = "evolved";
            cfg.ring_buffer_enabled = ring;
            cfg.ring_buffer_pages = 8;
            cfg.background_writer_enabled = writer;
            cfg.background_writer_pages_per_tick = writer ? 0.5 : 0.0;

            RunReport r = run_simulation(t, cfg);
            CHECK(r.metrics.requests == t.trace.requests.size());
            check_conservation(r);
            CHECK(to_json(run_simulation(t, cfg), false) == to_json(r, false));
        }
    }
}

TEST_CASE("the background writer absorbs writebacks off the eviction path") {
    NamedTrace t = point_trace("wr", 64, 2000, 0.6, 0.8, 13);
    SimConfig cfg;
    cfg.capacity_pages = 16;

    RunReport without = run_simulation(t, cfg);
    cfg.background_writer_enabled = true;
    cfg.background_writer_pages_per_tick = 1.0;
    RunReport with = run_simulation(t, cfg);

    CHECK(without.metrics.dirty_evictions > 0);
    CHECK(with.metrics.dirty_evictions < without.metrics.dirty_evictions);
    check_conservation(with);
}

TEST_CASE("an empty trace yields an all-zero report") {
    NamedTrace t{"empty", Trace{}};
    SimConfig cfg;
    RunReport r = run_simulation(t, cfg);
    CHECK(r.metrics == RunMetrics{});
    CHECK(r.hit_rate == 0.0);
    CHECK(r.latency_score == 1000.0);
}

TEST_CASE("a scan starting mid-relation registers its remaining span") {
    Trace trace;
    trace.relations[0] = 10;
    for (std::uint64_t i = 0; i < 5; ++i) {
        PageRequest r = make_request(i, {0, static_cast<BlockNumber>(5 + i)}, OpKind::kRead,
                                     AccessPattern::kSequential);
        r.scan = 0;
        trace.requests.push_back(r);
    }
    SimConfig cfg;
    cfg.capacity_pages = 4;
    RunReport rep = run_simulation({"tail", std::move(trace)}, cfg);
    CHECK(rep.metrics.requests == 5);
    CHECK(rep.metrics.seq_misses == 5);
}

TEST_CASE("run reports round-trip through JSON") {
    NamedTrace t = point_trace("json", 32, 500, 0.8, 0.3, 7);
    SimConfig cfg;
    cfg.capacity_pages = 8;
    cfg.policy = "evolved";

    RunReport r = run_simulation(t, cfg);
    CHECK(run_report_from_json(to_json(r)) == r);

    RunReport no_wall = run_report_from_json(to_json(r, false));
    CHECK(no_wall.wall_time_ms == 0.0);
    no_wall.wall_time_ms = r.wall_time_ms;
    CHECK(no_wall == r);
}

TEST_CASE("comparison reports round-trip through JSON") {
    NamedTrace t = point_trace("cmp", 32, 400, 0.8, 0.3, 8);
    SimConfig cfg;
    cfg.capacity_pages = 8;

    ComparisonReport rep = compare_policies({t}, {"clock", "evolved", "belady"}, cfg);
    CHECK(comparison_report_from_json(to_json(rep)) == rep);

    const std::string text = to_json(rep, false);
    CHECK(comparison_report_from_json(text) ==
          comparison_report_from_json(to_json(compare_policies(
              {t}, {"clock", "evolved", "belady"}, cfg), false)));
}

TEST_CASE("report JSON carries the full flat config including infinities") {
    NamedTrace t = point_trace("inf", 8, 20, 0.0, 0.0, 2);
    SimConfig cfg;
    cfg.capacity_pages = 4;
    RunReport r = run_simulation(t, cfg);

    const std::string text = to_json(r);
    // The default sentinel is +infinity, which JSON spells as a string.
    CHECK(text.find("\"dirty_score_for_not_requested\": \"inf\"") != std::string::npos);
    CHECK(run_report_from_json(text).config.policy_config.dirty_score_for_not_requested ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("malformed or truncated report JSON is rejected") {
    CHECK_THROWS_AS(run_report_from_json("not json"), ValidationError);
    CHECK_THROWS_AS(run_report_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(comparison_report_from_json("[1, 2"), ValidationError);
    CHECK_THROWS_AS(comparison_report_from_json(R"({"runs": []})"), ValidationError);
}

TEST_CASE("metrics_csv emits one row per run under a fixed header") {
    RunReport r;
    r.trace_id = "t1";
    r.config.policy = "clock";
    r.run_seed = 7;
    r.metrics.requests = 4;
    r.metrics.hits = 1;
    r.metrics.seq_misses = 1;
    r.metrics.rand_misses = 2;
    r.metrics.dirty_evictions = 1;
    r.metrics.total_io_wait_us = 420.0;
    r.hit_rate = 0.25;
    r.avg_io_wait_us = 105.0;
    r.latency_score = 12.5;

    const std::string header =
        "trace,policy,seed,requests,hits,seq_misses,rand_misses,dirty_evictions,"
        "total_io_wait_us,hit_rate,avg_io_wait_us,latency_score\n";
    const std::string row = "t1,clock,7,4,1,1,2,1,420,0.25,105,12.5\n";
    CHECK(metrics_csv(r) == header + row);

    ComparisonReport rep;
    rep.runs = {r, r};
    CHECK(metrics_csv(rep) == header + row + row);
}

TEST_CASE("config files parse the full flat key set") {
    std::istringstream in(
        "# simulator settings\n"
        "capacity_pages = 128\n"
        "policy = evolved\n"
        "seed = 9\n"
        "\n"
        "pin_hold_window = 3\n"
        "ring_buffer_enabled = true\n"
        "ring_buffer_pages = 16\n"
        "background_writer_enabled = 1\n"
        "background_writer_pages_per_tick = 0.25\n"
        "sample_size_pbm = 10\n"
        "sample_size_evolved = 15\n"
        "fast_path_probes = 2\n"
        "clean_bonus = 32\n"
        "cold_bonus = 16\n"
        "dirty_score_for_not_requested = inf\n"
        "max_draws = 64\n"
        "seq_read_us = 10\n"
        "rand_read_us = 50\n"
        "dirty_writeback_us = 120\n"
        "hit_us = 0.5\n"
        "page_size_bytes = 4096\n"
        "group_size = 64\n"
        "ewma_alpha = 0.5\n"
        "per_group_estimates = true\n");
    SimConfig c = parse_config(in);

    CHECK(c.capacity_pages == 128);
    CHECK(c.policy == "evolved");
    CHECK(c.seed == 9);
    CHECK(c.pin_hold_window == 3);
    CHECK(c.ring_buffer_enabled);
    CHECK(c.ring_buffer_pages == 16);
    CHECK(c.background_writer_enabled);
    CHECK(c.background_writer_pages_per_tick == 0.25);
    CHECK(c.policy_config.sample_size_pbm == 10);
    CHECK(c.policy_config.sample_size_evolved == 15);
    CHECK(c.policy_config.fast_path_probes == 2);
    CHECK(c.policy_config.clean_bonus == 32.0);
    CHECK(c.policy_config.cold_bonus == 16.0);
    CHECK(c.policy_config.dirty_score_for_not_requested ==
          std::numeric_limits<double>::infinity());
    CHECK(c.policy_config.max_draws == 64);
    CHECK(c.cost_model.seq_read_us == 10.0);
    CHECK(c.cost_model.rand_read_us == 50.0);
    CHECK(c.cost_model.dirty_writeback_us == 120.0);
    CHECK(c.cost_model.hit_us == 0.5);
    CHECK(c.cost_model.page_size_bytes == 4096);
    CHECK(c.scantrack.group_size == 64);
    CHECK(c.scantrack.ewma_alpha == 0.5);
    CHECK(c.scantrack.per_group_estimates);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("an empty config keeps every default") {
    std::istringstream in("\n# nothing here\n");
    CHECK(parse_config(in) == SimConfig{});
}

TEST_CASE("config parsing rejects bad lines with their line number") {
    auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_config(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };

    CHECK(line_of("capacity_pages = 4\nwat = 9\n") == 2);       // unknown key
    CHECK(line_of("capacity_pages\n") == 1);                    // missing '='
    CHECK(line_of("ring_buffer_enabled = maybe\n") == 1);       // bad bool
    CHECK(line_of("capacity_pages = four\n") == 1);             // bad integer
    CHECK(line_of("ewma_alpha = fast\n") == 1);                 // bad double
    CHECK(line_of("capacity_pages = -3\n") == 1);               // negative

    CHECK_THROWS_AS(parse_config_file("/nonexistent/bufsim.conf"), ValidationError);
}
