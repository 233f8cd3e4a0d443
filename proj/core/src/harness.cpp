#include "bufsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "bufsim/errors.hpp"
#include "bufsim/rng.hpp"

namespace bufsim {

namespace {

using nlohmann::json;  // std::map backing keeps keys sorted

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

/// JSON has no infinity literal; the sentinel score round-trips as "inf".
json json_double(double v) {
    if (std::isinf(v)) {
        return json(v > 0 ? "inf" : "-inf");
    }
    return json(v);
}

double double_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        throw ValidationError("bad numeric string '" + s + "'");
    }
    return j.get<double>();
}

/// A scan's private slots, reused round-robin once fully claimed.
struct RingBuffer {
    std::vector<std::size_t> slots;
    std::size_t cursor = 0;
};

struct BackgroundWriter {
    double credit = 0.0;

    /// Clears dirty flags on up to `rate` pages (fractional rates carry
    /// over), oldest last_access first. These writes cost nothing: the
    /// point of the writer is hiding writeback latency.
    void tick(CacheState& state, double rate) {
        credit += rate;
        while (credit >= 1.0) {
            credit -= 1.0;
            std::optional<std::size_t> oldest;
            for (std::size_t i = 0; i < state.capacity(); ++i) {
                const BufferDescriptor& d = state.slot(i);
                if (!d.tag || !d.is_dirty || d.refcount != 0) {
                    continue;
                }
                if (!oldest || d.last_access < state.slot(*oldest).last_access) {
                    oldest = i;
                }
            }
            if (!oldest) {
                break;
            }
            state.slot(*oldest).is_dirty = false;
        }
    }
};

/// Keeps each stream's pin_hold_window most recent pages pinned.
class PinHolder {
public:
    PinHolder(CacheState& state, std::uint32_t window) : state_(state), window_(window) {}

    ~PinHolder() {
        for (auto& [stream, slots] : held_) {
            for (std::size_t s : slots) {
                state_.unpin(s);
            }
        }
    }

    void note_access(StreamId stream, std::size_t slot) {
        if (window_ == 0) {
            return;
        }
        auto& slots = held_[stream];
        state_.pin(slot);
        slots.push_back(slot);
        if (slots.size() > window_) {
            state_.unpin(slots.front());
            slots.pop_front();
        }
    }

private:
    CacheState& state_;
    std::uint32_t window_;
    std::unordered_map<StreamId, std::deque<std::size_t>> held_;
};

}  // namespace

void SimConfig::validate() const {
    if (capacity_pages == 0) {
        throw ValidationError("capacity_pages must be at least 1");
    }
    if (ring_buffer_enabled) {
        if (ring_buffer_pages == 0) {
            throw ValidationError("ring_buffer_pages must be at least 1 when enabled");
        }
        if (ring_buffer_pages >= capacity_pages) {
            throw ValidationError("ring_buffer_pages must be smaller than capacity_pages");
        }
    }
    if (!(background_writer_pages_per_tick >= 0.0) ||
        !std::isfinite(background_writer_pages_per_tick)) {
        throw ValidationError("background_writer_pages_per_tick must be finite and non-negative");
    }
    if (scantrack.group_size == 0) {
        throw ValidationError("group_size must be at least 1");
    }
    if (!(scantrack.ewma_alpha > 0.0) || scantrack.ewma_alpha > 1.0) {
        throw ValidationError("ewma_alpha must be in (0, 1]");
    }
    policy_config.validate();
    cost_model.validate();
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::string_view trace_id,
                              std::string_view policy_name) {
    return mix_seed(mix_seed(master_seed, fnv1a(trace_id)), fnv1a(policy_name));
}

RunReport run_simulation(const NamedTrace& named, const SimConfig& config) {
    config.validate();
    validate_trace(named.trace);
    const Trace& trace = named.trace;

    auto policy = make_policy(config.policy, config.policy_config, &trace);
    CacheState state(config.capacity_pages);
    ScanRegistry registry(config.scantrack);
    const std::uint64_t run_seed = derive_run_seed(config.seed, named.id, config.policy);
    SplitMix64 rng(run_seed);
    RunMetrics metrics;
    PinHolder pins(state, config.pin_hold_window);
    BackgroundWriter writer;
    std::unordered_map<ScanId, RingBuffer> rings;

    const auto started = std::chrono::steady_clock::now();
    for (const PageRequest& r : trace.requests) {
        RingBuffer* ring = nullptr;
        if (r.scan) {
            if (!registry.contains(*r.scan)) {
                const std::uint64_t relation_len = trace.relations.at(r.tag.relation);
                registry.register_scan(*r.scan, r.tag.relation, r.tag.block,
                                       relation_len - r.tag.block, r.seq);
                if (config.ring_buffer_enabled &&
                    relation_len > static_cast<double>(config.capacity_pages) / 4.0) {
                    rings.emplace(*r.scan, RingBuffer{});
                }
            } else if (registry.is_active(*r.scan)) {
                registry.advance_scan(*r.scan, r.tag.block, r.seq);
            }
            if (auto it = rings.find(*r.scan); it != rings.end()) {
                ring = &it->second;
            }
        }

        AccessOutcome outcome;
        if (auto hit = state.lookup(r.tag)) {
            outcome = state.record_hit(*hit, r, &registry);
        } else {
            bool served = false;
            if (ring && ring->slots.size() >= config.ring_buffer_pages) {
                // Reuse this scan's own slots round-robin, skipping any that
                // are momentarily pinned; all pinned falls back to the policy.
                for (std::size_t tries = 0; tries < ring->slots.size(); ++tries) {
                    const std::size_t slot = ring->slots[ring->cursor];
                    ring->cursor = (ring->cursor + 1) % ring->slots.size();
                    if (state.slot(slot).refcount == 0) {
                        outcome = state.evict_into(slot, r, &registry);
                        served = true;
                        break;
                    }
                }
            }
            if (!served) {
                if (auto filled = state.fill_empty_slot(r, &registry)) {
                    outcome = *filled;
                } else {
                    EvictionContext ctx{&registry, &rng, r.seq};
                    const std::size_t victim = policy->select_victim(state, ctx);
                    outcome = state.evict_into(victim, r, &registry);
                }
                if (ring && ring->slots.size() < config.ring_buffer_pages) {
                    ring->slots.push_back(outcome.slot);
                }
            }
        }

        pins.note_access(r.stream, outcome.slot);
        metrics.accumulate(outcome, config.cost_model);
        if (r.scan && !registry.is_active(*r.scan)) {
            rings.erase(*r.scan);
        }
        if (config.background_writer_enabled) {
            writer.tick(state, config.background_writer_pages_per_tick);
        }
    }
    const auto finished = std::chrono::steady_clock::now();

    RunReport report;
    report.config = config;
    report.trace_id = named.id;
    report.run_seed = run_seed;
    report.metrics = metrics;
    report.hit_rate = metrics.hit_rate();
    report.avg_io_wait_us = metrics.avg_io_wait_us();
    report.latency_score = metrics.latency_score();
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(finished - started).count();
    return report;
}

namespace {

/// Runs the cross product on a small pool, storing results by job index so
/// output order never depends on scheduling. The first failing job (in job
/// order) wins; its error is tagged with (trace, policy).
std::vector<RunReport> run_matrix(const std::vector<NamedTrace>& traces,
                                  const std::vector<std::string>& policies,
                                  const SimConfig& base) {
    struct Job {
        const NamedTrace* trace;
        const std::string* policy;
    };
    std::vector<Job> jobs;
    jobs.reserve(traces.size() * policies.size());
    for (const NamedTrace& t : traces) {
        for (const std::string& p : policies) {
            jobs.push_back({&t, &p});
        }
    }

    std::vector<RunReport> reports(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::min(jobs.size(), static_cast<std::size_t>(
                                  std::max(1u, std::thread::hardware_concurrency())));

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            SimConfig cfg = base;
            cfg.policy = *jobs[i].policy;
            try {
                reports[i] = run_simulation(*jobs[i].trace, cfg);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (std::thread& t : pool) {
        t.join();
    }

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!failures[i]) {
            continue;
        }
        const std::string tag =
            "[trace " + jobs[i].trace->id + ", policy " + *jobs[i].policy + "] ";
        try {
            std::rethrow_exception(failures[i]);
        } catch (const PolicyContractViolation& e) {
            throw PolicyContractViolation(tag + e.what());
        } catch (const NoVictimError& e) {
            throw NoVictimError(tag + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(tag + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(tag + e.what());
        }
    }
    return reports;
}

}  // namespace

ComparisonReport compare_policies(const std::vector<NamedTrace>& traces,
                                  const std::vector<std::string>& policies,
                                  const SimConfig& base_config) {
    if (traces.empty()) {
        throw ValidationError("compare_policies needs at least one trace");
    }
    if (policies.empty()) {
        throw ValidationError("compare_policies needs at least one policy");
    }
    for (std::size_t i = 0; i < policies.size(); ++i) {
        for (std::size_t j = i + 1; j < policies.size(); ++j) {
            if (policies[i] == policies[j]) {
                throw ValidationError("duplicate policy '" + policies[i] + "' in comparison");
            }
        }
    }
    {
        SimConfig probe = base_config;
        for (const std::string& p : policies) {
            probe.policy = p;
            probe.validate();
            if (std::find(kPolicyNames.begin(), kPolicyNames.end(), p) == kPolicyNames.end()) {
                make_policy(p, probe.policy_config, nullptr);  // throws with the valid list
            }
        }
    }

    ComparisonReport report;
    report.runs = run_matrix(traces, policies, base_config);

    for (const std::string& p : policies) {
        PolicySummary s;
        s.policy = p;
        std::size_t n = 0;
        for (const RunReport& r : report.runs) {
            if (r.config.policy == p) {
                s.mean_hit_rate += r.hit_rate;
                s.mean_latency_score += r.latency_score;
                ++n;
            }
        }
        s.mean_hit_rate /= static_cast<double>(n);
        s.mean_latency_score /= static_cast<double>(n);
        report.ranking.push_back(s);
    }
    std::sort(report.ranking.begin(), report.ranking.end(),
              [](const PolicySummary& a, const PolicySummary& b) {
                  if (a.mean_latency_score != b.mean_latency_score) {
                      return a.mean_latency_score > b.mean_latency_score;
                  }
                  return a.policy < b.policy;
              });

    for (std::size_t i = 0; i < report.ranking.size(); ++i) {
        for (std::size_t j = i + 1; j < report.ranking.size(); ++j) {
            const PolicySummary& a = report.ranking[i];
            const PolicySummary& b = report.ranking[j];
            report.deltas.push_back({a.policy, b.policy, a.mean_hit_rate - b.mean_hit_rate,
                                     a.mean_latency_score - b.mean_latency_score});
        }
    }
    return report;
}

namespace {

json config_to_json(const SimConfig& c) {
    json j;
    j["capacity_pages"] = c.capacity_pages;
    j["policy"] = c.policy;
    j["seed"] = c.seed;
    j["pin_hold_window"] = c.pin_hold_window;
    j["ring_buffer_enabled"] = c.ring_buffer_enabled;
    j["ring_buffer_pages"] = c.ring_buffer_pages;
    j["background_writer_enabled"] = c.background_writer_enabled;
    j["background_writer_pages_per_tick"] = c.background_writer_pages_per_tick;
    j["sample_size_pbm"] = c.policy_config.sample_size_pbm;
    j["sample_size_evolved"] = c.policy_config.sample_size_evolved;
    j["fast_path_probes"] = c.policy_config.fast_path_probes;
    j["clean_bonus"] = c.policy_config.clean_bonus;
    j["cold_bonus"] = c.policy_config.cold_bonus;
    j["dirty_score_for_not_requested"] =
        json_double(c.policy_config.dirty_score_for_not_requested);
    j["max_draws"] = c.policy_config.max_draws;
    j["seq_read_us"] = c.cost_model.seq_read_us;
    j["rand_read_us"] = c.cost_model.rand_read_us;
    j["dirty_writeback_us"] = c.cost_model.dirty_writeback_us;
    j["hit_us"] = c.cost_model.hit_us;
    j["page_size_bytes"] = c.cost_model.page_size_bytes;
    j["group_size"] = c.scantrack.group_size;
    j["ewma_alpha"] = c.scantrack.ewma_alpha;
    j["per_group_estimates"] = c.scantrack.per_group_estimates;
    return j;
}

SimConfig config_from_json(const json& j) {
    SimConfig c;
    c.capacity_pages = j.at("capacity_pages").get<std::size_t>();
    c.policy = j.at("policy").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.pin_hold_window = j.at("pin_hold_window").get<std::uint32_t>();
    c.ring_buffer_enabled = j.at("ring_buffer_enabled").get<bool>();
    c.ring_buffer_pages = j.at("ring_buffer_pages").get<std::size_t>();
    c.background_writer_enabled = j.at("background_writer_enabled").get<bool>();
    c.background_writer_pages_per_tick =
        j.at("background_writer_pages_per_tick").get<double>();
    c.policy_config.sample_size_pbm = j.at("sample_size_pbm").get<std::uint32_t>();
    c.policy_config.sample_size_evolved = j.at("sample_size_evolved").get<std::uint32_t>();
    c.policy_config.fast_path_probes = j.at("fast_path_probes").get<std::uint32_t>();
    c.policy_config.clean_bonus = j.at("clean_bonus").get<double>();
    c.policy_config.cold_bonus = j.at("cold_bonus").get<double>();
    c.policy_config.dirty_score_for_not_requested =
        double_from_json(j.at("dirty_score_for_not_requested"));
    c.policy_config.max_draws = j.at("max_draws").get<std::uint32_t>();
    c.cost_model.seq_read_us = j.at("seq_read_us").get<double>();
    c.cost_model.rand_read_us = j.at("rand_read_us").get<double>();
    c.cost_model.dirty_writeback_us = j.at("dirty_writeback_us").get<double>();
    c.cost_model.hit_us = j.at("hit_us").get<double>();
    c.cost_model.page_size_bytes = j.at("page_size_bytes").get<std::uint64_t>();
    c.scantrack.group_size = j.at("group_size").get<std::uint32_t>();
    c.scantrack.ewma_alpha = j.at("ewma_alpha").get<double>();
    c.scantrack.per_group_estimates = j.at("per_group_estimates").get<bool>();
    return c;
}

json run_to_json(const RunReport& r, bool include_wall_time) {
    json j;
    j["config"] = config_to_json(r.config);
    j["trace"] = r.trace_id;
    j["policy"] = r.config.policy;
    j["run_seed"] = r.run_seed;
    j["metrics"] = {
        {"requests", r.metrics.requests},
        {"hits", r.metrics.hits},
        {"seq_misses", r.metrics.seq_misses},
        {"rand_misses", r.metrics.rand_misses},
        {"dirty_evictions", r.metrics.dirty_evictions},
        {"total_io_wait_us", r.metrics.total_io_wait_us},
        {"io_volume_bytes", r.metrics.io_volume_bytes},
    };
    j["derived"] = {
        {"hit_rate", r.hit_rate},
        {"avg_io_wait_us", r.avg_io_wait_us},
        {"latency_score", r.latency_score},
    };
    if (include_wall_time) {
        j["wall_time_ms"] = r.wall_time_ms;
    }
    return j;
}

RunReport run_from_json(const json& j) {
    RunReport r;
    r.config = config_from_json(j.at("config"));
    r.trace_id = j.at("trace").get<std::string>();
    r.run_seed = j.at("run_seed").get<std::uint64_t>();
    const json& m = j.at("metrics");
    r.metrics.requests = m.at("requests").get<std::uint64_t>();
    r.metrics.hits = m.at("hits").get<std::uint64_t>();
    r.metrics.seq_misses = m.at("seq_misses").get<std::uint64_t>();
    r.metrics.rand_misses = m.at("rand_misses").get<std::uint64_t>();
    r.metrics.dirty_evictions = m.at("dirty_evictions").get<std::uint64_t>();
    r.metrics.total_io_wait_us = m.at("total_io_wait_us").get<double>();
    r.metrics.io_volume_bytes = m.at("io_volume_bytes").get<std::uint64_t>();
    const json& d = j.at("derived");
    r.hit_rate = d.at("hit_rate").get<double>();
    r.avg_io_wait_us = d.at("avg_io_wait_us").get<double>();
    r.latency_score = d.at("latency_score").get<double>();
    r.wall_time_ms = j.value("wall_time_ms", 0.0);
    return r;
}

json comparison_to_json(const ComparisonReport& c, bool include_wall_time) {
    json j;
    j["runs"] = json::array();
    for (const RunReport& r : c.runs) {
        j["runs"].push_back(run_to_json(r, include_wall_time));
    }
    j["ranking"] = json::array();
    for (const PolicySummary& s : c.ranking) {
        j["ranking"].push_back({{"policy", s.policy},
                                {"mean_hit_rate", s.mean_hit_rate},
                                {"mean_latency_score", s.mean_latency_score}});
    }
    j["deltas"] = json::array();
    for (const PairwiseDelta& d : c.deltas) {
        j["deltas"].push_back({{"policy_a", d.policy_a},
                               {"policy_b", d.policy_b},
                               {"hit_rate_delta", d.hit_rate_delta},
                               {"latency_score_delta", d.latency_score_delta}});
    }
    return j;
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ValidationError("malformed report JSON");
    }
    return j;
}

}  // namespace

std::string to_json(const RunReport& report, bool include_wall_time) {
    return run_to_json(report, include_wall_time).dump(2) + "\n";
}

std::string to_json(const ComparisonReport& report, bool include_wall_time) {
    return comparison_to_json(report, include_wall_time).dump(2) + "\n";
}

RunReport run_report_from_json(const std::string& text) {
    try {
        return run_from_json(parse_json(text));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad run report: ") + e.what());
    }
}

ComparisonReport comparison_report_from_json(const std::string& text) {
    try {
        const json j = parse_json(text);
        ComparisonReport c;
        for (const json& r : j.at("runs")) {
            c.runs.push_back(run_from_json(r));
        }
        for (const json& s : j.at("ranking")) {
            c.ranking.push_back({s.at("policy").get<std::string>(),
                                 s.at("mean_hit_rate").get<double>(),
                                 s.at("mean_latency_score").get<double>()});
        }
        for (const json& d : j.at("deltas")) {
            c.deltas.push_back({d.at("policy_a").get<std::string>(),
                                d.at("policy_b").get<std::string>(),
                                d.at("hit_rate_delta").get<double>(),
                                d.at("latency_score_delta").get<double>()});
        }
        return c;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad comparison report: ") + e.what());
    }
}

namespace {

constexpr std::string_view kCsvHeader =
    "trace,policy,seed,requests,hits,seq_misses,rand_misses,dirty_evictions,"
    "total_io_wait_us,hit_rate,avg_io_wait_us,latency_score";

void append_csv_row(std::string& out, const RunReport& r) {
    out += r.trace_id;
    out += ',';
    out += r.config.policy;
    out += ',';
    out += std::to_string(r.run_seed);
    out += ',';
    out += std::to_string(r.metrics.requests);
    out += ',';
    out += std::to_string(r.metrics.hits);
    out += ',';
    out += std::to_string(r.metrics.seq_misses);
    out += ',';
    out += std::to_string(r.metrics.rand_misses);
    out += ',';
    out += std::to_string(r.metrics.dirty_evictions);
    out += ',';
    out += format_double(r.metrics.total_io_wait_us);
    out += ',';
    out += format_double(r.hit_rate);
    out += ',';
    out += format_double(r.avg_io_wait_us);
    out += ',';
    out += format_double(r.latency_score);
    out += '\n';
}

}  // namespace

std::string metrics_csv(const RunReport& report) {
    std::string out{kCsvHeader};
    out += '\n';
    append_csv_row(out, report);
    return out;
}

std::string metrics_csv(const ComparisonReport& report) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const RunReport& r : report.runs) {
        append_csv_row(out, r);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_bool(std::string_view v, std::size_t line) {
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ParseError("expected true/false, got '" + std::string(v) + "'", line);
}

double parse_double(std::string_view v, std::size_t line) {
    if (v == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError("expected a number, got '" + std::string(v) + "'", line);
    }
    return out;
}

template <typename T>
T parse_uint(std::string_view v, std::size_t line) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError("expected a non-negative integer, got '" + std::string(v) + "'", line);
    }
    return out;
}

}  // namespace

SimConfig parse_config(std::istream& in) {
    SimConfig c;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view stripped = trim(raw);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key=value", line);
        }
        const std::string_view key = trim(stripped.substr(0, eq));
        const std::string_view value = trim(stripped.substr(eq + 1));
        if (key == "capacity_pages") {
            c.capacity_pages = parse_uint<std::size_t>(value, line);
        } else if (key == "policy") {
            c.policy = std::string(value);
        } else if (key == "seed") {
            c.seed = parse_uint<std::uint64_t>(value, line);
        } else if (key == "pin_hold_window") {
            c.pin_hold_window = parse_uint<std::uint32_t>(value, line);
        } else if (key == "ring_buffer_enabled") {
            c.ring_buffer_enabled = parse_bool(value, line);
        } else if (key == "ring_buffer_pages") {
            c.ring_buffer_pages = parse_uint<std::size_t>(value, line);
        } else if (key == "background_writer_enabled") {
            c.background_writer_enabled = parse_bool(value, line);
        } else if (key == "background_writer_pages_per_tick") {
            c.background_writer_pages_per_tick = parse_double(value, line);
        } else if (key == "sample_size_pbm") {
            c.policy_config.sample_size_pbm = parse_uint<std::uint32_t>(value, line);
        } else if (key == "sample_size_evolved") {
            c.policy_config.sample_size_evolved = parse_uint<std::uint32_t>(value, line);
        } else if (key == "fast_path_probes") {
            c.policy_config.fast_path_probes = parse_uint<std::uint32_t>(value, line);
        } else if (key == "clean_bonus") {
            c.policy_config.clean_bonus = parse_double(value, line);
        } else if (key == "cold_bonus") {
            c.policy_config.cold_bonus = parse_double(value, line);
        } else if (key == "dirty_score_for_not_requested") {
            c.policy_config.dirty_score_for_not_requested = parse_double(value, line);
        } else if (key == "max_draws") {
            c.policy_config.max_draws = parse_uint<std::uint32_t>(value, line);
        } else if (key == "seq_read_us") {
            c.cost_model.seq_read_us = parse_double(value, line);
        } else if (key == "rand_read_us") {
            c.cost_model.rand_read_us = parse_double(value, line);
        } else if (key == "dirty_writeback_us") {
            c.cost_model.dirty_writeback_us = parse_double(value, line);
        } else if (key == "hit_us") {
            c.cost_model.hit_us = parse_double(value, line);
        } else if (key == "page_size_bytes") {
            c.cost_model.page_size_bytes = parse_uint<std::uint64_t>(value, line);
        } else if (key == "group_size") {
            c.scantrack.group_size = parse_uint<std::uint32_t>(value, line);
        } else if (key == "ewma_alpha") {
            c.scantrack.ewma_alpha = parse_double(value, line);
        } else if (key == "per_group_estimates") {
            c.scantrack.per_group_estimates = parse_bool(value, line);
        } else {
            throw ParseError("unknown config key '" + std::string(key) + "'", line);
        }
    }
    return c;
}

SimConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file: " + path.string());
    }
    return parse_config(in);
}

}  // namespace bufsim
