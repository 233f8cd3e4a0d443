#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace bufsim {

using RelationId = std::uint32_t;
using BlockNumber = std::uint32_t;
using ScanId = std::uint32_t;
using StreamId = std::uint32_t;
using Tick = std::uint64_t;

/// (relation, block) uniquely identifies a disk page.
struct PageTag {
    RelationId relation = 0;
    BlockNumber block = 0;

    friend bool operator==(const PageTag&, const PageTag&) = default;
    friend auto operator<=>(const PageTag&, const PageTag&) = default;
};

struct PageTagHash {
    std::size_t operator()(const PageTag& t) const noexcept {
        std::uint64_t z = (static_cast<std::uint64_t>(t.relation) << 32) | t.block;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

enum class OpKind : std::uint8_t { kRead, kWrite };
enum class AccessPattern : std::uint8_t { kSequential, kRandom };

/// One trace event. `scan` is present only for sequential requests that
/// belong to a registered scan; random requests never carry a scan id.
struct PageRequest {
    std::uint64_t seq = 0;
    PageTag tag;
    OpKind op = OpKind::kRead;
    AccessPattern access = AccessPattern::kRandom;
    std::optional<ScanId> scan;
    StreamId stream = 0;

    friend bool operator==(const PageRequest&, const PageRequest&) = default;
};

/// A replayable workload: ordered requests plus declared relation lengths.
/// Immutable after construction; safe to share read-only across simulations.
struct Trace {
    std::vector<PageRequest> requests;
    std::map<RelationId, std::uint64_t> relations;  // relation -> length in blocks

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct ScanWorkloadParams {
    std::uint32_t num_relations = 1;
    std::uint32_t relation_blocks = 1024;
    std::uint32_t num_streams = 1;
    std::uint32_t scans_per_stream = 1;
    std::uint64_t seed = 1;
};

struct PointWorkloadParams {
    std::uint32_t relation_blocks = 1024;
    std::uint64_t num_requests = 0;
    double zipf_s = 0.0;
    double write_fraction = 0.0;
    std::uint64_t seed = 1;
};

/// Full sequential sweeps of randomly chosen relations, one scan id per
/// (stream, sweep), streams round-robin interleaved. All reads.
Trace generate_scan_workload(const ScanWorkloadParams& params);

/// Random point lookups over a single relation, blocks drawn from Zipf(s)
/// (s = 0 is uniform), each request a write with probability write_fraction.
Trace generate_point_workload(const PointWorkloadParams& params);

/// Interleaves the two generators so the sequential-scan share of requests is
/// within 1% of `ratio`; seq is renumbered globally. At ratio 1 (or 0) the
/// result is exactly the scan (or point) trace. When both sides contribute,
/// point relation and stream ids are shifted past the scan trace's ranges.
Trace generate_mixed_workload(const ScanWorkloadParams& scan_params,
                              const PointWorkloadParams& point_params,
                              double ratio,
                              std::uint64_t seed);

/// CSV trace format. `#relation,<id>,<blocks>` metadata lines, then the
/// header `seq,stream,relation,block,op,access,scan`, then one row per
/// request (op R|W, access SEQ|RAND, scan empty when absent).
void write_trace(const Trace& trace, std::ostream& out);
void write_trace_file(const Trace& trace, const std::filesystem::path& path);

/// Parses and validates a trace. Throws ParseError (with line number) on
/// malformed input and ValidationError on semantic violations such as a
/// block at or beyond its declared relation length.
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::filesystem::path& path);

/// Checks the Trace invariants: seq values 0,1,2,... without gaps, every
/// block within its declared relation, no scan id on random accesses.
void validate_trace(const Trace& trace);

/// Number of distinct pages touched (the data footprint, in pages).
std::uint64_t distinct_page_count(const Trace& trace);

}  // namespace bufsim
