#include "bufsim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "bufsim/errors.hpp"
#include "bufsim/rng.hpp"

namespace bufsim {

namespace {

constexpr std::string_view kHeader = "seq,stream,relation,block,op,access,scan";

/// Inverse-CDF Zipf sampler over ranks 1..n: P(k) proportional to k^-s.
/// Rank 1 maps to block 0, so low block ids are the hot ones.
class ZipfSampler {
public:
    ZipfSampler(std::uint32_t n, double s) : cdf_(n) {
        double sum = 0.0;
        for (std::uint32_t k = 1; k <= n; ++k) {
            sum += 1.0 / std::pow(static_cast<double>(k), s);
            cdf_[k - 1] = sum;
        }
        for (double& c : cdf_) c /= sum;
        cdf_.back() = 1.0;
    }

    BlockNumber sample(SplitMix64& rng) const {
        double u = rng.next_unit();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return static_cast<BlockNumber>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

}  // namespace

Trace generate_scan_workload(const ScanWorkloadParams& p) {
    if (p.num_relations == 0 || p.relation_blocks == 0 || p.num_streams == 0 ||
        p.scans_per_stream == 0) {
        throw ValidationError("scan workload parameters must all be >= 1");
    }

    SplitMix64 rng(p.seed);
    // Relation choices drawn up front in (stream, sweep) order so the
    // workload is a pure function of the parameters.
    std::vector<RelationId> choice(static_cast<std::size_t>(p.num_streams) * p.scans_per_stream);
    for (auto& rel : choice) rel = static_cast<RelationId>(rng.next_below(p.num_relations));

    Trace trace;
    for (RelationId r = 0; r < p.num_relations; ++r) trace.relations[r] = p.relation_blocks;

    const std::uint64_t per_stream =
        static_cast<std::uint64_t>(p.scans_per_stream) * p.relation_blocks;
    trace.requests.reserve(per_stream * p.num_streams);

    std::uint64_t seq = 0;
    for (std::uint64_t i = 0; i < per_stream; ++i) {
        const std::uint32_t sweep = static_cast<std::uint32_t>(i / p.relation_blocks);
        const BlockNumber block = static_cast<BlockNumber>(i % p.relation_blocks);
        for (StreamId stream = 0; stream < p.num_streams; ++stream) {
            const ScanId scan = stream * p.scans_per_stream + sweep;
            trace.requests.push_back(PageRequest{
                .seq = seq++,
                .tag = {choice[stream * p.scans_per_stream + sweep], block},
                .op = OpKind::kRead,
                .access = AccessPattern::kSequential,
                .scan = scan,
                .stream = stream,
            });
        }
    }
    return trace;
}

Trace generate_point_workload(const PointWorkloadParams& p) {
    if (p.relation_blocks == 0) throw ValidationError("relation_blocks must be >= 1");
    if (p.write_fraction < 0.0 || p.write_fraction > 1.0) {
        throw ValidationError("write_fraction must be in [0, 1]");
    }
    if (p.zipf_s < 0.0) throw ValidationError("zipf_s must be >= 0");

    SplitMix64 rng(p.seed);
    ZipfSampler zipf(p.relation_blocks, p.zipf_s);

    Trace trace;
    trace.relations[0] = p.relation_blocks;
    trace.requests.reserve(p.num_requests);
    for (std::uint64_t i = 0; i < p.num_requests; ++i) {
        const BlockNumber block = zipf.sample(rng);
        const bool write = rng.next_unit() < p.write_fraction;
        trace.requests.push_back(PageRequest{
            .seq = i,
            .tag = {0, block},
            .op = write ? OpKind::kWrite : OpKind::kRead,
            .access = AccessPattern::kRandom,
            .scan = std::nullopt,
            .stream = 0,
        });
    }
    return trace;
}

Trace generate_mixed_workload(const ScanWorkloadParams& scan_params,
                              const PointWorkloadParams& point_params,
                              double ratio,
                              std::uint64_t seed) {
    if (ratio < 0.0 || ratio > 1.0) throw ValidationError("ratio must be in [0, 1]");

    Trace scan_trace = generate_scan_workload(scan_params);
    Trace point_trace = generate_point_workload(point_params);
    const std::uint64_t total_scan = scan_trace.requests.size();
    const std::uint64_t total_point = point_trace.requests.size();

    // Trim one side so the scan share matches `ratio`, keeping as many
    // requests as possible from the other.
    std::uint64_t take_scan = total_scan;
    std::uint64_t take_point = total_point;
    if (ratio == 0.0) {
        take_scan = 0;
    } else if (ratio == 1.0) {
        take_point = 0;
    } else if (static_cast<double>(total_scan) / static_cast<double>(total_scan + total_point) <
               ratio) {
        take_point = std::min<std::uint64_t>(
            total_point,
            static_cast<std::uint64_t>(std::llround(total_scan * (1.0 - ratio) / ratio)));
    } else {
        take_scan = std::min<std::uint64_t>(
            total_scan,
            static_cast<std::uint64_t>(std::llround(total_point * ratio / (1.0 - ratio))));
    }

    if (take_point == 0) {
        scan_trace.requests.resize(take_scan);
        return scan_trace;
    }
    if (take_scan == 0) {
        point_trace.requests.resize(take_point);
        return point_trace;
    }

    // Both sides contribute: shift point relation and stream ids past the
    // scan trace's ranges so the namespaces stay disjoint.
    const RelationId rel_shift = scan_params.num_relations;
    const StreamId stream_shift = scan_params.num_streams;

    Trace trace;
    trace.relations = scan_trace.relations;
    for (const auto& [rel, len] : point_trace.relations) trace.relations[rel + rel_shift] = len;
    trace.requests.reserve(take_scan + take_point);

    SplitMix64 rng(seed);
    std::uint64_t si = 0;
    std::uint64_t pi = 0;
    std::uint64_t seq = 0;
    while (si < take_scan || pi < take_point) {
        const std::uint64_t remaining = (take_scan - si) + (take_point - pi);
        const bool from_scan =
            si < take_scan && (pi >= take_point || rng.next_below(remaining) < take_scan - si);
        PageRequest req = from_scan ? scan_trace.requests[si++] : point_trace.requests[pi++];
        if (!from_scan) {
            req.tag.relation += rel_shift;
            req.stream += stream_shift;
        }
        req.seq = seq++;
        trace.requests.push_back(req);
    }
    return trace;
}

void write_trace(const Trace& trace, std::ostream& out) {
    for (const auto& [rel, len] : trace.relations) {
        out << "#relation," << rel << ',' << len << '\n';
    }
    out << kHeader << '\n';
    for (const PageRequest& r : trace.requests) {
        out << r.seq << ',' << r.stream << ',' << r.tag.relation << ',' << r.tag.block << ','
            << (r.op == OpKind::kWrite ? 'W' : 'R') << ','
            << (r.access == AccessPattern::kSequential ? "SEQ" : "RAND") << ',';
        if (r.scan) out << *r.scan;
        out << '\n';
    }
}

void write_trace_file(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open trace file for writing: " + path.string());
    write_trace(trace, out);
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, std::string_view what) {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError("bad " + std::string(what) + " value '" + std::string(field) + "'",
                         line_no);
    }
    return value;
}

}  // namespace

Trace read_trace(std::istream& in) {
    Trace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (line.front() == '#') {
            std::string_view body(line);
            if (body.starts_with("#relation,")) {
                if (header_seen) throw ParseError("relation metadata after header", line_no);
                auto fields = split_csv(body.substr(1));
                if (fields.size() != 3) throw ParseError("expected #relation,<id>,<blocks>", line_no);
                const auto rel = parse_number<RelationId>(fields[1], line_no, "relation");
                const auto len = parse_number<std::uint64_t>(fields[2], line_no, "blocks");
                if (len == 0) throw ValidationError("line " + std::to_string(line_no) +
                                                    ": relation length must be >= 1");
                if (!trace.relations.emplace(rel, len).second) {
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": duplicate relation " + std::to_string(rel));
                }
            }
            continue;  // other # lines are comments
        }

        if (!header_seen) {
            if (line != kHeader) {
                throw ParseError("expected header '" + std::string(kHeader) + "'", line_no);
            }
            header_seen = true;
            continue;
        }

        auto fields = split_csv(line);
        if (fields.size() != 7) throw ParseError("expected 7 columns", line_no);

        PageRequest req;
        req.seq = parse_number<std::uint64_t>(fields[0], line_no, "seq");
        req.stream = parse_number<StreamId>(fields[1], line_no, "stream");
        req.tag.relation = parse_number<RelationId>(fields[2], line_no, "relation");
        req.tag.block = parse_number<BlockNumber>(fields[3], line_no, "block");

        if (fields[4] == "R") req.op = OpKind::kRead;
        else if (fields[4] == "W") req.op = OpKind::kWrite;
        else throw ParseError("op must be R or W", line_no);

        if (fields[5] == "SEQ") req.access = AccessPattern::kSequential;
        else if (fields[5] == "RAND") req.access = AccessPattern::kRandom;
        else throw ParseError("access must be SEQ or RAND", line_no);

        if (!fields[6].empty()) req.scan = parse_number<ScanId>(fields[6], line_no, "scan");

        if (req.seq != trace.requests.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": seq " +
                                  std::to_string(req.seq) + " out of order (expected " +
                                  std::to_string(trace.requests.size()) + ")");
        }
        auto rel_it = trace.relations.find(req.tag.relation);
        if (rel_it == trace.relations.end()) {
            throw ValidationError("line " + std::to_string(line_no) + ": relation " +
                                  std::to_string(req.tag.relation) + " not declared");
        }
        if (req.tag.block >= rel_it->second) {
            throw ValidationError("line " + std::to_string(line_no) + ": block " +
                                  std::to_string(req.tag.block) + " >= relation length " +
                                  std::to_string(rel_it->second));
        }
        if (req.access == AccessPattern::kRandom && req.scan) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": random access must not carry a scan id");
        }
        trace.requests.push_back(req);
    }

    if (!header_seen) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
    return trace;
}

Trace read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trace file: " + path.string());
    return read_trace(in);
}

void validate_trace(const Trace& trace) {
    for (std::size_t i = 0; i < trace.requests.size(); ++i) {
        const PageRequest& r = trace.requests[i];
        if (r.seq != i) {
            throw ValidationError("request " + std::to_string(i) + " has seq " +
                                  std::to_string(r.seq));
        }
        auto rel_it = trace.relations.find(r.tag.relation);
        if (rel_it == trace.relations.end()) {
            throw ValidationError("request " + std::to_string(i) + " references undeclared relation " +
                                  std::to_string(r.tag.relation));
        }
        if (r.tag.block >= rel_it->second) {
            throw ValidationError("request " + std::to_string(i) + " block out of range");
        }
        if (r.access == AccessPattern::kRandom && r.scan) {
            throw ValidationError("request " + std::to_string(i) + " is random but has a scan id");
        }
    }
}

std::uint64_t distinct_page_count(const Trace& trace) {
    std::unordered_set<PageTag, PageTagHash> pages;
    pages.reserve(trace.requests.size());
    for (const PageRequest& r : trace.requests) pages.insert(r.tag);
    return pages.size();
}

}  // namespace bufsim
