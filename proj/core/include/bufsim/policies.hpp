#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bufsim/bufferpool.hpp"
#include "bufsim/trace.hpp"

namespace bufsim {

/// Tunables shared by the sampling policies. Defaults match the study.
struct PolicyConfig {
    std::uint32_t sample_size_pbm = 20;      // candidates examined per eviction
    std::uint32_t sample_size_evolved = 30;  // candidates examined per eviction
    std::uint32_t fast_path_probes = 3;      // probes before sampling
    double clean_bonus = 64.0;               // added to a clean candidate's score
    double cold_bonus = 32.0;                // added when usage_count == 0
    // Score of a NOT_REQUESTED dirty candidate; beats any finite estimate.
    double dirty_score_for_not_requested = std::numeric_limits<double>::infinity();
    std::uint32_t max_draws = 128;           // random-draw budget per selection

    void validate() const;

    bool operator==(const PolicyConfig&) const = default;
};

inline constexpr std::array<std::string_view, 4> kPolicyNames = {
    "clock", "pbm-sampling", "evolved", "belady"};

/// Clock sweep over the pool. The hand lives in CacheState so it persists
/// across evictions; pinned slots are passed over without touching their
/// usage counts, and a full lap of pinned slots raises NoVictimError.
class ClockPolicy final : public EvictionPolicy {
public:
    std::size_t select_victim(CacheState& state, const EvictionContext& ctx) override;
    std::string_view name() const override { return "clock"; }
};

/// Samples unpinned buffers and evicts the one whose next access lies
/// furthest in the future. A candidate no scan will ever touch again is
/// taken on the spot.
class PbmSamplingPolicy final : public EvictionPolicy {
public:
    explicit PbmSamplingPolicy(const PolicyConfig& cfg) : cfg_(cfg) {}

    std::size_t select_victim(CacheState& state, const EvictionContext& ctx) override;
    std::string_view name() const override { return "pbm-sampling"; }

private:
    PolicyConfig cfg_;
};

/// Sampling policy with a fast path for unreferenced buffers outside any
/// tracked block group, write-aware scoring (clean pages are cheaper to
/// drop), and a recency nudge for cold buffers. Clean candidates always win
/// over dirty ones.
class EvolvedPolicy final : public EvictionPolicy {
public:
    explicit EvolvedPolicy(const PolicyConfig& cfg) : cfg_(cfg) {}

    std::size_t select_victim(CacheState& state, const EvictionContext& ctx) override;
    std::string_view name() const override { return "evolved"; }

private:
    PolicyConfig cfg_;
};

/// Offline optimum: evicts the resident page whose next use is furthest
/// away, preferring pages never used again. Requires the full trace up
/// front; pinned slots are skipped.
class BeladyPolicy final : public EvictionPolicy {
public:
    explicit BeladyPolicy(const Trace& trace);

    std::size_t select_victim(CacheState& state, const EvictionContext& ctx) override;
    std::string_view name() const override { return "belady"; }

private:
    // Seq numbers of every request per tag, ascending.
    std::unordered_map<PageTag, std::vector<std::uint64_t>, PageTagHash> occurrences_;
};

/// Reference implementation of the Belady choice over an explicit future
/// window. Scans linearly; meant for cross-checking BeladyPolicy in tests.
std::size_t belady_select_victim(const CacheState& state, std::span<const PageRequest> future);

/// Builds a policy by name ("clock", "pbm-sampling", "evolved", "belady").
/// Belady needs the trace; the others ignore it.
std::unique_ptr<EvictionPolicy> make_policy(std::string_view name, const PolicyConfig& cfg,
                                            const Trace* trace = nullptr);

}  // namespace bufsim
