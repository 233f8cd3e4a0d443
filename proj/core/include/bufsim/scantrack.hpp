#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bufsim/trace.hpp"

namespace bufsim {

struct ScanTrackConfig {
    std::uint32_t group_size = 128;   // blocks per group
    double ewma_alpha = 0.25;         // weight of the newest speed observation
    bool per_group_estimates = false; // coarsen estimates to group granularity

    bool operator==(const ScanTrackConfig&) const = default;
};

/// Identifies one block group: a fixed-size range of consecutive blocks.
struct BlockGroupKey {
    RelationId relation = 0;
    std::uint64_t group_index = 0;

    friend bool operator==(const BlockGroupKey&, const BlockGroupKey&) = default;
};

/// Predicted time until a page is next touched by an active scan, in request
/// ticks, or NOT_REQUESTED when no scan will reach it.
class NextAccessEstimate {
public:
    static NextAccessEstimate not_requested() { return NextAccessEstimate{}; }
    static NextAccessEstimate in_ticks(double ticks) {
        NextAccessEstimate e;
        e.ticks_ = ticks;
        return e;
    }

    bool requested() const { return ticks_.has_value(); }
    double ticks() const { return *ticks_; }

    friend bool operator==(const NextAccessEstimate&, const NextAccessEstimate&) = default;

private:
    std::optional<double> ticks_;
};

/// Read-only view of scan tracking that eviction policies and the buffer
/// pool consult. Implemented by ScanRegistry; tests stub it.
class NextAccessEstimator {
public:
    virtual ~NextAccessEstimator() = default;

    virtual NextAccessEstimate estimate(const PageTag& tag, Tick now) const = 0;

    /// The page's block group, if any active scan still covers it.
    virtual std::optional<BlockGroupKey> covering_group(const PageTag& tag) const = 0;
};

/// One active (or completed) sequential scan. `position` is the last block
/// consumed; `speed` is a blocks-per-tick EWMA where ticks are global
/// request ordinals.
struct ScanContext {
    ScanId id = 0;
    RelationId relation = 0;
    BlockNumber start = 0;
    std::uint64_t length = 0;
    BlockNumber position = 0;
    double speed = 1.0;
    bool active = true;
    Tick last_tick = 0;
};

struct BlockGroup {
    RelationId relation = 0;
    std::uint64_t group_index = 0;
    std::vector<ScanId> interested_scans;
};

/// Active-scan state: registration, progress updates, and the next-access
/// estimator. Block groups accelerate the "which scans care about this
/// block" query; estimates themselves are per-block unless configured
/// coarser.
class ScanRegistry final : public NextAccessEstimator {
public:
    explicit ScanRegistry(ScanTrackConfig config = {});

    /// Starts tracking a scan covering [start_block, start_block + length).
    /// The initial speed estimate is 1 block per request tick.
    void register_scan(ScanId id, RelationId relation, BlockNumber start_block,
                       std::uint64_t length, Tick now = 0);

    /// Records progress to `block` at tick `now`. Groups fully behind the
    /// new position drop the scan; consuming the final block deactivates the
    /// scan and purges it from every group.
    void advance_scan(ScanId id, BlockNumber block, Tick now);

    NextAccessEstimate estimate(const PageTag& tag, Tick now) const override;
    std::optional<BlockGroupKey> covering_group(const PageTag& tag) const override;

    bool contains(ScanId id) const { return scans_.contains(id); }
    bool is_active(ScanId id) const;
    const ScanContext* find(ScanId id) const;
    const BlockGroup* find_group(RelationId relation, std::uint64_t group_index) const;
    const ScanTrackConfig& config() const { return config_; }

private:
    struct GroupKeyHash {
        std::size_t operator()(const BlockGroupKey& k) const noexcept;
    };

    std::uint64_t group_of(BlockNumber block) const { return block / config_.group_size; }
    void drop_from_group(const BlockGroupKey& key, ScanId id);
    void purge_scan(ScanContext& scan);

    ScanTrackConfig config_;
    std::unordered_map<ScanId, ScanContext> scans_;
    std::unordered_map<BlockGroupKey, BlockGroup, GroupKeyHash> groups_;
    // Per scan: lowest group index that might still hold the scan id.
    std::unordered_map<ScanId, std::uint64_t> first_live_group_;
};

}  // namespace bufsim
