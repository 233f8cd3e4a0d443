#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bufsim/rng.hpp"
#include "bufsim/scantrack.hpp"
#include "bufsim/trace.hpp"

namespace bufsim {

/// Recency counter ceiling, matching PostgreSQL's buffer manager.
inline constexpr std::uint32_t kMaxUsageCount = 5;

/// One pool slot. An empty slot (no tag) has zero refcount and usage count,
/// is clean, and carries no block-group link.
struct BufferDescriptor {
    std::size_t id = 0;
    std::optional<PageTag> tag;
    std::uint32_t refcount = 0;
    std::uint32_t usage_count = 0;
    bool is_dirty = false;
    std::optional<BlockGroupKey> block_group;
    Tick last_access = 0;
};

enum class AccessKind : std::uint8_t { kHit, kMissFilledEmpty, kMissEvicted };
enum class FaultKind : std::uint8_t { kSequential, kRandom };

/// What one access did; the cost model prices these.
struct AccessOutcome {
    AccessKind kind = AccessKind::kHit;
    std::size_t slot = 0;                // slot that served the request
    std::optional<std::size_t> victim;   // set only for kMissEvicted
    bool victim_was_dirty = false;
    FaultKind fault_kind = FaultKind::kRandom;  // mirrors the request's access flag
};

class CacheState;

struct EvictionContext {
    const NextAccessEstimator* estimator = nullptr;
    SplitMix64* rng = nullptr;
    Tick now = 0;
};

/// Victim selection. Called only when the pool is full; must return an
/// occupied slot with refcount 0 or the simulation aborts.
class EvictionPolicy {
public:
    virtual ~EvictionPolicy() = default;
    virtual std::size_t select_victim(CacheState& state, const EvictionContext& ctx) = 0;
    virtual std::string_view name() const = 0;
};

/// Fixed-capacity pool of buffer descriptors with a page table mapping
/// resident tags to slots. Owned and mutated by one simulation loop.
class CacheState {
public:
    explicit CacheState(std::size_t capacity);

    std::size_t capacity() const { return slots_.size(); }
    std::size_t occupied_count() const { return next_free_; }
    std::size_t pinned_count() const { return pinned_; }
    bool full() const { return next_free_ == slots_.size(); }

    const BufferDescriptor& slot(std::size_t index) const { return slots_[index]; }
    BufferDescriptor& slot(std::size_t index) { return slots_[index]; }

    std::size_t clock_hand() const { return clock_hand_; }
    void set_clock_hand(std::size_t hand) { clock_hand_ = hand; }

    std::optional<std::size_t> lookup(const PageTag& tag) const;

    /// The full access path: hit, fill an empty slot, or ask the policy for
    /// a victim. Ticks come from the request's seq.
    AccessOutcome access(const PageRequest& request, EvictionPolicy& policy,
                         const NextAccessEstimator* estimator, SplitMix64& rng);

    /// Hit path: bumps usage (saturating), ors in dirtiness on writes, and
    /// refreshes the block-group link. `slot_index` must hold request.tag.
    AccessOutcome record_hit(std::size_t slot_index, const PageRequest& request,
                             const NextAccessEstimator* estimator);

    /// Fills the next empty slot, or returns nullopt when the pool is full.
    std::optional<AccessOutcome> fill_empty_slot(const PageRequest& request,
                                                 const NextAccessEstimator* estimator);

    /// Replaces the page in `victim` with the request's page, reporting the
    /// victim's dirtiness. Throws PolicyContractViolation if the slot is out
    /// of range, empty, or pinned.
    AccessOutcome evict_into(std::size_t victim, const PageRequest& request,
                             const NextAccessEstimator* estimator);

    void pin(std::size_t slot_index);
    void unpin(std::size_t slot_index);

private:
    void load_into(BufferDescriptor& d, const PageRequest& request,
                   const NextAccessEstimator* estimator);

    std::vector<BufferDescriptor> slots_;
    std::unordered_map<PageTag, std::size_t, PageTagHash> page_table_;
    std::size_t next_free_ = 0;  // slots [next_free_, capacity) are empty
    std::size_t clock_hand_ = 0;
    std::size_t pinned_ = 0;
};

}  // namespace bufsim
