#include "bufsim/bufferpool.hpp"

#include <string>

#include "bufsim/errors.hpp"

namespace bufsim {

CacheState::CacheState(std::size_t capacity) {
    if (capacity == 0) {
        throw ValidationError("cache capacity must be at least 1");
    }
    slots_.resize(capacity);
    for (std::size_t i = 0; i < capacity; ++i) {
        slots_[i].id = i;
    }
    page_table_.reserve(capacity);
}

std::optional<std::size_t> CacheState::lookup(const PageTag& tag) const {
    auto it = page_table_.find(tag);
    if (it == page_table_.end()) {
        return std::nullopt;
    }
    return it->second;
}

AccessOutcome CacheState::access(const PageRequest& request, EvictionPolicy& policy,
                                 const NextAccessEstimator* estimator, SplitMix64& rng) {
    if (auto hit = lookup(request.tag)) {
        return record_hit(*hit, request, estimator);
    }
    if (auto filled = fill_empty_slot(request, estimator)) {
        return *filled;
    }
    EvictionContext ctx{estimator, &rng, request.seq};
    std::size_t victim = policy.select_victim(*this, ctx);
    return evict_into(victim, request, estimator);
}

AccessOutcome CacheState::record_hit(std::size_t slot_index, const PageRequest& request,
                                     const NextAccessEstimator* estimator) {
    BufferDescriptor& d = slots_[slot_index];
    if (!d.tag || !(*d.tag == request.tag)) {
        throw InvalidStateError("record_hit: slot " + std::to_string(slot_index) +
                                " does not hold the requested page");
    }
    if (d.usage_count < kMaxUsageCount) {
        ++d.usage_count;
    }
    if (request.op == OpKind::kWrite) {
        d.is_dirty = true;
    }
    d.last_access = request.seq;
    if (estimator) {
        d.block_group = estimator->covering_group(*d.tag);
    }
    AccessOutcome out;
    out.kind = AccessKind::kHit;
    out.slot = slot_index;
    out.fault_kind = request.access == AccessPattern::kSequential ? FaultKind::kSequential
                                                                  : FaultKind::kRandom;
    return out;
}

std::optional<AccessOutcome> CacheState::fill_empty_slot(const PageRequest& request,
                                                         const NextAccessEstimator* estimator) {
    if (full()) {
        return std::nullopt;
    }
    std::size_t index = next_free_++;
    load_into(slots_[index], request, estimator);
    AccessOutcome out;
    out.kind = AccessKind::kMissFilledEmpty;
    out.slot = index;
    out.fault_kind = request.access == AccessPattern::kSequential ? FaultKind::kSequential
                                                                  : FaultKind::kRandom;
    return out;
}

AccessOutcome CacheState::evict_into(std::size_t victim, const PageRequest& request,
                                     const NextAccessEstimator* estimator) {
    const std::string at = " (request seq " + std::to_string(request.seq) + ")";
    if (victim >= slots_.size()) {
        throw PolicyContractViolation("victim slot " + std::to_string(victim) +
                                      " out of range" + at);
    }
    BufferDescriptor& d = slots_[victim];
    if (!d.tag) {
        throw PolicyContractViolation("victim slot " + std::to_string(victim) + " is empty" + at);
    }
    if (d.refcount != 0) {
        throw PolicyContractViolation("victim slot " + std::to_string(victim) + " is pinned" + at);
    }
    AccessOutcome out;
    out.kind = AccessKind::kMissEvicted;
    out.slot = victim;
    out.victim = victim;
    out.victim_was_dirty = d.is_dirty;
    out.fault_kind = request.access == AccessPattern::kSequential ? FaultKind::kSequential
                                                                  : FaultKind::kRandom;
    page_table_.erase(*d.tag);
    load_into(d, request, estimator);
    return out;
}

void CacheState::pin(std::size_t slot_index) {
    if (slot_index >= slots_.size() || !slots_[slot_index].tag) {
        throw InvalidStateError("pin: slot " + std::to_string(slot_index) +
                                " is empty or out of range");
    }
    BufferDescriptor& d = slots_[slot_index];
    if (d.refcount == 0) {
        ++pinned_;
    }
    ++d.refcount;
}

void CacheState::unpin(std::size_t slot_index) {
    if (slot_index >= slots_.size() || slots_[slot_index].refcount == 0) {
        throw InvalidStateError("unpin: slot " + std::to_string(slot_index) + " is not pinned");
    }
    BufferDescriptor& d = slots_[slot_index];
    --d.refcount;
    if (d.refcount == 0) {
        --pinned_;
    }
}

void CacheState::load_into(BufferDescriptor& d, const PageRequest& request,
                           const NextAccessEstimator* estimator) {
    d.tag = request.tag;
    d.usage_count = 1;
    d.is_dirty = request.op == OpKind::kWrite;
    d.last_access = request.seq;
    d.block_group = estimator ? estimator->covering_group(request.tag) : std::nullopt;
    page_table_[request.tag] = d.id;
}

}  // namespace bufsim
