#pragma once

#include <bufsim/bufferpool.hpp>
#include <bufsim/scantrack.hpp>
#include <bufsim/trace.hpp>

#include <stdexcept>
#include <unordered_map>

namespace bufsim::test {

inline PageRequest make_request(std::uint64_t seq, PageTag tag, OpKind op = OpKind::kRead,
                                AccessPattern access = AccessPattern::kRandom) {
    PageRequest r;
    r.seq = seq;
    r.tag = tag;
    r.op = op;
    r.access = access;
    r.scan = std::nullopt;
    r.stream = 0;
    return r;
}

/// Fills slots 0..n-1 with pages {0, 0} .. {0, n-1}.
inline void fill_sequential(CacheState& state, std::size_t n, OpKind op = OpKind::kRead) {
    for (std::size_t i = 0; i < n; ++i) {
        state.fill_empty_slot(make_request(i, {0, static_cast<BlockNumber>(i)}, op), nullptr);
    }
}

/// Estimator with scripted per-tag answers; counts estimate() calls.
class StubEstimator final : public NextAccessEstimator {
public:
    StubEstimator& will_request(PageTag tag, double ticks) {
        ticks_[tag] = ticks;
        return *this;
    }

    StubEstimator& with_group(PageTag tag, BlockGroupKey key) {
        groups_[tag] = key;
        return *this;
    }

    NextAccessEstimate estimate(const PageTag& tag, Tick) const override {
        ++estimate_calls;
        auto it = ticks_.find(tag);
        if (it == ticks_.end()) return NextAccessEstimate::not_requested();
        return NextAccessEstimate::in_ticks(it->second);
    }

    std::optional<BlockGroupKey> covering_group(const PageTag& tag) const override {
        auto it = groups_.find(tag);
        if (it == groups_.end()) return std::nullopt;
        return it->second;
    }

    mutable int estimate_calls = 0;

private:
    std::unordered_map<PageTag, double, PageTagHash> ticks_;
    std::unordered_map<PageTag, BlockGroupKey, PageTagHash> groups_;
};

/// Policy that always nominates the same slot.
class FixedPolicy final : public EvictionPolicy {
public:
    explicit FixedPolicy(std::size_t victim) : victim_(victim) {}

    std::size_t select_victim(CacheState&, const EvictionContext&) override { return victim_; }
    std::string_view name() const override { return "fixed"; }

private:
    std::size_t victim_;
};

/// Policy that must never be consulted.
class ThrowingPolicy final : public EvictionPolicy {
public:
    std::size_t select_victim(CacheState&, const EvictionContext&) override {
        throw std::logic_error("policy consulted on a hit or non-full pool");
    }
    std::string_view name() const override { return "throwing"; }
};

}  // namespace bufsim::test
