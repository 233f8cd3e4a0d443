#include "bufsim/policies.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "bufsim/errors.hpp"

namespace bufsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

/// Uniformly random unpinned slot, for when sampling found no candidate.
std::size_t random_unpinned(const CacheState& state, SplitMix64& rng, std::string_view who) {
    std::vector<std::size_t> unpinned;
    unpinned.reserve(state.capacity());
    for (std::size_t i = 0; i < state.capacity(); ++i) {
        if (state.slot(i).refcount == 0) {
            unpinned.push_back(i);
        }
    }
    if (unpinned.empty()) {
        throw NoVictimError(std::string(who) + ": all buffers are pinned");
    }
    return unpinned[rng.next_below(unpinned.size())];
}

NextAccessEstimate estimate_for(const BufferDescriptor& d, const EvictionContext& ctx) {
    if (!ctx.estimator) {
        return NextAccessEstimate::not_requested();
    }
    return ctx.estimator->estimate(*d.tag, ctx.now);
}

}  // namespace

void PolicyConfig::validate() const {
    if (sample_size_pbm == 0 || sample_size_evolved == 0 || fast_path_probes == 0) {
        throw ValidationError("sample and probe counts must be at least 1");
    }
    if (max_draws == 0) {
        throw ValidationError("max_draws must be at least 1");
    }
    if (clean_bonus < 0.0 || cold_bonus < 0.0) {
        throw ValidationError("score bonuses must be non-negative");
    }
    if (!(dirty_score_for_not_requested >= 0.0)) {
        throw ValidationError("dirty_score_for_not_requested must be non-negative");
    }
}

std::size_t ClockPolicy::select_victim(CacheState& state, const EvictionContext&) {
    const std::size_t cap = state.capacity();
    std::size_t hand = state.clock_hand();
    std::size_t trycounter = cap;
    for (;;) {
        BufferDescriptor& d = state.slot(hand);
        const std::size_t current = hand;
        hand = hand + 1 == cap ? 0 : hand + 1;
        if (d.refcount != 0) {
            if (--trycounter == 0) {
                state.set_clock_hand(hand);
                throw NoVictimError("clock: all buffers are pinned");
            }
            continue;
        }
        if (d.usage_count > 0) {
            --d.usage_count;
            trycounter = cap;
            continue;
        }
        state.set_clock_hand(hand);
        return current;
    }
}

std::size_t PbmSamplingPolicy::select_victim(CacheState& state, const EvictionContext& ctx) {
    const std::size_t cap = state.capacity();
    std::uint32_t budget = cfg_.max_draws;
    std::uint32_t candidates = 0;
    std::optional<std::size_t> best;
    double best_t = -kInf;
    while (candidates < cfg_.sample_size_pbm && budget > 0) {
        --budget;
        const std::size_t idx = static_cast<std::size_t>(ctx.rng->next_below(cap));
        const BufferDescriptor& d = state.slot(idx);
        if (d.refcount != 0) {
            continue;
        }
        ++candidates;
        const NextAccessEstimate est = estimate_for(d, ctx);
        if (!est.requested()) {
            return idx;  // no scan wants it again: free lunch
        }
        const double t = est.ticks();
        if (!best || t > best_t || (t == best_t && idx < *best)) {
            best = idx;
            best_t = t;
        }
    }
    if (best) {
        return *best;
    }
    return random_unpinned(state, *ctx.rng, name());
}

std::size_t EvolvedPolicy::select_victim(CacheState& state, const EvictionContext& ctx) {
    const std::size_t cap = state.capacity();
    for (std::uint32_t i = 0; i < cfg_.fast_path_probes; ++i) {
        const std::size_t idx = static_cast<std::size_t>(ctx.rng->next_below(cap));
        const BufferDescriptor& d = state.slot(idx);
        if (d.refcount == 0 && !d.block_group) {
            return idx;
        }
    }

    std::uint32_t budget = cfg_.max_draws;
    std::uint32_t candidates = 0;
    std::optional<std::size_t> best_clean;
    std::optional<std::size_t> best_dirty;
    double best_clean_score = -kInf;
    double best_dirty_score = -kInf;
    while (candidates < cfg_.sample_size_evolved && budget > 0) {
        --budget;
        const std::size_t idx = static_cast<std::size_t>(ctx.rng->next_below(cap));
        const BufferDescriptor& d = state.slot(idx);
        if (d.refcount != 0) {
            continue;
        }
        ++candidates;
        const NextAccessEstimate est = estimate_for(d, ctx);
        if (!est.requested() && !d.is_dirty) {
            return idx;  // clean and unwanted: nothing can beat it
        }
        double score = !est.requested() ? cfg_.dirty_score_for_not_requested : est.ticks();
        if (!d.is_dirty) {
            score += cfg_.clean_bonus;
        }
        if (d.usage_count == 0) {
            score += cfg_.cold_bonus;
        }
        if (!d.is_dirty) {
            if (!best_clean || score > best_clean_score ||
                (score == best_clean_score && idx < *best_clean)) {
                best_clean = idx;
                best_clean_score = score;
            }
        } else {
            if (!best_dirty || score > best_dirty_score ||
                (score == best_dirty_score && idx < *best_dirty)) {
                best_dirty = idx;
                best_dirty_score = score;
            }
        }
    }
    if (best_clean) {
        return *best_clean;
    }
    if (best_dirty) {
        return *best_dirty;
    }
    return random_unpinned(state, *ctx.rng, name());
}

BeladyPolicy::BeladyPolicy(const Trace& trace) {
    for (const PageRequest& r : trace.requests) {
        occurrences_[r.tag].push_back(r.seq);
    }
}

std::size_t BeladyPolicy::select_victim(CacheState& state, const EvictionContext& ctx) {
    std::optional<std::size_t> best;
    std::uint64_t best_next = 0;
    for (std::size_t i = 0; i < state.capacity(); ++i) {
        const BufferDescriptor& d = state.slot(i);
        if (d.refcount != 0) {
            continue;
        }
        std::uint64_t next = kNever;
        if (auto it = occurrences_.find(*d.tag); it != occurrences_.end()) {
            const auto& seqs = it->second;
            auto pos = std::upper_bound(seqs.begin(), seqs.end(), ctx.now);
            if (pos != seqs.end()) {
                next = *pos;
            }
        }
        if (!best || next > best_next) {
            best = i;
            best_next = next;
        }
    }
    if (!best) {
        throw NoVictimError("belady: all buffers are pinned");
    }
    return *best;
}

std::size_t belady_select_victim(const CacheState& state, std::span<const PageRequest> future) {
    std::optional<std::size_t> best;
    std::uint64_t best_next = 0;
    for (std::size_t i = 0; i < state.capacity(); ++i) {
        const BufferDescriptor& d = state.slot(i);
        if (d.refcount != 0) {
            continue;
        }
        std::uint64_t next = kNever;
        for (const PageRequest& r : future) {
            if (r.tag == *d.tag) {
                next = r.seq;
                break;
            }
        }
        if (!best || next > best_next) {
            best = i;
            best_next = next;
        }
    }
    if (!best) {
        throw NoVictimError("belady: all buffers are pinned");
    }
    return *best;
}

std::unique_ptr<EvictionPolicy> make_policy(std::string_view name, const PolicyConfig& cfg,
                                            const Trace* trace) {
    cfg.validate();
    if (name == "clock") {
        return std::make_unique<ClockPolicy>();
    }
    if (name == "pbm-sampling") {
        return std::make_unique<PbmSamplingPolicy>(cfg);
    }
    if (name == "evolved") {
        return std::make_unique<EvolvedPolicy>(cfg);
    }
    if (name == "belady") {
        if (!trace) {
            throw ValidationError("belady policy requires the full trace up front");
        }
        return std::make_unique<BeladyPolicy>(*trace);
    }
    std::string valid;
    for (std::string_view n : kPolicyNames) {
        if (!valid.empty()) {
            valid += ", ";
        }
        valid += n;
    }
    throw ValidationError("unknown policy '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace bufsim
