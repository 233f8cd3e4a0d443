#include "bufsim/scantrack.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "bufsim/errors.hpp"

namespace bufsim {

std::size_t ScanRegistry::GroupKeyHash::operator()(const BlockGroupKey& k) const noexcept {
    std::uint64_t z = (static_cast<std::uint64_t>(k.relation) << 40) ^ k.group_index;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
}

ScanRegistry::ScanRegistry(ScanTrackConfig config) : config_(config) {
    if (config_.group_size == 0) throw ValidationError("group_size must be >= 1");
    if (config_.ewma_alpha <= 0.0 || config_.ewma_alpha > 1.0) {
        throw ValidationError("ewma_alpha must be in (0, 1]");
    }
}

void ScanRegistry::register_scan(ScanId id, RelationId relation, BlockNumber start_block,
                                 std::uint64_t length, Tick now) {
    if (length == 0) throw ValidationError("scan length must be >= 1");
    if (scans_.contains(id)) {
        throw InvalidStateError("scan id " + std::to_string(id) + " already registered");
    }

    ScanContext scan;
    scan.id = id;
    scan.relation = relation;
    scan.start = start_block;
    scan.length = length;
    scan.position = start_block;
    scan.speed = 1.0;
    scan.active = true;
    scan.last_tick = now;

    const std::uint64_t first_group = group_of(start_block);
    const std::uint64_t last_group = group_of(static_cast<BlockNumber>(start_block + length - 1));
    for (std::uint64_t g = first_group; g <= last_group; ++g) {
        BlockGroupKey key{relation, g};
        auto [it, inserted] = groups_.try_emplace(key, BlockGroup{relation, g, {}});
        it->second.interested_scans.push_back(id);
    }
    first_live_group_[id] = first_group;

    // A scan of a single block is complete the moment it registers.
    if (length == 1) purge_scan(scan);
    scans_.emplace(id, scan);
}

void ScanRegistry::advance_scan(ScanId id, BlockNumber block, Tick now) {
    auto it = scans_.find(id);
    if (it == scans_.end()) {
        throw InvalidStateError("unknown scan id " + std::to_string(id));
    }
    ScanContext& scan = it->second;
    if (!scan.active) {
        throw InvalidStateError("scan id " + std::to_string(id) + " is no longer active");
    }
    if (block < scan.position) {
        throw InvalidStateError("scan id " + std::to_string(id) + " cannot move backwards");
    }
    if (block >= scan.start + scan.length) {
        throw InvalidStateError("scan id " + std::to_string(id) + " advanced past its span");
    }

    const std::uint64_t delta_blocks = block - scan.position;
    const std::uint64_t delta_ticks = now > scan.last_tick ? now - scan.last_tick : 0;
    if (delta_ticks > 0) {
        const double observed = static_cast<double>(delta_blocks) / static_cast<double>(delta_ticks);
        scan.speed = (1.0 - config_.ewma_alpha) * scan.speed + config_.ewma_alpha * observed;
    }
    scan.position = block;
    scan.last_tick = now;

    if (scan.position == scan.start + scan.length - 1) {
        purge_scan(scan);
        return;
    }

    // Drop the scan from groups whose last block the sweep has consumed.
    auto live_it = first_live_group_.find(id);
    std::uint64_t g = live_it->second;
    while (g * config_.group_size + config_.group_size - 1 <= scan.position) {
        drop_from_group({scan.relation, g}, id);
        ++g;
    }
    live_it->second = g;
}

void ScanRegistry::purge_scan(ScanContext& scan) {
    scan.active = false;
    const std::uint64_t last_group =
        group_of(static_cast<BlockNumber>(scan.start + scan.length - 1));
    for (std::uint64_t g = first_live_group_[scan.id]; g <= last_group; ++g) {
        drop_from_group({scan.relation, g}, scan.id);
    }
    first_live_group_.erase(scan.id);
}

void ScanRegistry::drop_from_group(const BlockGroupKey& key, ScanId id) {
    auto it = groups_.find(key);
    if (it == groups_.end()) return;
    auto& scans = it->second.interested_scans;
    scans.erase(std::remove(scans.begin(), scans.end(), id), scans.end());
    if (scans.empty()) groups_.erase(it);
}

NextAccessEstimate ScanRegistry::estimate(const PageTag& tag, Tick /*now*/) const {
    auto group_it = groups_.find({tag.relation, group_of(tag.block)});
    if (group_it == groups_.end()) return NextAccessEstimate::not_requested();

    double best = std::numeric_limits<double>::infinity();
    for (ScanId id : group_it->second.interested_scans) {
        const ScanContext& scan = scans_.at(id);
        if (!scan.active) continue;
        if (tag.block <= scan.position) continue;
        if (tag.block >= scan.start + scan.length) continue;
        const BlockNumber target = config_.per_group_estimates
                                       ? std::max(scan.position + 1,
                                                  static_cast<BlockNumber>(group_of(tag.block) *
                                                                           config_.group_size))
                                       : tag.block;
        const double ticks = static_cast<double>(target - scan.position) / scan.speed;
        best = std::min(best, ticks);
    }
    if (best == std::numeric_limits<double>::infinity()) {
        return NextAccessEstimate::not_requested();
    }
    return NextAccessEstimate::in_ticks(best);
}

std::optional<BlockGroupKey> ScanRegistry::covering_group(const PageTag& tag) const {
    BlockGroupKey key{tag.relation, group_of(tag.block)};
    auto it = groups_.find(key);
    if (it == groups_.end() || it->second.interested_scans.empty()) return std::nullopt;
    return key;
}

bool ScanRegistry::is_active(ScanId id) const {
    auto it = scans_.find(id);
    return it != scans_.end() && it->second.active;
}

const ScanContext* ScanRegistry::find(ScanId id) const {
    auto it = scans_.find(id);
    return it == scans_.end() ? nullptr : &it->second;
}

const BlockGroup* ScanRegistry::find_group(RelationId relation, std::uint64_t group_index) const {
    auto it = groups_.find({relation, group_index});
    return it == groups_.end() ? nullptr : &it->second;
}

}  // namespace bufsim
