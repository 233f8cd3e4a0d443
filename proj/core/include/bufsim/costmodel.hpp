#pragma once

#include <cstddef>
#include <cstdint>

#include "bufsim/bufferpool.hpp"

namespace bufsim {

/// Calibrated per-access I/O costs in microseconds. Hits cost hit_us
/// (default free); a miss pays one read, plus a writeback when the victim
/// it displaced was dirty. Costs must satisfy the device ordering
/// dirty_writeback_us >= rand_read_us >= seq_read_us.
struct IoCostModel {
    double seq_read_us = 20.0;
    double rand_read_us = 100.0;
    double dirty_writeback_us = 200.0;
    double hit_us = 0.0;
    std::uint64_t page_size_bytes = 8192;

    void validate() const;
    double cost_of(const AccessOutcome& outcome) const;

    bool operator==(const IoCostModel&) const = default;
};

/// Counters for one simulated run. total_io_wait_us always equals the sum
/// of the per-class costs of everything accumulated into it, and
/// io_volume_bytes counts one page per read plus one per dirty writeback.
struct RunMetrics {
    std::uint64_t requests = 0;
    std::uint64_t hits = 0;
    std::uint64_t seq_misses = 0;
    std::uint64_t rand_misses = 0;
    std::uint64_t dirty_evictions = 0;
    double total_io_wait_us = 0.0;
    std::uint64_t io_volume_bytes = 0;

    void accumulate(const AccessOutcome& outcome, const IoCostModel& model);

    double hit_rate() const;        // 0 on an empty run
    double avg_io_wait_us() const;  // 0 on an empty run
    double latency_score() const;   // 1000 / (1 + avg_io_wait_us)

    bool operator==(const RunMetrics&) const = default;
};

}  // namespace bufsim
