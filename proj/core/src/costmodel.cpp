#include "bufsim/costmodel.hpp"

#include "bufsim/errors.hpp"

namespace bufsim {

void IoCostModel::validate() const {
    if (seq_read_us < 0.0 || rand_read_us < 0.0 || dirty_writeback_us < 0.0 || hit_us < 0.0) {
        throw ValidationError("I/O costs must be non-negative");
    }
    if (!(dirty_writeback_us >= rand_read_us && rand_read_us >= seq_read_us)) {
        throw ValidationError(
            "I/O costs must satisfy dirty_writeback_us >= rand_read_us >= seq_read_us");
    }
    if (page_size_bytes == 0) {
        throw ValidationError("page_size_bytes must be positive");
    }
}

double IoCostModel::cost_of(const AccessOutcome& outcome) const {
    if (outcome.kind == AccessKind::kHit) {
        return hit_us;
    }
    double cost =
        outcome.fault_kind == FaultKind::kSequential ? seq_read_us : rand_read_us;
    if (outcome.victim_was_dirty) {
        cost += dirty_writeback_us;
    }
    return cost;
}

void RunMetrics::accumulate(const AccessOutcome& outcome, const IoCostModel& model) {
    ++requests;
    if (outcome.kind == AccessKind::kHit) {
        ++hits;
    } else {
        if (outcome.fault_kind == FaultKind::kSequential) {
            ++seq_misses;
        } else {
            ++rand_misses;
        }
        io_volume_bytes += model.page_size_bytes;
    }
    if (outcome.victim_was_dirty) {
        ++dirty_evictions;
        io_volume_bytes += model.page_size_bytes;
    }
    total_io_wait_us += model.cost_of(outcome);
}

double RunMetrics::hit_rate() const {
    return requests == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(requests);
}

double RunMetrics::avg_io_wait_us() const {
    return requests == 0 ? 0.0 : total_io_wait_us / static_cast<double>(requests);
}

double RunMetrics::latency_score() const {
    return 1000.0 / (1.0 + avg_io_wait_us());
}

}  // namespace bufsim
