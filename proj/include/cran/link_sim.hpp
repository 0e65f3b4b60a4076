#pragma once

// Monte Carlo validation of one AP-user pair: per-block BLER with ARQ, and a
// slotted FIFO queue with deadline drops and retransmission RB accounting.
//
// Queue conventions. Each slot: lambda*T_s bits arrive, head segments older
// than floor(D_q / T_s) slots are discarded, then r * psi_j bits are served.
// Bits are tracked in fixed point (2^-20 bit) so conservation is exact.
// A shadow fluid queue without drops runs alongside and measures the delay
// violation directly: a bit arriving at tau is late iff its backlog at
// tau + D_q exceeds lambda * D_q.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cran/amc.hpp"
#include "cran/qos.hpp"
#include "cran/tpd.hpp"

namespace cran {

enum class SimMode { block, queue };

struct SimConfig {
    SimMode mode = SimMode::queue;
    std::int64_t n_slots = 100000;
    std::int64_t n_blocks = 1000000;
    std::uint64_t seed = 1;
    /// Draw the SNR conditioned on snr >= threshold_0 (no outage slots).
    bool conditioned_draws = true;
    bool record_trace = false;

    void validate() const;
};

struct BlerStats {
    std::int64_t blocks = 0;
    std::int64_t attempts = 0;
    std::int64_t failed_attempts = 0;
    std::int64_t outage_attempts = 0;  // unconditioned draws below threshold_0
    std::int64_t residual_failures = 0;
    double per_attempt_failure = 0.0;
    double per_attempt_se = 0.0;
    double residual_rate = 0.0;
    double residual_se = 0.0;
};

struct SlotRecord {
    std::int64_t slot = 0;
    double snr = 0.0;
    int mcs = -1;  // -1: outage
    int rb_initial = 0;
    int rb_retx = 0;
    double served_bits = 0.0;
    double dropped_bits = 0.0;
    double backlog_bits = 0.0;
};

using SlotTrace = std::vector<SlotRecord>;

struct QueueStats {
    std::int64_t slots = 0;
    std::int64_t outage_slots = 0;
    double arrived_bits = 0.0;
    double served_bits = 0.0;
    double dropped_bits = 0.0;        // deadline discards
    double residual_lost_bits = 0.0;  // served but never decoded, subset of served
    double final_backlog_bits = 0.0;
    double mean_backlog_bits = 0.0;
    double late_bits = 0.0;  // shadow fluid queue
    /// Conservation in fixed-point units: arrived == served + dropped + backlog.
    bool conserved = false;

    double lvp_drop = 0.0;       // dropped / arrived
    double lvp_violation = 0.0;  // late / arrived
    double mean_rbs = 0.0;
    double rbs_se = 0.0;
    double bandwidth_hz = 0.0;
    std::int64_t retransmissions = 0;
};

BlerStats run_block_sim(const TpdSolution& solution, const ChannelModel& channel,
                        const SystemParams& params, const McsTable& table, const SimConfig& cfg);

QueueStats run_queue_sim(const TpdSolution& solution, const QosRequirement& qos,
                         const ChannelModel& channel, const SystemParams& params,
                         const McsTable& table, const SimConfig& cfg, SlotTrace* trace = nullptr);

struct BandwidthStats {
    double mean_rbs = 0.0;
    double rbs_se = 0.0;
    double hertz = 0.0;
};

/// Mean RBs per slot (initial plus retransmissions) and the occupied bandwidth.
/// Throws std::invalid_argument on an empty trace.
BandwidthStats measure_bandwidth(const SlotTrace& trace, const SystemParams& params);

/// One row per slot, tab separated, header with units.
void write_trace(std::ostream& out, const SlotTrace& trace);

}  // namespace cran
