#pragma once

namespace cran {

/// Slot, RB and frame constants shared by every pair in the network.
/// Defaults: 30 kHz numerology, 0.5 ms slot, 273 RBs.
struct SystemParams {
    double slot_duration = 0.5e-3;   // s
    double feedback_rtt = 1.5e-3;    // s
    int subcarriers_per_rb = 12;
    int symbols_per_rb = 14;
    int data_symbols_per_slot = 14;
    double subcarrier_spacing = 30e3;  // Hz
    int total_rbs = 273;
    int code_block_bits = 1024;
    int max_transmissions = 8;

    /// Throws std::invalid_argument naming the first non-positive field.
    void validate() const;

    /// Information carried by one RB at spectral efficiency `se`.
    double bits_per_rb(double se) const {
        return static_cast<double>(subcarriers_per_rb) * symbols_per_rb * se;
    }
    /// Bandwidth occupied by one RB-per-slot of allocation.
    double hertz_per_rb() const {
        return static_cast<double>(subcarriers_per_rb) * symbols_per_rb * subcarrier_spacing /
               data_symbols_per_slot;
    }
    /// Time spent by one transmission attempt including feedback.
    double attempt_duration() const { return slot_duration + feedback_rtt; }

    bool operator==(const SystemParams&) const = default;
};

}  // namespace cran
