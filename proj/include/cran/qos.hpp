#pragma once

// Effective-capacity statistics for one user queue fed at a constant rate.
//
// Rates cross this interface in bit/s; internally the per-slot arrival
// lambda * T_s (bits) is what gets compared to the per-slot service r * psi.

#include <optional>

#include "cran/amc.hpp"
#include "cran/system_params.hpp"

namespace cran {

struct QosRequirement {
    double arrival_rate = 10e6;          // bit/s
    double total_delay_budget = 10e-3;   // s
    double lvp_threshold = 1e-3;
    double decode_bler_threshold = 1e-3;

    /// Throws std::invalid_argument; the budget must fit one attempt.
    void validate(const SystemParams& params) const;

    double bits_per_slot(const SystemParams& params) const {
        return arrival_rate * params.slot_duration;
    }

    bool operator==(const QosRequirement&) const = default;
};

struct DelaySplit {
    int transmissions = 1;
    double queue_budget = 0.0;   // s
    double service_delay = 0.0;  // s
};

/// Spends X attempts of the budget on service; nullopt once nothing is left
/// for queueing.
std::optional<DelaySplit> delay_split(double total_delay_budget, int transmissions,
                                      const SystemParams& params);

/// Largest X whose delay split is feasible, capped at params.max_transmissions.
/// Zero when even one attempt does not fit.
int max_feasible_transmissions(double total_delay_budget, const SystemParams& params);

/// theta = -ln(eps * E[r psi] / (lambda T_s)) / (lambda D_q), in 1/bit.
/// A result <= 0 means E[r psi] is at or above the window's upper edge.
double latency_exponent(double expected_service_bits, double arrival_rate, double queue_budget,
                        double lvp_threshold, const SystemParams& params);

double latency_exponent(const ModeDistribution& modes, int rb_count, const QosRequirement& qos,
                        double queue_budget, const SystemParams& params);

/// -ln E[exp(-theta r psi)] / (theta T_s), bit/s. Requires theta > 0.
double effective_capacity(const ModeDistribution& modes, int rb_count, double theta,
                          const SystemParams& params);

double effective_capacity(double rho, int rb_count, double theta, const ChannelModel& channel,
                          const SystemParams& params, const McsTable& table);

/// phi * exp(-theta lambda D_q), phi = lambda T_s / E[r psi], clamped to [0, 1].
double lvp_estimate(double theta, double arrival_rate, double queue_budget,
                    double expected_service_bits, const SystemParams& params);

/// lambda T_s < E[r psi] < lambda T_s / eps, both strict.
bool feasibility_window(double expected_service_bits, double arrival_rate, double lvp_threshold,
                        const SystemParams& params);

}  // namespace cran
