#include "cran/qos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cran {

namespace {

bool open_unit(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

void QosRequirement::validate(const SystemParams& params) const {
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) {
        throw std::invalid_argument("arrival_rate must be positive");
    }
    if (!(total_delay_budget > params.attempt_duration())) {
        throw std::invalid_argument(
            "total_delay_budget must exceed one slot plus the feedback round trip");
    }
    if (!open_unit(lvp_threshold)) {
        throw std::invalid_argument("lvp_threshold must lie in (0, 1)");
    }
    if (!open_unit(decode_bler_threshold)) {
        throw std::invalid_argument("decode_bler_threshold must lie in (0, 1)");
    }
}

std::optional<DelaySplit> delay_split(double total_delay_budget, int transmissions,
                                      const SystemParams& params) {
    if (transmissions < 1) {
        throw std::domain_error("transmission count must be >= 1");
    }
    const double service = transmissions * params.attempt_duration();
    const double queue = total_delay_budget - service;
    if (!(queue > 0.0)) {
        return std::nullopt;
    }
    return DelaySplit{transmissions, queue, service};
}

int max_feasible_transmissions(double total_delay_budget, const SystemParams& params) {
    int x = 0;
    while (x < params.max_transmissions && delay_split(total_delay_budget, x + 1, params)) {
        ++x;
    }
    return x;
}

double latency_exponent(double expected_service_bits, double arrival_rate, double queue_budget,
                        double lvp_threshold, const SystemParams& params) {
    if (!(queue_budget > 0.0)) {
        throw std::domain_error("queue budget must be positive");
    }
    const double per_slot = arrival_rate * params.slot_duration;
    return -std::log(lvp_threshold * expected_service_bits / per_slot) /
           (arrival_rate * queue_budget);
}

double latency_exponent(const ModeDistribution& modes, int rb_count, const QosRequirement& qos,
                        double queue_budget, const SystemParams& params) {
    const double service = rb_count * modes.expected_info_per_rb(params);
    return latency_exponent(service, qos.arrival_rate, queue_budget, qos.lvp_threshold, params);
}

double effective_capacity(const ModeDistribution& modes, int rb_count, double theta,
                          const SystemParams& params) {
    if (!(theta > 0.0)) {
        throw std::domain_error("effective capacity needs a positive latency exponent");
    }
    return -modes.log_mgf(theta, rb_count, params) / (theta * params.slot_duration);
}

double effective_capacity(double rho, int rb_count, double theta, const ChannelModel& channel,
                          const SystemParams& params, const McsTable& table) {
    return effective_capacity(ModeDistribution(rho, channel, table), rb_count, theta, params);
}

double lvp_estimate(double theta, double arrival_rate, double queue_budget,
                    double expected_service_bits, const SystemParams& params) {
    if (theta < 0.0) {
        throw std::domain_error("latency exponent must be non-negative");
    }
    const double phi = arrival_rate * params.slot_duration / expected_service_bits;
    const double value = phi * std::exp(-theta * arrival_rate * queue_budget);
    return std::clamp(value, 0.0, 1.0);
}

bool feasibility_window(double expected_service_bits, double arrival_rate, double lvp_threshold,
                        const SystemParams& params) {
    const double per_slot = arrival_rate * params.slot_duration;
    return per_slot < expected_service_bits && expected_service_bits < per_slot / lvp_threshold;
}

}  // namespace cran
