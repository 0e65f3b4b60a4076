#pragma once

// Adaptive modulation and coding over a Rayleigh block-fading channel.
//
// A BER threshold rho fixes one SNR switching threshold per MCS mode; the
// transmitter uses the highest mode whose threshold is below the current SNR
// and is silent (outage) below the lowest one. All channel-averaged
// quantities are conditional on the channel not being in outage, i.e. they
// are normalised by the usable probability P_T = Pr{snr >= threshold_0}.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cran/mcs_table.hpp"
#include "cran/system_params.hpp"

namespace cran {

/// Largest admissible BER threshold. At 0.2 every switching threshold is 0.
inline constexpr double kMaxBerThreshold = 0.2;

/// Upper integration limit of a segment is capped at
/// start + mean_snr * ln(1 / kTailFraction); the neglected exponential mass is
/// at most kTailFraction of the segment's starting weight.
inline constexpr double kTailFraction = 1e-16;

struct ChannelModel {
    double mean_snr = 1.0;  // linear

    static ChannelModel from_db(double db);
    double mean_snr_db() const;
    void validate() const;
};

struct MgfContext {
    double ber_threshold = 1e-3;
    int rb_count = 1;
    double latency_exponent = 0.0;  // 1/bit
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// Threshold per mode plus a trailing +inf sentinel (size J + 2).
/// Throws std::domain_error unless 0 < rho <= 0.2.
std::vector<double> switching_thresholds(double rho, const McsTable& table);

/// Highest j with thresholds[j] <= snr; nullopt (outage) below thresholds[0].
std::optional<int> select_mcs(double snr, std::span<const double> thresholds);

double bit_error_rate(int j, double snr, const McsTable& table);

/// 1 - (1 - Pb)^L evaluated as -expm1(L * log1p(-Pb)).
double block_error_rate(int j, double snr, int code_block_bits, const McsTable& table);

/// (1 - Pb)^L, the probability that an L-bit block decodes.
double block_success_rate(int j, double snr, int code_block_bits, const McsTable& table);

double mcs_usable_probability(double rho, const ChannelModel& channel, const McsTable& table);

/// Unnormalised Rayleigh mass of each MCS segment, exp(-g_j/mean) - exp(-g_{j+1}/mean).
/// The entries telescope to mcs_usable_probability().
std::vector<double> segment_weights(std::span<const double> thresholds, double mean_snr);

/// Conditional distribution of the selected MCS mode for a fixed (rho, mean SNR).
/// Probabilities are computed relative to threshold_0, so they stay accurate
/// even when P_T itself underflows.
class ModeDistribution {
public:
    ModeDistribution(double rho, const ChannelModel& channel, const McsTable& table);

    double ber_threshold() const { return rho_; }
    double mean_snr() const { return mean_snr_; }
    std::span<const double> thresholds() const { return thresholds_; }
    /// Pr{mode j | no outage}; sums to 1.
    std::span<const double> probabilities() const { return probability_; }
    double usable_probability() const { return usable_; }

    /// E[psi], bits per RB.
    double expected_info_per_rb(const SystemParams& params) const;
    /// E[exp(-theta r psi)].
    double mgf(double theta, int rb_count, const SystemParams& params) const;
    /// ln E[exp(-theta r psi)] without cancellation for small theta.
    double log_mgf(double theta, int rb_count, const SystemParams& params) const;

private:
    double rho_;
    double mean_snr_;
    std::vector<double> efficiency_;
    std::vector<double> thresholds_;
    std::vector<double> probability_;
    double usable_;
};

struct SegmentDiagnostics {
    int segment = 0;
    double lower = 0.0;
    double upper = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

struct AverageBlerOptions {
    double relative_tolerance = 1e-10;
    int max_depth = 40;
    /// Re-derive saturated results (within 1e-6 of 1) as 1 - success. Without
    /// it such results carry the direct integral's rounding and may exceed 1.
    bool saturation_complement = true;
};

/// Results above this are saturated; see AverageBlerOptions.
inline constexpr double kSaturatedBler = 1.0 - 1e-6;

/// Channel-averaged per-transmission BLER, conditional on no outage.
/// Throws NumericError (with the failing segment) if quadrature does not converge.
double average_bler(double rho, const ChannelModel& channel, int code_block_bits,
                    const McsTable& table, const AverageBlerOptions& opt = {},
                    std::vector<SegmentDiagnostics>* diagnostics = nullptr);

/// 1 - average_bler(), integrated directly so it keeps relative precision when
/// the BLER is within rounding of 1.
double average_decode_success(double rho, const ChannelModel& channel, int code_block_bits,
                              const McsTable& table, const AverageBlerOptions& opt = {});

double expected_info_per_rb(double rho, const ChannelModel& channel, const SystemParams& params,
                            const McsTable& table);

double ec_mgf(const MgfContext& ctx, const ChannelModel& channel, const SystemParams& params,
              const McsTable& table);

/// Gap-to-capacity efficiency log2(1 + snr / gap), gap = -2 ln(5 rho) / 3.
double shannon_gap_efficiency(double snr, double rho);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

/// Exponential SNR draw with the given mean. With `lower_bound` > 0 the draw is
/// conditioned on snr >= lower_bound (memoryless shift, exact).
double sample_snr(double mean_snr, Rng& rng, double lower_bound = 0.0);

}  // namespace cran
