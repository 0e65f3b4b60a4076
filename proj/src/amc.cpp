#include "cran/amc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cran/quadrature.hpp"
#include "cran/units.hpp"

namespace cran {

namespace {

// 2^v - 1; shared by the threshold and BER formulas so that the threshold
// identity Pb(j, g_j) = rho holds to rounding.
double mode_gain(double spectral_efficiency) { return std::exp2(spectral_efficiency) - 1.0; }

void check_rho(double rho) {
    if (!(rho > 0.0 && rho <= kMaxBerThreshold)) {
        std::ostringstream msg;
        msg << "BER threshold must lie in (0, 0.2], got " << rho;
        throw std::domain_error(msg.str());
    }
}

double tail_span(double mean_snr) { return mean_snr * std::log(1.0 / kTailFraction); }

double bit_error_rate_raw(double gain, double snr) {
    return 0.2 * std::exp(-1.5 * snr / gain);
}

enum class Outcome { failure, success };

double integrate_blocks(double rho, const ChannelModel& channel, int code_block_bits,
                        const McsTable& table, const AverageBlerOptions& opt, Outcome outcome,
                        std::vector<SegmentDiagnostics>* diagnostics) {
    channel.validate();
    if (code_block_bits < 1) {
        throw std::domain_error("code block length must be >= 1");
    }
    const auto thresholds = switching_thresholds(rho, table);
    const double mean = channel.mean_snr;
    const double bits = code_block_bits;
    const int top = table.top_index();
    const double g0 = thresholds[0];

    quadrature::SimpsonOptions qopt;
    qopt.relative_tolerance = opt.relative_tolerance;
    qopt.max_depth = opt.max_depth;

    double total = 0.0;
    for (int j = 0; j <= top; ++j) {
        const double lo = thresholds[static_cast<std::size_t>(j)];
        const double hi = thresholds[static_cast<std::size_t>(j) + 1];
        // Mass of the conditional density at the segment start.
        const double start_weight = std::exp(-(lo - g0) / mean);
        if (start_weight == 0.0) {
            break;  // all later segments start further out
        }
        const double width = std::min(hi - lo, tail_span(mean));
        if (!(width > 0.0)) {
            continue;
        }
        const double gain = mode_gain(table.efficiency(j));
        auto integrand = [&](double u) {
            const double pb = bit_error_rate_raw(gain, lo + u);
            const double log_success = bits * std::log1p(-pb);
            const double value =
                outcome == Outcome::failure ? -std::expm1(log_success) : std::exp(log_success);
            return value * std::exp(-u / mean) / mean;
        };
        const auto r = quadrature::adaptive_simpson(integrand, 0.0, width, qopt);
        if (diagnostics) {
            diagnostics->push_back({j, lo, lo + width, r.value * start_weight,
                                    r.error_estimate * start_weight, r.evaluations});
        }
        if (!r.converged) {
            std::ostringstream msg;
            msg << "average BLER quadrature did not converge on MCS segment " << j << " ["
                << lo << ", " << lo + width << "] (rho=" << rho << ", mean_snr=" << mean
                << ", estimate=" << r.value << ", error=" << r.error_estimate << ")";
            throw NumericError(msg.str());
        }
        total += r.value * start_weight;
    }
    return total;
}

}  // namespace

ChannelModel ChannelModel::from_db(double db) { return ChannelModel{db_to_linear(db)}; }

double ChannelModel::mean_snr_db() const { return linear_to_db(mean_snr); }

void ChannelModel::validate() const {
    if (!(mean_snr > 0.0) || !std::isfinite(mean_snr)) {
        throw std::domain_error("mean SNR must be positive and finite");
    }
}

std::vector<double> switching_thresholds(double rho, const McsTable& table) {
    check_rho(rho);
    const double log_term = std::log(5.0 * rho);  // <= 0
    std::vector<double> out;
    out.reserve(table.size() + 1);
    for (double se : table.efficiencies()) {
        // (2/3)(1 - 2^v) ln(5 rho), written with the shared gain.
        out.push_back(-mode_gain(se) * log_term / 1.5);
    }
    out.push_back(std::numeric_limits<double>::infinity());
    return out;
}

std::optional<int> select_mcs(double snr, std::span<const double> thresholds) {
    if (thresholds.empty() || snr < thresholds.front()) {
        return std::nullopt;
    }
    // Sentinel excluded: last real mode is size() - 2.
    const auto real = thresholds.first(thresholds.size() - 1);
    const auto it = std::upper_bound(real.begin(), real.end(), snr);
    return static_cast<int>(it - real.begin()) - 1;
}

double bit_error_rate(int j, double snr, const McsTable& table) {
    return bit_error_rate_raw(mode_gain(table.efficiency(j)), snr);
}

double block_error_rate(int j, double snr, int code_block_bits, const McsTable& table) {
    const double pb = bit_error_rate(j, snr, table);
    return -std::expm1(code_block_bits * std::log1p(-pb));
}

double block_success_rate(int j, double snr, int code_block_bits, const McsTable& table) {
    const double pb = bit_error_rate(j, snr, table);
    return std::exp(code_block_bits * std::log1p(-pb));
}

double mcs_usable_probability(double rho, const ChannelModel& channel, const McsTable& table) {
    channel.validate();
    const auto thresholds = switching_thresholds(rho, table);
    return std::exp(-thresholds.front() / channel.mean_snr);
}

std::vector<double> segment_weights(std::span<const double> thresholds, double mean_snr) {
    std::vector<double> out;
    if (thresholds.size() < 2) {
        return out;
    }
    out.reserve(thresholds.size() - 1);
    for (std::size_t j = 0; j + 1 < thresholds.size(); ++j) {
        const double lo = std::exp(-thresholds[j] / mean_snr);
        const double hi = std::isinf(thresholds[j + 1]) ? 0.0 : std::exp(-thresholds[j + 1] / mean_snr);
        out.push_back(lo - hi);
    }
    return out;
}

ModeDistribution::ModeDistribution(double rho, const ChannelModel& channel, const McsTable& table)
    : rho_(rho),
      mean_snr_(channel.mean_snr),
      efficiency_(table.efficiencies().begin(), table.efficiencies().end()),
      thresholds_(switching_thresholds(rho, table)) {
    channel.validate();
    const double g0 = thresholds_.front();
    usable_ = std::exp(-g0 / mean_snr_);
    probability_.reserve(efficiency_.size());
    for (std::size_t j = 0; j < efficiency_.size(); ++j) {
        const double start = std::exp(-(thresholds_[j] - g0) / mean_snr_);
        const double width = thresholds_[j + 1] - thresholds_[j];
        // start * (1 - exp(-width/mean)); the top segment has infinite width.
        const double leave = std::isinf(width) ? 1.0 : -std::expm1(-width / mean_snr_);
        probability_.push_back(start * leave);
    }
}

double ModeDistribution::expected_info_per_rb(const SystemParams& params) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < efficiency_.size(); ++j) {
        sum += probability_[j] * params.bits_per_rb(efficiency_[j]);
    }
    return sum;
}

double ModeDistribution::mgf(double theta, int rb_count, const SystemParams& params) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < efficiency_.size(); ++j) {
        sum += probability_[j] * std::exp(-theta * rb_count * params.bits_per_rb(efficiency_[j]));
    }
    return sum;
}

double ModeDistribution::log_mgf(double theta, int rb_count, const SystemParams& params) const {
    // ln(sum_j p_j e^{-x_j}) = log1p(sum_j p_j expm1(-x_j)) since sum_j p_j = 1.
    double shifted = 0.0;
    for (std::size_t j = 0; j < efficiency_.size(); ++j) {
        shifted +=
            probability_[j] * std::expm1(-theta * rb_count * params.bits_per_rb(efficiency_[j]));
    }
    if (shifted > -0.5) {
        return std::log1p(shifted);
    }
    // Far from 1: log-sum-exp around the smallest exponent.
    double min_x = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < efficiency_.size(); ++j) {
        if (probability_[j] > 0.0) {
            min_x = std::min(min_x, theta * rb_count * params.bits_per_rb(efficiency_[j]));
        }
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < efficiency_.size(); ++j) {
        const double x = theta * rb_count * params.bits_per_rb(efficiency_[j]);
        sum += probability_[j] * std::exp(-(x - min_x));
    }
    return -min_x + std::log(sum);
}

double average_bler(double rho, const ChannelModel& channel, int code_block_bits,
                    const McsTable& table, const AverageBlerOptions& opt,
                    std::vector<SegmentDiagnostics>* diagnostics) {
    const double failure =
        integrate_blocks(rho, channel, code_block_bits, table, opt, Outcome::failure, diagnostics);
    if (failure <= kSaturatedBler || !opt.saturation_complement) {
        return failure;
    }
    // Near 1 the direct integral can overshoot by its own rounding error; the
    // complement of the success integral is exact to rounding and stays <= 1.
    // Only an absolute error well below one ulp of 1 is needed here.
    AverageBlerOptions loose = opt;
    const double rough = std::max(1.0 - failure, 1e-300);
    loose.relative_tolerance = std::clamp(1e-18 / rough, opt.relative_tolerance, 0.1);
    return 1.0 - integrate_blocks(rho, channel, code_block_bits, table, loose, Outcome::success,
                                  nullptr);
}

double average_decode_success(double rho, const ChannelModel& channel, int code_block_bits,
                              const McsTable& table, const AverageBlerOptions& opt) {
    return integrate_blocks(rho, channel, code_block_bits, table, opt, Outcome::success, nullptr);
}

double expected_info_per_rb(double rho, const ChannelModel& channel, const SystemParams& params,
                            const McsTable& table) {
    return ModeDistribution(rho, channel, table).expected_info_per_rb(params);
}

double ec_mgf(const MgfContext& ctx, const ChannelModel& channel, const SystemParams& params,
              const McsTable& table) {
    if (ctx.latency_exponent < 0.0) {
        throw std::domain_error("latency exponent must be non-negative");
    }
    if (ctx.rb_count < 1) {
        throw std::domain_error("RB count must be >= 1");
    }
    return ModeDistribution(ctx.ber_threshold, channel, table)
        .mgf(ctx.latency_exponent, ctx.rb_count, params);
}

double shannon_gap_efficiency(double snr, double rho) {
    check_rho(rho);
    if (snr < 0.0) {
        throw std::domain_error("SNR must be non-negative");
    }
    const double gap = -2.0 * std::log(5.0 * rho) / 3.0;
    return std::log2(1.0 + snr / gap);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sample_snr(double mean_snr, Rng& rng, double lower_bound) {
    const double u = uniform01(rng);
    return lower_bound - mean_snr * std::log1p(-u);
}

}  // namespace cran
