#include "cran/tpd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cran {

void SearchBounds::validate() const {
    if (!(rho_min > 0.0 && rho_min < rho_max && rho_max < kMaxBerThreshold)) {
        throw std::invalid_argument("search bounds need 0 < rho_min < rho_max < 0.2");
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("bisection tolerance must be positive");
    }
}

int SearchBounds::max_bisection_steps() const {
    const double ratio = (rho_max - rho_min) / tolerance;
    return ratio <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(ratio)));
}

PairContext::PairContext(ChannelModel channel_, QosRequirement qos_, SystemParams params_,
                         McsTable table_, SearchBounds bounds_)
    : channel(channel_),
      qos(qos_),
      params(params_),
      table(std::move(table_)),
      bounds(bounds_),
      arrival_bits(qos_.arrival_rate * params_.slot_duration) {
    validate();
}

void PairContext::validate() const {
    channel.validate();
    params.validate();
    qos.validate(params);
    bounds.validate();
}

int PairContext::max_transmissions() const {
    return max_feasible_transmissions(qos.total_delay_budget, params);
}

double expected_rb_cost(int rb_count, double mean_bler, int transmissions) {
    if (rb_count < 1 || transmissions < 1) {
        throw std::domain_error("expected_rb_cost needs r >= 1 and X >= 1");
    }
    if (!(mean_bler >= 0.0 && mean_bler < 1.0)) {
        throw std::domain_error("expected_rb_cost needs 0 <= P < 1");
    }
    double h = 1.0;
    for (int x = 1; x < transmissions; ++x) {
        h = 1.0 + mean_bler * h;
    }
    return rb_count * h;
}

CoupledCapacity coupled_capacity(double rho, int rb_count, double queue_budget,
                                 const PairContext& ctx) {
    const ModeDistribution modes(rho, ctx.channel, ctx.table);
    CoupledCapacity out;
    out.service_bits = rb_count * modes.expected_info_per_rb(ctx.params);
    out.theta = latency_exponent(out.service_bits, ctx.qos.arrival_rate, queue_budget,
                                 ctx.qos.lvp_threshold, ctx.params);
    out.capacity = out.theta > 0.0
                       ? effective_capacity(modes, rb_count, out.theta, ctx.params)
                       : out.service_bits / ctx.params.slot_duration;
    return out;
}

BisectionResult solve_ber_threshold(int rb_count, int transmissions, const PairContext& ctx,
                                    bool keep_trace) {
    const auto split = delay_split(ctx.qos.total_delay_budget, transmissions, ctx.params);
    if (!split) {
        throw std::domain_error("solve_ber_threshold: no queueing budget left for this X");
    }
    const double lambda = ctx.qos.arrival_rate;
    BisectionResult out;
    auto probe = [&](double rho) {
        const auto c = coupled_capacity(rho, rb_count, split->queue_budget, ctx);
        const bool meets = c.capacity >= lambda;
        if (keep_trace) {
            out.probes.push_back({rho, c.theta, c.capacity, meets});
        }
        return meets;
    };

    double lo = ctx.bounds.rho_min;
    double hi = ctx.bounds.rho_max;
    if (!probe(hi)) {
        return out;
    }
    while (hi - lo > ctx.bounds.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
        ++out.steps;
    }
    out.rho = hi;
    return out;
}

namespace {

// Averaged BLER when the residual-BLER target is reachable with X transmissions,
// nullopt otherwise. Saturated values are rejected from the direct integral
// (accurate to ~1e-10 there): the true value then exceeds 1 - 2e-6, whose X-th
// power is above any target this rejects.
std::optional<double> decodable_bler(double rho, int transmissions, const PairContext& ctx) {
    AverageBlerOptions rough;
    rough.saturation_complement = false;
    double bler = average_bler(rho, ctx.channel, ctx.params.code_block_bits, ctx.table, rough);
    if (bler > kSaturatedBler) {
        if (std::pow(1.0 - 2e-6, transmissions) > ctx.qos.decode_bler_threshold) {
            return std::nullopt;
        }
        bler = average_bler(rho, ctx.channel, ctx.params.code_block_bits, ctx.table);
    }
    if (!(std::pow(bler, transmissions) <= ctx.qos.decode_bler_threshold) || !(bler < 1.0)) {
        return std::nullopt;
    }
    return bler;
}

// Builds the full candidate at (r, rho, X) and applies the window, decoding
// and RB-budget checks. nullopt when any of them fails.
std::optional<TpdSolution> assemble(int rb_count, double rho, const DelaySplit& split,
                                    const PairContext& ctx) {
    const auto c = coupled_capacity(rho, rb_count, split.queue_budget, ctx);
    if (!(c.theta > 0.0) || c.capacity < ctx.qos.arrival_rate) {
        return std::nullopt;
    }
    if (!feasibility_window(c.service_bits, ctx.qos.arrival_rate, ctx.qos.lvp_threshold,
                            ctx.params)) {
        return std::nullopt;
    }
    const auto decoded = decodable_bler(rho, split.transmissions, ctx);
    if (!decoded) {
        return std::nullopt;
    }
    const double bler = *decoded;
    const double cost = expected_rb_cost(rb_count, bler, split.transmissions);
    if (cost > ctx.params.total_rbs) {
        return std::nullopt;
    }
    TpdSolution s;
    s.rb_count = rb_count;
    s.ber_threshold = rho;
    s.transmissions = split.transmissions;
    s.latency_exponent = c.theta;
    s.queue_budget = split.queue_budget;
    s.expected_cost = cost;
    s.mean_bler = bler;
    s.expected_service_bits = c.service_bits;
    s.effective_capacity = c.capacity;
    return s;
}

}  // namespace

std::optional<TpdSolution> solve_pair(const PairContext& ctx, const SolveOptions& opt,
                                      SolveStats* stats) {
    const int x_cap = opt.max_transmissions > 0
                          ? std::min(opt.max_transmissions, ctx.max_transmissions())
                          : ctx.max_transmissions();
    std::optional<TpdSolution> best;
    for (int x = 1; x <= x_cap; ++x) {
        const auto split = delay_split(ctx.qos.total_delay_budget, x, ctx.params);
        if (!split) {
            break;
        }
        for (int r = 1; r <= ctx.params.total_rbs; ++r) {
            if (opt.early_break && best && r > best->expected_cost) {
                break;
            }
            const auto b = solve_ber_threshold(r, x, ctx);
            if (stats) {
                ++stats->candidates;
                stats->probes += b.steps + 1;
            }
            if (!b.rho) {
                continue;
            }
            auto candidate = assemble(r, *b.rho, *split, ctx);
            if (candidate && (!best || candidate->expected_cost < best->expected_cost)) {
                best = candidate;
            }
        }
    }
    return best;
}

std::optional<TpdSolution> evaluate_fixed_config(const PairContext& ctx, double rho,
                                                 int transmissions) {
    if (!(rho > 0.0 && rho < kMaxBerThreshold)) {
        throw std::domain_error("fixed BER threshold must lie in (0, 0.2)");
    }
    if (transmissions > ctx.params.max_transmissions) {
        return std::nullopt;
    }
    const auto split = delay_split(ctx.qos.total_delay_budget, transmissions, ctx.params);
    if (!split) {
        return std::nullopt;
    }
    // The decoding constraint does not depend on r.
    if (!decodable_bler(rho, transmissions, ctx)) {
        return std::nullopt;
    }
    for (int r = 1; r <= ctx.params.total_rbs; ++r) {
        if (auto s = assemble(r, rho, *split, ctx)) {
            return s;
        }
    }
    return std::nullopt;
}

Certification certify(const TpdSolution& s, const PairContext& ctx) {
    Certification out;
    auto fail = [&](const std::string& what) {
        if (out.ok) {
            out.ok = false;
            out.violation = what;
        }
    };
    auto close = [](double a, double b, double rel) {
        return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
    };

    if (s.rb_count < 1 || s.transmissions < 1) {
        fail("r and X must be >= 1");
        return out;
    }
    if (!(s.ber_threshold > 0.0 && s.ber_threshold < kMaxBerThreshold)) {
        fail("BER threshold outside (0, 0.2)");
        return out;
    }
    const auto split = delay_split(ctx.qos.total_delay_budget, s.transmissions, ctx.params);
    if (!split) {
        fail("delay budget exhausted by service delay");
        return out;
    }
    if (!close(split->queue_budget, s.queue_budget, 1e-12)) {
        fail("queue budget does not match the delay split");
    }

    const ModeDistribution modes(s.ber_threshold, ctx.channel, ctx.table);
    const double service = s.rb_count * modes.expected_info_per_rb(ctx.params);
    const double lambda = ctx.qos.arrival_rate;
    if (!feasibility_window(service, lambda, ctx.qos.lvp_threshold, ctx.params)) {
        fail("mean service outside the feasibility window");
    }
    const double per_slot = lambda * ctx.params.slot_duration;
    const double theta =
        -std::log(ctx.qos.lvp_threshold * service / per_slot) / (lambda * split->queue_budget);
    if (!(theta > 0.0)) {
        fail("latency exponent not positive");
        return out;
    }
    if (!close(theta, s.latency_exponent, 1e-9)) {
        fail("latency exponent does not match the delay-violation target");
    }
    // Direct MGF rather than the log1p form used by the solver.
    double mgf = 0.0;
    const auto p = modes.probabilities();
    for (std::size_t j = 0; j < p.size(); ++j) {
        mgf += p[j] * std::exp(-theta * s.rb_count *
                               ctx.params.bits_per_rb(ctx.table.efficiency(static_cast<int>(j))));
    }
    const double capacity = -std::log(mgf) / (theta * ctx.params.slot_duration);
    if (capacity < lambda * (1.0 - 1e-9)) {
        fail("effective capacity below the source rate");
    }
    const double lvp = lvp_estimate(theta, lambda, split->queue_budget, service, ctx.params);
    if (!close(lvp, ctx.qos.lvp_threshold, 1e-9)) {
        fail("delay-violation estimate does not meet its target");
    }
    const double bler =
        average_bler(s.ber_threshold, ctx.channel, ctx.params.code_block_bits, ctx.table);
    if (!(std::pow(bler, s.transmissions) <= ctx.qos.decode_bler_threshold)) {
        fail("residual BLER above the decoding threshold");
    }
    double cost = 0.0;
    double term = s.rb_count;
    for (int x = 0; x < s.transmissions; ++x) {
        cost += term;
        term *= bler;
    }
    if (!close(cost, s.expected_cost, 1e-12)) {
        fail("expected RB cost does not match");
    }
    if (cost > ctx.params.total_rbs) {
        fail("expected RB cost exceeds the RB budget");
    }
    return out;
}

}  // namespace cran
