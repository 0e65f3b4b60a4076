#include "cran/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "cran/parallel.hpp"
#include "cran/quadrature.hpp"

namespace cran {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// E[f(snr)] over the unconditioned Rayleigh density.
template <typename F>
double rayleigh_mean(double mean, F f) {
    const double upper = mean * std::log(1.0 / kTailFraction);
    quadrature::SimpsonOptions opt;
    opt.initial_panels = 32;
    const auto r = quadrature::adaptive_simpson(
        [&](double g) { return f(g) * std::exp(-g / mean) / mean; }, 0.0, upper, opt);
    if (!r.converged) {
        throw NumericError("IFC baseline quadrature did not converge");
    }
    return r.value;
}

}  // namespace

SweepAxis parse_axis(const std::string& name) {
    if (name == "source_rate") return SweepAxis::source_rate;
    if (name == "total_delay") return SweepAxis::total_delay;
    if (name == "lvp_threshold") return SweepAxis::lvp_threshold;
    if (name == "decode_bler") return SweepAxis::decode_bler;
    if (name == "mean_snr") return SweepAxis::mean_snr;
    throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::source_rate: return "source_rate";
        case SweepAxis::total_delay: return "total_delay";
        case SweepAxis::lvp_threshold: return "lvp_threshold";
        case SweepAxis::decode_bler: return "decode_bler";
        case SweepAxis::mean_snr: return "mean_snr";
    }
    return {};
}

std::string axis_unit(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::source_rate: return "bit/s";
        case SweepAxis::total_delay: return "s";
        case SweepAxis::mean_snr: return "dB";
        default: return "-";
    }
}

std::string FixedConfig::label() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "fixed_rho=%g_X=%d", ber_threshold, transmissions);
    return buf;
}

std::vector<FixedConfig> default_fixed_configs() {
    std::vector<FixedConfig> out;
    for (double rho : {1e-5, 1e-3}) {
        for (int x : {1, 2, 3}) {
            out.push_back({rho, x});
        }
    }
    return out;
}

void SweepSpec::validate() const {
    if (name.empty()) {
        throw std::invalid_argument("sweep needs a name");
    }
    if (values.size() < 3) {
        throw std::invalid_argument("sweep '" + name + "' needs at least 3 grid points");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument("sweep '" + name + "' grid must be strictly increasing");
        }
    }
    for (const auto& f : fixed) {
        if (!(f.ber_threshold > 0.0 && f.ber_threshold < kMaxBerThreshold) || f.transmissions < 1) {
            throw std::invalid_argument("sweep '" + name + "': bad fixed configuration");
        }
    }
    if (!(ifc_ber > 0.0 && ifc_ber < kMaxBerThreshold)) {
        throw std::invalid_argument("sweep '" + name + "': ifc_ber must lie in (0, 0.2)");
    }
}

PairSpec SweepSpec::at(double value) const {
    PairSpec p = base;
    switch (axis) {
        case SweepAxis::source_rate: p.qos.arrival_rate = value; break;
        case SweepAxis::total_delay: p.qos.total_delay_budget = value; break;
        case SweepAxis::lvp_threshold: p.qos.lvp_threshold = value; break;
        case SweepAxis::decode_bler: p.qos.decode_bler_threshold = value; break;
        case SweepAxis::mean_snr: p.mean_snr_db = value; break;
    }
    return p;
}

std::optional<IfcResult> shannon_ifc_rbs(const ChannelModel& channel, const QosRequirement& qos,
                                         const SystemParams& params, double ifc_ber) {
    const auto split = delay_split(qos.total_delay_budget, 1, params);
    if (!split) {
        return std::nullopt;
    }
    const double gap = -2.0 * std::log(5.0 * ifc_ber) / 3.0;
    const double ab = params.bits_per_rb(1.0);
    auto psi = [&](double g) { return ab * std::log2(1.0 + g / gap); };
    const double mean_psi = rayleigh_mean(channel.mean_snr, psi);
    for (int r = 1; r <= params.total_rbs; ++r) {
        const double service = r * mean_psi;
        const double theta = latency_exponent(service, qos.arrival_rate, split->queue_budget,
                                              qos.lvp_threshold, params);
        if (!(theta > 0.0)) {
            return std::nullopt;  // mean service already past the window
        }
        const double shifted =
            rayleigh_mean(channel.mean_snr, [&](double g) { return std::expm1(-theta * r * psi(g)); });
        const double capacity = -std::log1p(shifted) / (theta * params.slot_duration);
        if (capacity >= qos.arrival_rate &&
            feasibility_window(service, qos.arrival_rate, qos.lvp_threshold, params)) {
            return IfcResult{r, theta, split->queue_budget};
        }
    }
    return std::nullopt;
}

SweepResult run_sweep(const SweepSpec& spec, const SystemParams& params, const McsTable& table,
                      const SearchBounds& bounds, unsigned threads) {
    spec.validate();
    SweepResult out;
    out.spec = spec;
    out.points.resize(spec.values.size());
    parallel_for(spec.values.size(), threads, [&](std::size_t k) {
        SweepPoint& pt = out.points[k];
        pt.value = spec.values[k];
        pt.fixed.resize(spec.fixed.size());
        const PairSpec p = spec.at(pt.value);
        // A delay budget too short for one attempt is an infeasible point.
        if (!(p.qos.total_delay_budget > params.attempt_duration())) {
            return;
        }
        const PairContext ctx(ChannelModel::from_db(p.mean_snr_db), p.qos, params, table, bounds);
        pt.cross_layer = solve_pair(ctx);
        for (std::size_t f = 0; f < spec.fixed.size(); ++f) {
            pt.fixed[f] =
                evaluate_fixed_config(ctx, spec.fixed[f].ber_threshold, spec.fixed[f].transmissions);
        }
        if (spec.shannon_ifc) {
            pt.ifc = shannon_ifc_rbs(ctx.channel, p.qos, params, spec.ifc_ber);
        }
    });
    return out;
}

Table SweepResult::table(const SystemParams& params) const {
    Table t;
    t.name = spec.name;
    t.columns = {{axis_name(spec.axis), axis_unit(spec.axis)},
                 {"strategy", "label"},
                 {"ber_threshold", "-"},
                 {"transmissions", "count"},
                 {"rb_count", "rb"},
                 {"latency_exponent", "1/bit"},
                 {"expected_rbs", "rb/slot"},
                 {"bandwidth", "Hz"},
                 {"feasible", "bool"}};
    const double hz = params.hertz_per_rb();
    auto add = [&](double v, const std::string& label, const std::optional<TpdSolution>& s) {
        if (s) {
            t.add_row({v, label, s->ber_threshold, static_cast<double>(s->transmissions),
                       static_cast<double>(s->rb_count), s->latency_exponent, s->expected_cost,
                       s->expected_cost * hz, 1.0});
        } else {
            t.add_row({v, label, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, 0.0});
        }
    };
    for (const auto& pt : points) {
        add(pt.value, "cross_layer", pt.cross_layer);
        for (std::size_t f = 0; f < spec.fixed.size(); ++f) {
            add(pt.value, spec.fixed[f].label(), pt.fixed[f]);
        }
        if (spec.shannon_ifc) {
            if (pt.ifc) {
                const double r = pt.ifc->rb_count;
                t.add_row({pt.value, "shannon_ifc", spec.ifc_ber, 1.0, r, pt.ifc->latency_exponent,
                           r, r * hz, 1.0});
            } else {
                t.add_row({pt.value, "shannon_ifc", spec.ifc_ber, kNaN, kNaN, kNaN, kNaN, kNaN, 0.0});
            }
        }
    }
    return t;
}

Table SweepResult::optimum_table(const SystemParams& params) const {
    Table t;
    t.name = spec.name + "_optimum";
    t.columns = {{axis_name(spec.axis), axis_unit(spec.axis)},
                 {"bandwidth", "Hz"},
                 {"transmissions", "count"}};
    for (const auto& pt : points) {
        if (pt.cross_layer) {
            t.add_row({pt.value, pt.cross_layer->expected_cost * params.hertz_per_rb(),
                       static_cast<double>(pt.cross_layer->transmissions)});
        } else {
            t.add_row({pt.value, kNaN, kNaN});
        }
    }
    return t;
}

Table SweepResult::gain_table(const SystemParams& params) const {
    Table t;
    t.name = spec.name + "_gain";
    t.columns = {{axis_name(spec.axis), axis_unit(spec.axis)},
                 {"cross_layer_bandwidth", "Hz"},
                 {"best_fixed_bandwidth", "Hz"},
                 {"gain", "-"}};
    const double hz = params.hertz_per_rb();
    for (const auto& pt : points) {
        double best_fixed = std::numeric_limits<double>::infinity();
        for (const auto& f : pt.fixed) {
            if (f) {
                best_fixed = std::min(best_fixed, f->expected_cost);
            }
        }
        const double cross = pt.cross_layer ? pt.cross_layer->expected_cost : kNaN;
        const double gain = pt.cross_layer && std::isfinite(best_fixed)
                                ? (best_fixed - cross) / best_fixed
                                : kNaN;
        t.add_row({pt.value, cross * hz, std::isfinite(best_fixed) ? best_fixed * hz : kNaN, gain});
    }
    return t;
}

}  // namespace cran
