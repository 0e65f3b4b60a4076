#pragma once

// One-dimensional parameter sweeps over a single AP-user pair, comparing the
// joint cross-layer optimum with pinned (rho, X) configurations and an ideal
// Shannon-gap (IFC) link.

#include <optional>
#include <string>
#include <vector>

#include "cran/table.hpp"
#include "cran/tpd.hpp"

namespace cran {

enum class SweepAxis { source_rate, total_delay, lvp_threshold, decode_bler, mean_snr };

SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);
/// Unit of the axis values as they appear in configs and tables.
std::string axis_unit(SweepAxis axis);

struct PairSpec {
    double mean_snr_db = 15.0;
    QosRequirement qos;
};

struct FixedConfig {
    double ber_threshold = 1e-3;
    int transmissions = 1;

    std::string label() const;
};

std::vector<FixedConfig> default_fixed_configs();

struct SweepSpec {
    std::string name;
    SweepAxis axis = SweepAxis::mean_snr;
    std::vector<double> values;  // axis units (dB for mean_snr)
    PairSpec base;
    std::vector<FixedConfig> fixed = default_fixed_configs();
    bool shannon_ifc = true;
    double ifc_ber = 1e-3;

    /// Grid strictly increasing with at least 3 points.
    void validate() const;
    /// Base pair with the axis set to `value`.
    PairSpec at(double value) const;
};

struct IfcResult {
    int rb_count = 0;
    double latency_exponent = 0.0;
    double queue_budget = 0.0;
};

/// Ideal link: psi = alpha beta log2(1 + snr / gap) over the whole Rayleigh
/// distribution (no outage), one transmission. Smallest r meeting the
/// effective-capacity target, or nullopt.
std::optional<IfcResult> shannon_ifc_rbs(const ChannelModel& channel, const QosRequirement& qos,
                                         const SystemParams& params, double ifc_ber);

struct SweepPoint {
    double value = 0.0;
    std::optional<TpdSolution> cross_layer;
    std::vector<std::optional<TpdSolution>> fixed;
    std::optional<IfcResult> ifc;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;

    /// Long form: one row per (point, strategy).
    Table table(const SystemParams& params) const;
    /// (axis, bandwidth, transmissions) of the cross-layer optimum.
    Table optimum_table(const SystemParams& params) const;
    /// Realised gain over the best fixed configuration per point.
    Table gain_table(const SystemParams& params) const;
};

SweepResult run_sweep(const SweepSpec& spec, const SystemParams& params, const McsTable& table,
                      const SearchBounds& bounds = {}, unsigned threads = 0);

}  // namespace cran
