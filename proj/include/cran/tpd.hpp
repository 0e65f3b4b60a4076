#pragma once

// Per-pair transmission parameter decision: joint choice of the RB count r,
// BER threshold rho and transmission count X that minimises the expected RB
// cost while meeting the rate, delay-violation and decoding constraints.

#include <optional>
#include <string>
#include <vector>

#include "cran/amc.hpp"
#include "cran/mcs_table.hpp"
#include "cran/qos.hpp"
#include "cran/system_params.hpp"

namespace cran {

struct SearchBounds {
    double rho_min = 1e-9;
    double rho_max = 0.199;
    double tolerance = 1e-9;  // absolute, on rho

    void validate() const;
    /// ceil(log2((rho_max - rho_min) / tolerance)).
    int max_bisection_steps() const;
};

struct PairContext {
    PairContext(ChannelModel channel, QosRequirement qos, SystemParams params, McsTable table,
                SearchBounds bounds = {});

    ChannelModel channel;
    QosRequirement qos;
    SystemParams params;
    McsTable table;
    SearchBounds bounds;
    double arrival_bits;  // lambda * T_s, fixed at construction

    void validate() const;
    /// Delay-feasible X cap (<= params.max_transmissions).
    int max_transmissions() const;
};

struct TpdSolution {
    int rb_count = 0;
    double ber_threshold = 0.0;
    int transmissions = 0;
    double latency_exponent = 0.0;    // 1/bit
    double queue_budget = 0.0;        // s
    double expected_cost = 0.0;       // RB/slot
    double mean_bler = 0.0;
    double expected_service_bits = 0.0;  // E[r psi], bit/slot
    double effective_capacity = 0.0;     // bit/s
};

/// r * sum_{x<X} P^x, evaluated by Horner so that X = 1 gives exactly r.
double expected_rb_cost(int rb_count, double mean_bler, int transmissions);

/// Effective capacity with theta tied to rho through the delay-violation target.
struct CoupledCapacity {
    double theta = 0.0;
    double service_bits = 0.0;
    /// bit/s. When theta <= 0 the service mean already exceeds the window and
    /// the constraint is treated as met, with capacity E[r psi] / T_s.
    double capacity = 0.0;
};

CoupledCapacity coupled_capacity(double rho, int rb_count, double queue_budget,
                                 const PairContext& ctx);

struct BisectionProbe {
    double rho = 0.0;
    double theta = 0.0;
    double capacity = 0.0;
    bool meets_rate = false;
};

struct BisectionResult {
    std::optional<double> rho;  // nullopt: capacity at rho_max below the source rate
    int steps = 0;
    std::vector<BisectionProbe> probes;
};

/// Smallest rho (to within the tolerance, from above) whose coupled effective
/// capacity reaches the source rate. Requires a feasible delay split for X.
BisectionResult solve_ber_threshold(int rb_count, int transmissions, const PairContext& ctx,
                                    bool keep_trace = false);

struct SolveOptions {
    bool early_break = true;
    int max_transmissions = 0;  // 0: ctx.max_transmissions()
};

struct SolveStats {
    int candidates = 0;  // (X, r) pairs that reached the bisection
    int probes = 0;
};

std::optional<TpdSolution> solve_pair(const PairContext& ctx, const SolveOptions& opt = {},
                                      SolveStats* stats = nullptr);

/// Cheapest configuration with (rho, X) pinned: the minimal r meeting every
/// constraint. Used for the fixed-parameter ablations.
std::optional<TpdSolution> evaluate_fixed_config(const PairContext& ctx, double rho,
                                                 int transmissions);

struct Certification {
    bool ok = true;
    std::string violation;  // first failed check
};

/// Recomputes every constraint from the solution's (r, rho, X) alone.
Certification certify(const TpdSolution& solution, const PairContext& ctx);

}  // namespace cran
