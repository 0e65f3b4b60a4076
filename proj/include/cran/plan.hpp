#pragma once

// End-to-end network planning: every AP-user pair is sized by the TPD solver,
// the resulting expected RB costs feed the auction, and a best-channel
// association is computed alongside for comparison.

#include <optional>
#include <vector>

#include "cran/auction.hpp"
#include "cran/scenario.hpp"
#include "cran/tpd.hpp"

namespace cran {

struct PlanOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    double cost_scale = 1000.0;
    std::int64_t epsilon_denominator = 0;  // 0: 2M
    SearchBounds bounds;
};

struct BestChannelBaseline {
    std::vector<int> user_ap;  // empty if the greedy repair failed
    int repaired_moves = 0;
    std::int64_t scaled_objective = 0;
};

struct NetworkPlan {
    std::vector<std::optional<TpdSolution>> pairs;  // M x N row-major
    CostMatrix costs;
    ScaledCosts scaled;
    Assignment assignment;
    BestChannelBaseline best_channel;
    double total_rbs = 0.0;      // RB/slot, unscaled sum over assigned pairs
    double bandwidth_hz = 0.0;

    const std::optional<TpdSolution>& pair(int m, int n) const {
        return pairs[static_cast<std::size_t>(m) * costs.users + static_cast<std::size_t>(n)];
    }
};

PairContext pair_context(const Scenario& s, int m, int n, const SearchBounds& bounds = {});

/// Solves all pairs (in parallel), runs the auction and certifies the result:
/// each assigned pair passes certify() and the prices pass verify_eps_cs().
/// Throws InfeasibleScenario when some user cannot be served.
NetworkPlan plan_network(const Scenario& s, const PlanOptions& opt = {});

/// Each user to its strongest feasible AP (lowest index on ties), then empty
/// APs take over the cheapest movable user from an AP that keeps at least one.
BestChannelBaseline best_channel_assignment(const Scenario& s, const ScaledCosts& costs);

}  // namespace cran
