#include "cran/plan.hpp"

#include <sstream>

#include "cran/parallel.hpp"

namespace cran {

PairContext pair_context(const Scenario& s, int m, int n, const SearchBounds& bounds) {
    return PairContext(ChannelModel{s.snr(m, n)}, s.users[static_cast<std::size_t>(n)].qos,
                       s.params, s.table, bounds);
}

BestChannelBaseline best_channel_assignment(const Scenario& s, const ScaledCosts& costs) {
    const int M = costs.aps;
    const int N = costs.users;
    BestChannelBaseline out;
    std::vector<int> owner(static_cast<std::size_t>(N), -1);
    std::vector<int> load(static_cast<std::size_t>(M), 0);
    for (int n = 0; n < N; ++n) {
        int best = -1;
        for (int m = 0; m < M; ++m) {
            if (costs.feasible(m, n) && (best < 0 || s.snr(m, n) > s.snr(best, n))) {
                best = m;
            }
        }
        if (best < 0) {
            return out;
        }
        owner[static_cast<std::size_t>(n)] = best;
        ++load[static_cast<std::size_t>(best)];
    }
    for (int m = 0; m < M; ++m) {
        if (load[static_cast<std::size_t>(m)] > 0) {
            continue;
        }
        int pick = -1;
        std::int64_t pick_delta = 0;
        for (int n = 0; n < N; ++n) {
            const int cur = owner[static_cast<std::size_t>(n)];
            if (!costs.feasible(m, n) || load[static_cast<std::size_t>(cur)] < 2) {
                continue;
            }
            const std::int64_t delta = costs.at(m, n) - costs.at(cur, n);
            if (pick < 0 || delta < pick_delta) {
                pick = n;
                pick_delta = delta;
            }
        }
        if (pick < 0) {
            return out;
        }
        --load[static_cast<std::size_t>(owner[static_cast<std::size_t>(pick)])];
        owner[static_cast<std::size_t>(pick)] = m;
        ++load[static_cast<std::size_t>(m)];
        ++out.repaired_moves;
    }
    out.user_ap = owner;
    for (int n = 0; n < N; ++n) {
        out.scaled_objective += costs.at(owner[static_cast<std::size_t>(n)], n);
    }
    return out;
}

NetworkPlan plan_network(const Scenario& s, const PlanOptions& opt) {
    s.validate();
    const int M = s.ap_count();
    const int N = s.user_count();
    const std::size_t total = static_cast<std::size_t>(M) * static_cast<std::size_t>(N);

    NetworkPlan plan;
    plan.pairs.resize(total);
    parallel_for(total, opt.threads, [&](std::size_t k) {
        const auto ctx = pair_context(s, static_cast<int>(k / static_cast<std::size_t>(N)),
                                      static_cast<int>(k % static_cast<std::size_t>(N)), opt.bounds);
        plan.pairs[k] = solve_pair(ctx);
    });

    plan.costs = CostMatrix(M, N);
    for (std::size_t k = 0; k < total; ++k) {
        if (plan.pairs[k]) {
            plan.costs.cost[k] = plan.pairs[k]->expected_cost;
        }
    }
    plan.scaled = integerize_costs(plan.costs, opt.cost_scale);
    plan.assignment = solve_assignment(plan.scaled, opt.epsilon_denominator);

    if (const auto cs = verify_eps_cs(plan.assignment, plan.scaled); !cs.ok) {
        throw std::logic_error("plan failed the epsilon-CS check: " + cs.violation);
    }
    for (int n = 0; n < N; ++n) {
        const int m = plan.assignment.user_ap[static_cast<std::size_t>(n)];
        const auto& sol = plan.pair(m, n);
        const auto cert = certify(*sol, pair_context(s, m, n, opt.bounds));
        if (!cert.ok) {
            std::ostringstream msg;
            msg << "pair (ap " << m << ", user " << n << ") failed certification: "
                << cert.violation;
            throw std::logic_error(msg.str());
        }
        plan.total_rbs += sol->expected_cost;
    }
    plan.bandwidth_hz = plan.total_rbs * s.params.hertz_per_rb();
    plan.best_channel = best_channel_assignment(s, plan.scaled);
    return plan;
}

}  // namespace cran
