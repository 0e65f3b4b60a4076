#pragma once

// Asymmetric multi-assignment by forward/reverse auction.
//
// M APs serve N >= M users; every user goes to exactly one AP and every AP
// serves at least one user. The auction works in benefit form, a = -cost,
// on integer costs. Prices and profits are kept in units of epsilon: with
// epsilon = 1/q (in integer-cost units) a cost c becomes c * q price units,
// so every update is exact int64 arithmetic and epsilon is a single unit.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cran {

class InfeasibleScenario : public std::runtime_error {
public:
    InfeasibleScenario(const std::string& what, std::vector<int> users)
        : std::runtime_error(what), users_(std::move(users)) {}
    /// Users that cannot be served (may be empty for global infeasibility).
    const std::vector<int>& users() const { return users_; }

private:
    std::vector<int> users_;
};

/// Expected RB costs, rows = APs, columns = users; +inf marks an infeasible pair.
struct CostMatrix {
    int aps = 0;
    int users = 0;
    std::vector<double> cost;  // row-major

    CostMatrix() = default;
    CostMatrix(int aps, int users, double fill = std::numeric_limits<double>::infinity());

    double& at(int m, int n) { return cost[static_cast<std::size_t>(m) * users + n]; }
    double at(int m, int n) const { return cost[static_cast<std::size_t>(m) * users + n]; }
    bool feasible(int m, int n) const;

    /// Whitespace separated rows; `inf` marks an infeasible entry, `#` a comment.
    static CostMatrix parse(std::istream& in);
    void write(std::ostream& out) const;
};

inline constexpr std::int64_t kInfeasibleCost = std::numeric_limits<std::int64_t>::max();

struct ScaledCosts {
    int aps = 0;
    int users = 0;
    double scale = 1.0;
    std::vector<std::int64_t> cost;  // kInfeasibleCost for excluded pairs

    std::int64_t at(int m, int n) const { return cost[static_cast<std::size_t>(m) * users + n]; }
    bool feasible(int m, int n) const { return at(m, n) != kInfeasibleCost; }
    /// Largest minus smallest feasible cost.
    std::int64_t spread() const;
};

/// round(scale * cost); throws std::overflow_error if scaled costs leave 2^53.
ScaledCosts integerize_costs(const CostMatrix& costs, double scale = 1000.0);

struct AuctionState {
    std::int64_t q = 1;  // epsilon = 1/q integer-cost units = 1 price unit
    std::vector<int> owner;                  // per user, -1 if unassigned
    std::vector<int> load;                   // users per AP
    std::vector<std::int64_t> profit;        // pi, price units
    std::vector<std::int64_t> price;         // p, price units
    std::int64_t mu = 0;
    std::int64_t bid_cap = 0;  // price jump for a bidder with a single candidate
    std::int64_t forward_bids = 0;
    std::int64_t reverse_steps = 0;

    AuctionState(const ScaledCosts& costs, std::int64_t q);

    std::vector<int> unassigned_aps() const;
    std::vector<int> unassigned_users() const;
};

/// Benefit a_mn = -cost_mn in price units.
std::int64_t benefit(const ScaledCosts& costs, const AuctionState& s, int m, int n);

/// One Jacobi round: every unassigned AP bids for its best user at once,
/// each user then goes to its highest bidder.
void forward_round(AuctionState& s, const ScaledCosts& costs);

/// One pass over the users unassigned at entry, in index order. Uses s.mu.
void reverse_round(AuctionState& s, const ScaledCosts& costs);

struct Assignment {
    std::vector<int> user_ap;
    std::vector<std::int64_t> ap_profit;
    std::vector<std::int64_t> user_price;
    std::int64_t mu = 0;
    std::int64_t q = 1;
    std::int64_t scaled_objective = 0;  // sum of integer costs
    double scale = 1.0;
    std::int64_t forward_bids = 0;
    std::int64_t reverse_steps = 0;
    std::int64_t iteration_cap = 0;

    /// Objective in the original cost units from the integer costs.
    double objective() const { return static_cast<double>(scaled_objective) / scale; }
    /// Bound on |objective() - true objective| from rounding plus epsilon slack.
    double rounding_bound() const {
        return user_ap.size() * (0.5 + 1.0 / static_cast<double>(q)) / scale;
    }
};

/// Throws InfeasibleScenario if a user has no feasible AP or no assignment
/// gives every AP a user; std::invalid_argument unless N >= M >= 1 and q > M
/// (epsilon < 1/M); std::runtime_error if the iteration cap is hit.
/// q = 0 selects the default 2M.
Assignment solve_assignment(const ScaledCosts& costs, std::int64_t q = 0);

struct EpsCsReport {
    bool ok = true;
    std::string violation;
};

EpsCsReport verify_eps_cs(const Assignment& a, const ScaledCosts& costs);

/// Exhaustive search over user -> AP maps that reach every AP. M <= 5, N <= 8.
Assignment brute_force_assignment(const ScaledCosts& costs);

/// Checks N >= M >= 1, a feasible AP per user and a matching that covers every AP.
void check_assignable(const ScaledCosts& costs);

}  // namespace cran
