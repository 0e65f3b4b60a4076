#include "cran/auction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace cran {

namespace {

constexpr std::int64_t kMinValue = std::numeric_limits<std::int64_t>::min();

struct BestTwo {
    int index = -1;
    std::int64_t best = kMinValue;
    std::int64_t second = kMinValue;
    bool has_second = false;
};

// Argmax with lowest-index tie-break, plus the runner-up value over the
// remaining candidates.
template <typename Value>
BestTwo best_two(int count, const std::function<bool(int)>& allowed, Value value) {
    BestTwo out;
    for (int k = 0; k < count; ++k) {
        if (!allowed(k)) {
            continue;
        }
        const std::int64_t v = value(k);
        if (out.index < 0 || v > out.best) {
            if (out.index >= 0) {
                out.second = out.has_second ? std::max(out.second, out.best) : out.best;
                out.has_second = true;
            }
            out.index = k;
            out.best = v;
        } else {
            out.second = out.has_second ? std::max(out.second, v) : v;
            out.has_second = true;
        }
    }
    return out;
}

std::string pair_name(int m, int n) {
    std::ostringstream s;
    s << "(ap " << m << ", user " << n << ")";
    return s.str();
}

}  // namespace

CostMatrix::CostMatrix(int aps_, int users_, double fill)
    : aps(aps_), users(users_), cost(static_cast<std::size_t>(aps_) * users_, fill) {
    if (aps_ < 0 || users_ < 0) {
        throw std::invalid_argument("cost matrix dimensions must be non-negative");
    }
}

bool CostMatrix::feasible(int m, int n) const { return std::isfinite(at(m, n)); }

CostMatrix CostMatrix::parse(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::vector<double> row;
        std::string tok;
        while (fields >> tok) {
            if (tok == "inf") {
                row.push_back(std::numeric_limits<double>::infinity());
                continue;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(v) || v < 0.0) {
                throw std::invalid_argument("cost matrix line " + std::to_string(line_no) +
                                            ": bad entry '" + tok + "'");
            }
            row.push_back(v);
        }
        if (row.empty()) {
            continue;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("cost matrix line " + std::to_string(line_no) +
                                        ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::invalid_argument("cost matrix is empty");
    }
    CostMatrix out(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int m = 0; m < out.aps; ++m) {
        for (int n = 0; n < out.users; ++n) {
            out.at(m, n) = rows[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
        }
    }
    return out;
}

void CostMatrix::write(std::ostream& out) const {
    out << std::setprecision(17);
    for (int m = 0; m < aps; ++m) {
        for (int n = 0; n < users; ++n) {
            if (n) {
                out << ' ';
            }
            if (feasible(m, n)) {
                out << at(m, n);
            } else {
                out << "inf";
            }
        }
        out << '\n';
    }
}

std::int64_t ScaledCosts::spread() const {
    std::int64_t lo = kInfeasibleCost;
    std::int64_t hi = kMinValue;
    for (auto c : cost) {
        if (c != kInfeasibleCost) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    return hi < lo ? 0 : hi - lo;
}

ScaledCosts integerize_costs(const CostMatrix& costs, double scale) {
    if (!(scale >= 1.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("cost scale must be >= 1");
    }
    constexpr double kLimit = 9007199254740992.0;  // 2^53
    ScaledCosts out;
    out.aps = costs.aps;
    out.users = costs.users;
    out.scale = scale;
    out.cost.reserve(costs.cost.size());
    for (double c : costs.cost) {
        if (!std::isfinite(c)) {
            out.cost.push_back(kInfeasibleCost);
            continue;
        }
        if (c < 0.0) {
            throw std::invalid_argument("costs must be non-negative");
        }
        const double scaled = std::round(scale * c);
        if (scaled >= kLimit) {
            throw std::overflow_error("scaled cost exceeds 2^53; reduce the scale");
        }
        out.cost.push_back(static_cast<std::int64_t>(scaled));
    }
    return out;
}

AuctionState::AuctionState(const ScaledCosts& costs, std::int64_t q_)
    : q(q_),
      owner(static_cast<std::size_t>(costs.users), -1),
      load(static_cast<std::size_t>(costs.aps), 0),
      profit(static_cast<std::size_t>(costs.aps), 0),
      price(static_cast<std::size_t>(costs.users), 0),
      bid_cap((costs.spread() + 1) * q_ + 1) {}

std::vector<int> AuctionState::unassigned_aps() const {
    std::vector<int> out;
    for (std::size_t m = 0; m < load.size(); ++m) {
        if (load[m] == 0) {
            out.push_back(static_cast<int>(m));
        }
    }
    return out;
}

std::vector<int> AuctionState::unassigned_users() const {
    std::vector<int> out;
    for (std::size_t n = 0; n < owner.size(); ++n) {
        if (owner[n] < 0) {
            out.push_back(static_cast<int>(n));
        }
    }
    return out;
}

std::int64_t benefit(const ScaledCosts& costs, const AuctionState& s, int m, int n) {
    return -costs.at(m, n) * s.q;
}

void forward_round(AuctionState& s, const ScaledCosts& costs) {
    struct Bid {
        int ap = -1;
        std::int64_t amount = kMinValue;
    };
    std::vector<Bid> bids(static_cast<std::size_t>(costs.users));
    for (int m : s.unassigned_aps()) {
        const auto pick = best_two(
            costs.users, [&](int n) { return costs.feasible(m, n); },
            [&](int n) { return benefit(costs, s, m, n) - s.price[static_cast<std::size_t>(n)]; });
        if (pick.index < 0) {
            throw std::logic_error("forward_round: AP without a feasible user");
        }
        const auto n = static_cast<std::size_t>(pick.index);
        // Raise the price to where the runner-up is epsilon better than the
        // best; with no runner-up, jump past any finite competing bid.
        const std::int64_t amount = pick.has_second
                                        ? benefit(costs, s, m, pick.index) - pick.second + 1
                                        : s.price[n] + s.bid_cap;
        ++s.forward_bids;
        if (amount > bids[n].amount) {
            bids[n] = {m, amount};
        }
    }
    for (std::size_t n = 0; n < bids.size(); ++n) {
        if (bids[n].ap < 0) {
            continue;
        }
        if (const int prev = s.owner[n]; prev >= 0) {
            --s.load[static_cast<std::size_t>(prev)];
        }
        const int m = bids[n].ap;
        s.owner[n] = m;
        ++s.load[static_cast<std::size_t>(m)];
        s.price[n] = bids[n].amount;
        s.profit[static_cast<std::size_t>(m)] =
            benefit(costs, s, m, static_cast<int>(n)) - bids[n].amount;
    }
}

void reverse_round(AuctionState& s, const ScaledCosts& costs) {
    for (int n : s.unassigned_users()) {
        const auto pick = best_two(
            costs.aps, [&](int m) { return costs.feasible(m, n); },
            [&](int m) { return benefit(costs, s, m, n) - s.profit[static_cast<std::size_t>(m)]; });
        if (pick.index < 0) {
            throw std::logic_error("reverse_round: user without a feasible AP");
        }
        const auto m = static_cast<std::size_t>(pick.index);
        const std::int64_t headroom = s.mu - s.profit[m];
        const std::int64_t delta =
            pick.has_second ? std::min(headroom, pick.best - pick.second + 1) : headroom;
        ++s.reverse_steps;
        if (delta > 0) {
            // Below mu the AP holds exactly one user; raising its profit breaks
            // that pair, so the user goes back to the unassigned pool.
            if (s.load[m] != 1) {
                throw std::logic_error("reverse_round: AP below max profit holds several users");
            }
            for (auto& o : s.owner) {
                if (o == pick.index) {
                    o = -1;
                    break;
                }
            }
            --s.load[m];
        }
        s.profit[m] += delta;
        s.price[static_cast<std::size_t>(n)] = pick.best - delta;
        s.owner[static_cast<std::size_t>(n)] = pick.index;
        ++s.load[m];
    }
}

void check_assignable(const ScaledCosts& costs) {
    if (costs.aps < 1 || costs.users < costs.aps) {
        throw std::invalid_argument("assignment needs N >= M >= 1");
    }
    std::vector<int> stranded;
    for (int n = 0; n < costs.users; ++n) {
        bool any = false;
        for (int m = 0; m < costs.aps && !any; ++m) {
            any = costs.feasible(m, n);
        }
        if (!any) {
            stranded.push_back(n);
        }
    }
    if (!stranded.empty()) {
        std::ostringstream msg;
        msg << "no feasible AP for user(s)";
        for (int n : stranded) {
            msg << ' ' << n;
        }
        throw InfeasibleScenario(msg.str(), stranded);
    }
    // Kuhn's augmenting paths: every AP must get a distinct user.
    std::vector<int> match(static_cast<std::size_t>(costs.users), -1);
    std::vector<char> seen;
    std::function<bool(int)> augment = [&](int m) {
        for (int n = 0; n < costs.users; ++n) {
            if (!costs.feasible(m, n) || seen[static_cast<std::size_t>(n)]) {
                continue;
            }
            seen[static_cast<std::size_t>(n)] = 1;
            if (match[static_cast<std::size_t>(n)] < 0 ||
                augment(match[static_cast<std::size_t>(n)])) {
                match[static_cast<std::size_t>(n)] = m;
                return true;
            }
        }
        return false;
    };
    for (int m = 0; m < costs.aps; ++m) {
        seen.assign(static_cast<std::size_t>(costs.users), 0);
        if (!augment(m)) {
            throw InfeasibleScenario(
                "no assignment gives every AP a user (AP " + std::to_string(m) + " starved)", {});
        }
    }
}

Assignment solve_assignment(const ScaledCosts& costs, std::int64_t q) {
    check_assignable(costs);
    const std::int64_t m_count = costs.aps;
    if (q == 0) {
        q = 2 * m_count;
    }
    if (q <= m_count) {
        throw std::invalid_argument("epsilon must be below 1/M (need q > M)");
    }
    std::int64_t max_cost = 0;
    for (auto c : costs.cost) {
        if (c != kInfeasibleCost) {
            max_cost = std::max(max_cost, c);
        }
    }
    if (static_cast<double>(max_cost + 1) * static_cast<double>(q) * costs.users > 0x1.0p52) {
        throw std::overflow_error("scaled costs too large for exact price arithmetic");
    }

    AuctionState s(costs, q);
    const std::int64_t cap = (costs.spread() * q + 2) * m_count * costs.users;
    auto check_cap = [&] {
        if (s.forward_bids + s.reverse_steps > cap) {
            std::ostringstream msg;
            msg << "auction exceeded its iteration cap " << cap << " (forward bids "
                << s.forward_bids << ", reverse steps " << s.reverse_steps << ")";
            throw std::runtime_error(msg.str());
        }
    };
    while (!s.unassigned_aps().empty()) {
        forward_round(s, costs);
        check_cap();
    }
    s.mu = *std::max_element(s.profit.begin(), s.profit.end());
    while (!s.unassigned_users().empty()) {
        reverse_round(s, costs);
        check_cap();
    }

    Assignment a;
    a.user_ap = s.owner;
    a.ap_profit = s.profit;
    a.user_price = s.price;
    a.mu = s.mu;
    a.q = q;
    a.scale = costs.scale;
    a.forward_bids = s.forward_bids;
    a.reverse_steps = s.reverse_steps;
    a.iteration_cap = cap;
    for (int n = 0; n < costs.users; ++n) {
        a.scaled_objective += costs.at(a.user_ap[static_cast<std::size_t>(n)], n);
    }
    return a;
}

EpsCsReport verify_eps_cs(const Assignment& a, const ScaledCosts& costs) {
    EpsCsReport r;
    auto fail = [&](std::string what) {
        r.ok = false;
        r.violation = std::move(what);
        return r;
    };
    const auto M = static_cast<std::size_t>(costs.aps);
    const auto N = static_cast<std::size_t>(costs.users);
    if (a.user_ap.size() != N || a.user_price.size() != N || a.ap_profit.size() != M) {
        return fail("assignment: size mismatch");
    }
    std::vector<int> load(M, 0);
    for (std::size_t n = 0; n < N; ++n) {
        const int m = a.user_ap[n];
        if (m < 0 || static_cast<std::size_t>(m) >= M) {
            return fail("assignment: user " + std::to_string(n) + " unassigned");
        }
        if (!costs.feasible(m, static_cast<int>(n))) {
            return fail("assignment: infeasible pair " + pair_name(m, static_cast<int>(n)));
        }
        ++load[static_cast<std::size_t>(m)];
    }
    for (std::size_t m = 0; m < M; ++m) {
        if (load[m] == 0) {
            return fail("assignment: AP " + std::to_string(m) + " serves no user");
        }
    }
    auto a_mn = [&](int m, int n) { return -costs.at(m, n) * a.q; };
    // Slack: pi + p >= a - eps on every feasible pair (eps = 1 price unit).
    for (int m = 0; m < costs.aps; ++m) {
        for (int n = 0; n < costs.users; ++n) {
            if (costs.feasible(m, n) &&
                a.ap_profit[static_cast<std::size_t>(m)] + a.user_price[static_cast<std::size_t>(n)] <
                    a_mn(m, n) - 1) {
                return fail("slack violated at " + pair_name(m, n));
            }
        }
    }
    // Tightness on assigned pairs.
    for (int n = 0; n < costs.users; ++n) {
        const int m = a.user_ap[static_cast<std::size_t>(n)];
        if (a.ap_profit[static_cast<std::size_t>(m)] + a.user_price[static_cast<std::size_t>(n)] !=
            a_mn(m, n)) {
            return fail("tightness violated at " + pair_name(m, n));
        }
    }
    // Multi-assigned APs sit at the top profit.
    const auto top = *std::max_element(a.ap_profit.begin(), a.ap_profit.end());
    for (std::size_t m = 0; m < M; ++m) {
        if (load[m] > 1 && a.ap_profit[m] != top) {
            return fail("AP " + std::to_string(m) + " serves several users below the top profit");
        }
    }
    return r;
}

Assignment brute_force_assignment(const ScaledCosts& costs) {
    if (costs.aps > 5 || costs.users > 8) {
        throw std::invalid_argument("brute force limited to M <= 5, N <= 8");
    }
    if (costs.aps < 1 || costs.users < costs.aps) {
        throw std::invalid_argument("assignment needs N >= M >= 1");
    }
    const auto N = static_cast<std::size_t>(costs.users);
    std::vector<int> map(N, 0);
    std::vector<int> best;
    std::int64_t best_cost = kInfeasibleCost;
    while (true) {
        std::int64_t total = 0;
        std::vector<char> used(static_cast<std::size_t>(costs.aps), 0);
        bool ok = true;
        for (std::size_t n = 0; n < N && ok; ++n) {
            const int m = map[n];
            ok = costs.feasible(m, static_cast<int>(n));
            if (ok) {
                total += costs.at(m, static_cast<int>(n));
                used[static_cast<std::size_t>(m)] = 1;
            }
        }
        if (ok && std::all_of(used.begin(), used.end(), [](char u) { return u != 0; }) &&
            total < best_cost) {
            best_cost = total;
            best = map;
        }
        std::size_t k = 0;
        while (k < N && ++map[k] == costs.aps) {
            map[k] = 0;
            ++k;
        }
        if (k == N) {
            break;
        }
    }
    if (best.empty()) {
        throw InfeasibleScenario("no feasible assignment", {});
    }
    Assignment a;
    a.user_ap = best;
    a.scaled_objective = best_cost;
    a.scale = costs.scale;
    return a;
}

}  // namespace cran
