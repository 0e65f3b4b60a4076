#include "cran/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cran/units.hpp"

namespace cran {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json header(const Config& cfg, const std::string& kind) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["config"] = config_to_json(cfg);
    return j;
}

ordered_json number_or_null(double v) {
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

}  // namespace

ordered_json solution_to_json(const TpdSolution& s, const SystemParams& params) {
    return {{"rb_count", s.rb_count},
            {"ber_threshold", s.ber_threshold},
            {"transmissions", s.transmissions},
            {"latency_exponent_per_bit", s.latency_exponent},
            {"queue_budget_s", s.queue_budget},
            {"expected_rbs_per_slot", s.expected_cost},
            {"bandwidth_hz", s.expected_cost * params.hertz_per_rb()},
            {"mean_bler", s.mean_bler},
            {"expected_service_bits_per_slot", s.expected_service_bits},
            {"effective_capacity_bps", s.effective_capacity}};
}

TpdSolution solution_from_json(const ordered_json& j) {
    TpdSolution s;
    s.rb_count = j.at("rb_count").get<int>();
    s.ber_threshold = j.at("ber_threshold").get<double>();
    s.transmissions = j.at("transmissions").get<int>();
    s.latency_exponent = j.at("latency_exponent_per_bit").get<double>();
    s.queue_budget = j.at("queue_budget_s").get<double>();
    s.expected_cost = j.at("expected_rbs_per_slot").get<double>();
    s.mean_bler = j.at("mean_bler").get<double>();
    s.expected_service_bits = j.at("expected_service_bits_per_slot").get<double>();
    s.effective_capacity = j.at("effective_capacity_bps").get<double>();
    return s;
}

void write_pair_outputs(const std::filesystem::path& dir, const Config& cfg,
                        const std::optional<TpdSolution>& solution, const Certification& cert) {
    auto j = header(cfg, "pair_solution");
    j["feasible"] = solution.has_value();
    if (solution) {
        j["solution"] = solution_to_json(*solution, cfg.params);
        j["lvp_estimate"] = lvp_estimate(solution->latency_exponent, cfg.pair.qos.arrival_rate,
                                         solution->queue_budget, solution->expected_service_bits,
                                         cfg.params);
        j["certification"] = {{"ok", cert.ok}, {"violation", cert.violation}};
    }
    write_file(dir / "pair_solution.json", dump(j));

    Table t;
    t.name = "pair_solution";
    t.columns = {{"mean_snr", "dB"},        {"feasible", "bool"},
                 {"rb_count", "rb"},        {"ber_threshold", "-"},
                 {"transmissions", "count"}, {"latency_exponent", "1/bit"},
                 {"queue_budget", "s"},     {"expected_rbs", "rb/slot"},
                 {"bandwidth", "Hz"},       {"mean_bler", "-"}};
    if (solution) {
        const auto& s = *solution;
        t.add_row({cfg.pair.mean_snr_db, 1.0, static_cast<double>(s.rb_count), s.ber_threshold,
                   static_cast<double>(s.transmissions), s.latency_exponent, s.queue_budget,
                   s.expected_cost, s.expected_cost * cfg.params.hertz_per_rb(), s.mean_bler});
    } else {
        t.add_row({cfg.pair.mean_snr_db, 0.0, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN});
    }
    emit_tsv(dir, t);
}

void write_sweep_outputs(const std::filesystem::path& dir, const Config& cfg,
                         const std::vector<SweepResult>& results) {
    auto j = header(cfg, "sweeps");
    auto arr = ordered_json::array();
    for (const auto& r : results) {
        const auto t = r.table(cfg.params);
        const auto opt = r.optimum_table(cfg.params);
        const auto gain = r.gain_table(cfg.params);
        emit_tsv(dir, t);
        emit_tsv(dir, opt);
        emit_tsv(dir, gain);
        ordered_json s;
        s["name"] = r.spec.name;
        s["axis"] = axis_name(r.spec.axis);
        s["base"] = {{"mean_snr_db", r.spec.base.mean_snr_db}, {"qos", qos_to_json(r.spec.base.qos)}};
        s["results"] = to_json(t);
        s["gain"] = to_json(gain);
        arr.push_back(std::move(s));
    }
    j["sweeps"] = std::move(arr);
    write_file(dir / "sweeps.json", dump(j));
}

Table plan_pairs_table(const Scenario& s, const NetworkPlan& plan) {
    Table t;
    t.name = "plan_pairs";
    t.columns = {{"ap", "index"},           {"user", "index"},         {"mean_snr", "dB"},
                 {"feasible", "bool"},      {"rb_count", "rb"},        {"ber_threshold", "-"},
                 {"transmissions", "count"}, {"latency_exponent", "1/bit"},
                 {"queue_budget", "s"},     {"expected_rbs", "rb/slot"}, {"mean_bler", "-"}};
    for (int m = 0; m < s.ap_count(); ++m) {
        for (int n = 0; n < s.user_count(); ++n) {
            const auto& p = plan.pair(m, n);
            const double snr_db = linear_to_db(s.snr(m, n));
            if (p) {
                t.add_row({static_cast<double>(m), static_cast<double>(n), snr_db, 1.0,
                           static_cast<double>(p->rb_count), p->ber_threshold,
                           static_cast<double>(p->transmissions), p->latency_exponent,
                           p->queue_budget, p->expected_cost, p->mean_bler});
            } else {
                t.add_row({static_cast<double>(m), static_cast<double>(n), snr_db, 0.0, kNaN, kNaN,
                           kNaN, kNaN, kNaN, kNaN, kNaN});
            }
        }
    }
    return t;
}

Table plan_assignment_table(const Scenario& s, const NetworkPlan& plan) {
    Table t;
    t.name = "plan_assignment";
    t.columns = {{"user", "index"},       {"traffic_class", "label"}, {"ap", "index"},
                 {"expected_rbs", "rb/slot"}, {"bandwidth", "Hz"},     {"best_channel_ap", "index"}};
    for (int n = 0; n < s.user_count(); ++n) {
        const int m = plan.assignment.user_ap[static_cast<std::size_t>(n)];
        const double cost = plan.pair(m, n)->expected_cost;
        const double bc = plan.best_channel.user_ap.empty()
                              ? kNaN
                              : static_cast<double>(plan.best_channel.user_ap[static_cast<std::size_t>(n)]);
        t.add_row({static_cast<double>(n), s.users[static_cast<std::size_t>(n)].traffic_class,
                   static_cast<double>(m), cost, cost * s.params.hertz_per_rb(), bc});
    }
    return t;
}

Table plan_load_table(const Scenario& s, const NetworkPlan& plan) {
    Table t;
    t.name = "plan_ap_load";
    t.columns = {{"ap", "index"}, {"users", "count"}, {"expected_rbs", "rb/slot"}, {"bandwidth", "Hz"}};
    std::vector<int> users(static_cast<std::size_t>(s.ap_count()), 0);
    std::vector<double> rbs(static_cast<std::size_t>(s.ap_count()), 0.0);
    for (int n = 0; n < s.user_count(); ++n) {
        const int m = plan.assignment.user_ap[static_cast<std::size_t>(n)];
        ++users[static_cast<std::size_t>(m)];
        rbs[static_cast<std::size_t>(m)] += plan.pair(m, n)->expected_cost;
    }
    for (int m = 0; m < s.ap_count(); ++m) {
        const auto k = static_cast<std::size_t>(m);
        t.add_row({static_cast<double>(m), static_cast<double>(users[k]), rbs[k],
                   rbs[k] * s.params.hertz_per_rb()});
    }
    return t;
}

ordered_json plan_to_json(const Config& cfg, const Scenario& s, const NetworkPlan& plan) {
    auto j = header(cfg, "plan");
    // Build arrays locally: references into an ordered_json object do not
    // survive later insertions.
    auto aps = ordered_json::array();
    for (int m = 0; m < s.ap_count(); ++m) {
        const auto& p = s.aps[static_cast<std::size_t>(m)];
        aps.push_back({{"id", m}, {"x_m", p.x}, {"y_m", p.y}});
    }
    auto users = ordered_json::array();
    for (const auto& u : s.users) {
        users.push_back({{"id", u.id},
                         {"x_m", u.position.x},
                         {"y_m", u.position.y},
                         {"traffic_class", u.traffic_class},
                         {"qos", qos_to_json(u.qos)}});
    }
    auto snr = ordered_json::array();
    auto costs = ordered_json::array();
    auto pairs = ordered_json::array();
    for (int m = 0; m < s.ap_count(); ++m) {
        auto row = ordered_json::array();
        auto crow = ordered_json::array();
        for (int n = 0; n < s.user_count(); ++n) {
            row.push_back(s.snr(m, n));
            crow.push_back(number_or_null(plan.costs.at(m, n)));
            const auto& p = plan.pair(m, n);
            ordered_json e;
            e["ap"] = m;
            e["user"] = n;
            e["feasible"] = p.has_value();
            if (p) {
                e["solution"] = solution_to_json(*p, s.params);
            }
            pairs.push_back(std::move(e));
        }
        snr.push_back(std::move(row));
        costs.push_back(std::move(crow));
    }
    j["scenario"] = {{"aps", std::move(aps)},
                     {"users", std::move(users)},
                     {"mean_snr_linear", std::move(snr)}};
    j["costs_rbs_per_slot"] = std::move(costs);
    j["pairs"] = std::move(pairs);
    const auto& a = plan.assignment;
    j["assignment"] = {{"user_ap", a.user_ap},
                       {"ap_profit", a.ap_profit},
                       {"user_price", a.user_price},
                       {"mu", a.mu},
                       {"epsilon_denominator", a.q},
                       {"cost_scale", a.scale},
                       {"scaled_objective", a.scaled_objective},
                       {"objective_rbs_per_slot", a.objective()},
                       {"rounding_bound_rbs_per_slot", a.rounding_bound()},
                       {"forward_bids", a.forward_bids},
                       {"reverse_steps", a.reverse_steps},
                       {"iteration_cap", a.iteration_cap}};
    if (plan.best_channel.user_ap.empty()) {
        j["best_channel"] = nullptr;
    } else {
        const auto& b = plan.best_channel;
        j["best_channel"] = {{"user_ap", b.user_ap},
                             {"repaired_moves", b.repaired_moves},
                             {"scaled_objective", b.scaled_objective},
                             {"objective_rbs_per_slot",
                              static_cast<double>(b.scaled_objective) / plan.scaled.scale}};
    }
    j["totals"] = {{"rbs_per_slot", plan.total_rbs}, {"bandwidth_hz", plan.bandwidth_hz}};
    return j;
}

void write_plan_outputs(const std::filesystem::path& dir, const Config& cfg, const Scenario& s,
                        const NetworkPlan& plan) {
    write_file(dir / "plan.json", dump(plan_to_json(cfg, s, plan)));
    emit_tsv(dir, plan_pairs_table(s, plan));
    emit_tsv(dir, plan_assignment_table(s, plan));
    emit_tsv(dir, plan_load_table(s, plan));
    std::ostringstream costs;
    costs << "# expected RBs per slot, rows = APs, columns = users\n";
    plan.costs.write(costs);
    write_file(dir / "plan_costs.txt", costs.str());
}

void write_simulation_outputs(const std::filesystem::path& dir, const Config& cfg,
                              const TpdSolution& solution, const std::optional<BlerStats>& block,
                              const std::optional<QueueStats>& queue, const SlotTrace* trace) {
    auto j = header(cfg, "simulation");
    j["solution"] = solution_to_json(solution, cfg.params);
    if (block) {
        const auto& b = *block;
        j["block"] = {{"blocks", b.blocks},
                      {"attempts", b.attempts},
                      {"failed_attempts", b.failed_attempts},
                      {"outage_attempts", b.outage_attempts},
                      {"residual_failures", b.residual_failures},
                      {"per_attempt_failure", b.per_attempt_failure},
                      {"per_attempt_se", b.per_attempt_se},
                      {"analytic_mean_bler", solution.mean_bler},
                      {"residual_rate", b.residual_rate},
                      {"residual_se", b.residual_se},
                      {"analytic_residual", std::pow(solution.mean_bler, solution.transmissions)}};
    }
    if (queue) {
        const auto& q = *queue;
        j["queue"] = {{"slots", q.slots},
                      {"outage_slots", q.outage_slots},
                      {"arrived_bits", q.arrived_bits},
                      {"served_bits", q.served_bits},
                      {"dropped_bits", q.dropped_bits},
                      {"residual_lost_bits", q.residual_lost_bits},
                      {"final_backlog_bits", q.final_backlog_bits},
                      {"mean_backlog_bits", q.mean_backlog_bits},
                      {"conserved", q.conserved},
                      {"lvp_violation", q.lvp_violation},
                      {"lvp_drop", q.lvp_drop},
                      {"lvp_estimate",
                       lvp_estimate(solution.latency_exponent, cfg.pair.qos.arrival_rate,
                                    solution.queue_budget, solution.expected_service_bits,
                                    cfg.params)},
                      {"mean_rbs_per_slot", q.mean_rbs},
                      {"rbs_se", q.rbs_se},
                      {"analytic_rbs_per_slot", solution.expected_cost},
                      {"bandwidth_hz", q.bandwidth_hz},
                      {"retransmissions", q.retransmissions}};
    }
    write_file(dir / "simulation.json", dump(j));
    if (trace) {
        std::ostringstream s;
        write_trace(s, *trace);
        write_file(dir / "trace.tsv", s.str());
    }
}

VerifyReport verify_plan_file(const std::filesystem::path& plan_json, const Config& cfg) {
    VerifyReport r;
    const auto j = ordered_json::parse(read_file(plan_json));
    if (j.at("schema_version") != kSchemaVersion || j.at("kind") != "plan") {
        r.failures.push_back("not a plan file of schema version " + std::to_string(kSchemaVersion));
        return r;
    }
    const auto& sc = j.at("scenario");
    const auto& users = sc.at("users");
    const auto& snr = sc.at("mean_snr_linear");
    const int M = static_cast<int>(snr.size());
    const int N = static_cast<int>(users.size());

    CostMatrix costs(M, N);
    const auto& cj = j.at("costs_rbs_per_slot");
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) {
            const auto& v = cj.at(static_cast<std::size_t>(m)).at(static_cast<std::size_t>(n));
            if (!v.is_null()) {
                costs.at(m, n) = v.get<double>();
            }
        }
    }
    const auto& aj = j.at("assignment");
    Assignment a;
    a.user_ap = aj.at("user_ap").get<std::vector<int>>();
    a.ap_profit = aj.at("ap_profit").get<std::vector<std::int64_t>>();
    a.user_price = aj.at("user_price").get<std::vector<std::int64_t>>();
    a.mu = aj.at("mu").get<std::int64_t>();
    a.q = aj.at("epsilon_denominator").get<std::int64_t>();
    a.scale = aj.at("cost_scale").get<double>();
    const auto scaled = integerize_costs(costs, a.scale);
    if (const auto cs = verify_eps_cs(a, scaled); !cs.ok) {
        r.failures.push_back("epsilon-CS: " + cs.violation);
    }
    std::int64_t objective = 0;
    const auto& pairs = j.at("pairs");
    for (int n = 0; n < N && n < static_cast<int>(a.user_ap.size()); ++n) {
        const int m = a.user_ap[static_cast<std::size_t>(n)];
        if (m < 0 || m >= M || !scaled.feasible(m, n)) {
            continue;  // already reported by the epsilon-CS check
        }
        objective += scaled.at(m, n);
        const auto& entry = pairs.at(static_cast<std::size_t>(m) * N + n);
        std::ostringstream where;
        where << "pair (ap " << m << ", user " << n << ")";
        if (!entry.at("feasible").get<bool>()) {
            r.failures.push_back(where.str() + ": assigned but marked infeasible");
            continue;
        }
        const auto sol = solution_from_json(entry.at("solution"));
        const auto& qj = users.at(static_cast<std::size_t>(n)).at("qos");
        QosRequirement q;
        q.arrival_rate = qj.at("arrival_rate_bps").get<double>();
        q.total_delay_budget = qj.at("total_delay_budget_s").get<double>();
        q.lvp_threshold = qj.at("lvp_threshold").get<double>();
        q.decode_bler_threshold = qj.at("decode_bler_threshold").get<double>();
        const ChannelModel ch{snr.at(static_cast<std::size_t>(m)).at(static_cast<std::size_t>(n)).get<double>()};
        const PairContext ctx(ch, q, cfg.params, cfg.table, cfg.bounds);
        const auto cert = certify(sol, ctx);
        ++r.pairs_checked;
        if (!cert.ok) {
            r.failures.push_back(where.str() + ": " + cert.violation);
        }
        if (sol.expected_cost != costs.at(m, n)) {
            r.failures.push_back(where.str() + ": cost matrix entry differs from the solution");
        }
    }
    if (objective != aj.at("scaled_objective").get<std::int64_t>()) {
        r.failures.push_back("scaled objective does not match the assignment");
    }
    return r;
}

}  // namespace cran
