// cranopt: command-line front end.
//
//   cranopt solve-pair --config c.json [--seed S] [--out-dir D]
//   cranopt sweep      ...
//   cranopt plan       ...
//   cranopt simulate   ...
//   cranopt verify     ...   (re-checks D/plan.json)
//
// Exit status: 0 success, 2 infeasible, 1 any other error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cran/config.hpp"
#include "cran/plan.hpp"
#include "cran/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
};

cran::Config load(const Common& c) {
    auto cfg = cran::load_config(c.config);
    if (c.seed) {
        cfg.set_seed(*c.seed);
    }
    return cfg;
}

cran::PairContext pair_ctx(const cran::Config& cfg) {
    return cran::PairContext(cran::ChannelModel::from_db(cfg.pair.mean_snr_db), cfg.pair.qos,
                             cfg.params, cfg.table, cfg.bounds);
}

int solve_pair_cmd(const Common& c) {
    const auto cfg = load(c);
    const auto ctx = pair_ctx(cfg);
    const auto sol = cran::solve_pair(ctx);
    cran::Certification cert;
    if (sol) {
        cert = cran::certify(*sol, ctx);
    }
    cran::write_pair_outputs(c.out_dir, cfg, sol, cert);
    if (!sol) {
        std::cerr << "infeasible: no (X, r, rho) meets every constraint\n";
        return kInfeasible;
    }
    std::printf("r=%d rho=%.6g X=%d R=%.6f rb/slot bandwidth=%.6g Hz certified=%s\n",
                sol->rb_count, sol->ber_threshold, sol->transmissions, sol->expected_cost,
                sol->expected_cost * cfg.params.hertz_per_rb(), cert.ok ? "yes" : "no");
    if (!cert.ok) {
        std::cerr << "certification failed: " << cert.violation << '\n';
        return kError;
    }
    return kOk;
}

int sweep_cmd(const Common& c) {
    const auto cfg = load(c);
    if (cfg.sweeps.empty()) {
        std::cerr << "config has no sweeps\n";
        return kError;
    }
    std::vector<cran::SweepResult> results;
    for (const auto& spec : cfg.sweeps) {
        results.push_back(cran::run_sweep(spec, cfg.params, cfg.table, cfg.bounds, cfg.threads));
        std::printf("sweep %s: %zu points\n", spec.name.c_str(), spec.values.size());
    }
    cran::write_sweep_outputs(c.out_dir, cfg, results);
    return kOk;
}

int plan_cmd(const Common& c) {
    const auto cfg = load(c);
    const auto scenario = cran::generate_scenario(cfg.scenario, cfg.params, cfg.table);
    cran::PlanOptions opt;
    opt.threads = cfg.threads;
    opt.cost_scale = cfg.auction.cost_scale;
    opt.epsilon_denominator = cfg.auction.epsilon_denominator;
    opt.bounds = cfg.bounds;
    const auto plan = cran::plan_network(scenario, opt);
    cran::write_plan_outputs(c.out_dir, cfg, scenario, plan);
    std::printf("plan: %d APs, %d users, total %.6f rb/slot (%.6g Hz)\n", scenario.ap_count(),
                scenario.user_count(), plan.total_rbs, plan.bandwidth_hz);
    return kOk;
}

int simulate_cmd(const Common& c) {
    const auto cfg = load(c);
    const auto ctx = pair_ctx(cfg);
    const auto sol = cran::solve_pair(ctx);
    if (!sol) {
        std::cerr << "infeasible: nothing to simulate\n";
        return kInfeasible;
    }
    std::optional<cran::BlerStats> block;
    std::optional<cran::QueueStats> queue;
    cran::SlotTrace trace;
    if (cfg.simulation.mode == cran::SimMode::block) {
        block = cran::run_block_sim(*sol, ctx.channel, cfg.params, cfg.table, cfg.simulation);
    } else {
        queue = cran::run_queue_sim(*sol, cfg.pair.qos, ctx.channel, cfg.params, cfg.table,
                                    cfg.simulation,
                                    cfg.simulation.record_trace ? &trace : nullptr);
    }
    cran::write_simulation_outputs(c.out_dir, cfg, *sol, block, queue,
                                   cfg.simulation.record_trace && queue ? &trace : nullptr);
    if (queue) {
        std::printf("lvp_violation=%.6g lvp_drop=%.6g mean_rbs=%.6f conserved=%s\n",
                    queue->lvp_violation, queue->lvp_drop, queue->mean_rbs,
                    queue->conserved ? "yes" : "no");
    } else {
        std::printf("per_attempt_failure=%.6g (analytic %.6g) residual=%.6g\n",
                    block->per_attempt_failure, sol->mean_bler, block->residual_rate);
    }
    return kOk;
}

int verify_cmd(const Common& c) {
    const auto cfg = load(c);
    const auto report = cran::verify_plan_file(std::filesystem::path(c.out_dir) / "plan.json", cfg);
    for (const auto& f : report.failures) {
        std::cerr << "FAIL " << f << '\n';
    }
    std::printf("verified %d assigned pairs: %s\n", report.pairs_checked,
                report.ok() ? "ok" : "FAILED");
    return report.ok() ? kOk : kError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-layer bandwidth optimisation for C-RAN"};
    app.require_subcommand(1);
    Common common;
    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", common.config, "JSON configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Override the configured seed");
        sub->add_option("--out-dir", common.out_dir, "Output directory")->capture_default_str();
        return sub;
    };
    auto* solve = add("solve-pair", "Optimise the configured AP-user pair");
    auto* sweep = add("sweep", "Run the configured parameter sweeps");
    auto* plan = add("plan", "Generate a scenario, size every pair and associate users");
    auto* simulate = add("simulate", "Monte Carlo check of the configured pair");
    auto* verify = add("verify", "Re-check a written plan with the independent verifiers");

    CLI11_PARSE(app, argc, argv);
    try {
        if (solve->parsed()) return solve_pair_cmd(common);
        if (sweep->parsed()) return sweep_cmd(common);
        if (plan->parsed()) return plan_cmd(common);
        if (simulate->parsed()) return simulate_cmd(common);
        if (verify->parsed()) return verify_cmd(common);
    } catch (const cran::InfeasibleScenario& e) {
        std::cerr << "infeasible scenario: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
