#pragma once

// Output files for each CLI verb. Everything written here is a pure function
// of the inputs (no timestamps, fixed key order, %.17g numbers), so identical
// runs produce byte-identical files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cran/config.hpp"
#include "cran/link_sim.hpp"
#include "cran/plan.hpp"
#include "cran/sweep.hpp"
#include "cran/table.hpp"

namespace cran {

using ordered_json = nlohmann::ordered_json;

ordered_json solution_to_json(const TpdSolution& s, const SystemParams& params);
TpdSolution solution_from_json(const ordered_json& j);

/// pair_solution.json and pair_solution.tsv.
void write_pair_outputs(const std::filesystem::path& dir, const Config& cfg,
                        const std::optional<TpdSolution>& solution, const Certification& cert);

/// <name>.tsv, <name>_optimum.tsv and <name>_gain.tsv per sweep, plus sweeps.json.
void write_sweep_outputs(const std::filesystem::path& dir, const Config& cfg,
                         const std::vector<SweepResult>& results);

Table plan_pairs_table(const Scenario& s, const NetworkPlan& plan);
Table plan_assignment_table(const Scenario& s, const NetworkPlan& plan);
Table plan_load_table(const Scenario& s, const NetworkPlan& plan);

ordered_json plan_to_json(const Config& cfg, const Scenario& s, const NetworkPlan& plan);

/// plan.json, plan_pairs.tsv, plan_assignment.tsv, plan_ap_load.tsv, plan_costs.txt.
void write_plan_outputs(const std::filesystem::path& dir, const Config& cfg, const Scenario& s,
                        const NetworkPlan& plan);

/// simulation.json (and trace.tsv when a trace is given).
void write_simulation_outputs(const std::filesystem::path& dir, const Config& cfg,
                              const TpdSolution& solution, const std::optional<BlerStats>& block,
                              const std::optional<QueueStats>& queue, const SlotTrace* trace);

struct VerifyReport {
    int pairs_checked = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Re-checks a written plan.json with the independent verifiers: every
/// assigned pair through certify() and the prices through verify_eps_cs().
VerifyReport verify_plan_file(const std::filesystem::path& plan_json, const Config& cfg);

}  // namespace cran
