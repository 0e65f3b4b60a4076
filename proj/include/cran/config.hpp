#pragma once

// JSON run configuration. Sections mirror the library types; every key is
// optional except schema_version, and unknown keys are rejected. SNRs are in
// dB, rates in bit/s, times in seconds.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cran/link_sim.hpp"
#include "cran/mcs_table.hpp"
#include "cran/scenario.hpp"
#include "cran/sweep.hpp"
#include "cran/system_params.hpp"
#include "cran/tpd.hpp"

namespace cran {

inline constexpr int kSchemaVersion = 1;

struct AuctionOptions {
    double cost_scale = 1000.0;
    std::int64_t epsilon_denominator = 0;  // 0: 2M
};

struct Config {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    SystemParams params;
    std::string mcs_source = "builtin:nr_256qam";
    McsTable table = McsTable::nr_256qam();
    SearchBounds bounds;
    PairSpec pair;
    SimConfig simulation;
    ScenarioSpec scenario;
    AuctionOptions auction;
    std::vector<SweepSpec> sweeps;

    /// Seeds the scenario and the simulation.
    void set_seed(std::uint64_t seed);
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `base_dir` resolves a relative mcs_table path.
Config parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// Canonical echo of the effective configuration (for output headers).
nlohmann::ordered_json config_to_json(const Config& c);

nlohmann::ordered_json qos_to_json(const QosRequirement& q);

}  // namespace cran
