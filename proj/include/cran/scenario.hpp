#pragma once

// Random network layouts: APs and users dropped uniformly in a square, mean
// SNR per pair from a log-distance path-loss law, and per-user QoS drawn from
// traffic-class ranges.

#include <cstdint>
#include <string>
#include <vector>

#include "cran/mcs_table.hpp"
#include "cran/qos.hpp"
#include "cran/system_params.hpp"

namespace cran {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct TrafficClass {
    std::string label;
    Range arrival_rate;  // bit/s
    Range delay_budget;  // s
    Range lvp_threshold;
};

TrafficClass embb_class();
TrafficClass urllc_class();

struct PathLoss {
    double intercept_db = 128.1;
    double slope_db = 37.6;  // per decade of km
    double tx_power_dbm = 24.0;
    double noise_figure_db = 9.0;
    double min_distance_m = 10.0;

    /// -174 dBm/Hz + 10 log10(bandwidth) + noise figure.
    double noise_dbm(double bandwidth_hz) const;
    double loss_db(double distance_m) const;
};

struct ScenarioSpec {
    int aps = 4;
    int users = 8;
    double area_m = 1000.0;      // side of the square
    double first_class_fraction = 0.5;
    TrafficClass first_class = embb_class();
    TrafficClass second_class = urllc_class();
    double decode_bler_threshold = 1e-3;
    PathLoss path_loss;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct UserSpec {
    int id = 0;
    Point position;
    QosRequirement qos;
    std::string traffic_class;
};

struct Scenario {
    std::vector<Point> aps;
    std::vector<UserSpec> users;
    std::vector<double> mean_snr;  // M x N, linear, row-major
    SystemParams params;
    McsTable table = McsTable::nr_256qam();

    int ap_count() const { return static_cast<int>(aps.size()); }
    int user_count() const { return static_cast<int>(users.size()); }
    double snr(int m, int n) const {
        return mean_snr[static_cast<std::size_t>(m) * users.size() + static_cast<std::size_t>(n)];
    }
    void validate() const;
};

/// The first round(N * first_class_fraction) users belong to the first class.
Scenario generate_scenario(const ScenarioSpec& spec, const SystemParams& params,
                           const McsTable& table);

}  // namespace cran
