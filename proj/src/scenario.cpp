#include "cran/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "cran/amc.hpp"
#include "cran/units.hpp"

namespace cran {

namespace {

double draw(Rng& rng, const Range& r) { return r.lo + (r.hi - r.lo) * uniform01(rng); }

void check_range(const Range& r, const std::string& what) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw std::invalid_argument(what + ": need lo <= hi");
    }
}

}  // namespace

TrafficClass embb_class() { return {"embb", {10e6, 20e6}, {10e-3, 16e-3}, {1e-4, 1e-3}}; }

TrafficClass urllc_class() { return {"urllc", {1e6, 5e6}, {3e-3, 9e-3}, {1e-6, 1e-5}}; }

double PathLoss::noise_dbm(double bandwidth_hz) const {
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double PathLoss::loss_db(double distance_m) const {
    const double d = std::max(distance_m, min_distance_m);
    return intercept_db + slope_db * std::log10(d / 1000.0);
}

void ScenarioSpec::validate() const {
    if (aps < 1 || users < aps) {
        throw std::invalid_argument("scenario needs users >= aps >= 1");
    }
    if (!(area_m > 0.0)) {
        throw std::invalid_argument("scenario area must be positive");
    }
    if (!(first_class_fraction >= 0.0 && first_class_fraction <= 1.0)) {
        throw std::invalid_argument("traffic class fraction must lie in [0, 1]");
    }
    for (const auto* c : {&first_class, &second_class}) {
        check_range(c->arrival_rate, c->label + " arrival_rate");
        check_range(c->delay_budget, c->label + " delay_budget");
        check_range(c->lvp_threshold, c->label + " lvp_threshold");
    }
    if (!(path_loss.min_distance_m > 0.0)) {
        throw std::invalid_argument("minimum distance must be positive");
    }
}

void Scenario::validate() const {
    if (aps.empty() || users.size() < aps.size()) {
        throw std::invalid_argument("scenario needs users >= aps >= 1");
    }
    if (mean_snr.size() != aps.size() * users.size()) {
        throw std::invalid_argument("mean SNR matrix has the wrong size");
    }
    for (double g : mean_snr) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw std::invalid_argument("mean SNR entries must be positive and finite");
        }
    }
    params.validate();
    for (const auto& u : users) {
        u.qos.validate(params);
    }
}

Scenario generate_scenario(const ScenarioSpec& spec, const SystemParams& params,
                           const McsTable& table) {
    spec.validate();
    params.validate();
    Rng rng(spec.seed);
    Scenario s;
    s.params = params;
    s.table = table;
    for (int m = 0; m < spec.aps; ++m) {
        const double x = spec.area_m * uniform01(rng);
        const double y = spec.area_m * uniform01(rng);
        s.aps.push_back({x, y});
    }
    const int first = static_cast<int>(std::lround(spec.users * spec.first_class_fraction));
    for (int n = 0; n < spec.users; ++n) {
        UserSpec u;
        u.id = n;
        u.position.x = spec.area_m * uniform01(rng);
        u.position.y = spec.area_m * uniform01(rng);
        const auto& cls = n < first ? spec.first_class : spec.second_class;
        u.traffic_class = cls.label;
        u.qos.arrival_rate = draw(rng, cls.arrival_rate);
        u.qos.total_delay_budget = draw(rng, cls.delay_budget);
        u.qos.lvp_threshold = draw(rng, cls.lvp_threshold);
        u.qos.decode_bler_threshold = spec.decode_bler_threshold;
        s.users.push_back(u);
    }
    const double noise = spec.path_loss.noise_dbm(params.hertz_per_rb());
    s.mean_snr.reserve(static_cast<std::size_t>(spec.aps) * spec.users);
    for (const auto& ap : s.aps) {
        for (const auto& u : s.users) {
            const double d = std::hypot(ap.x - u.position.x, ap.y - u.position.y);
            const double snr_db = spec.path_loss.tx_power_dbm - spec.path_loss.loss_db(d) - noise;
            s.mean_snr.push_back(db_to_linear(snr_db));
        }
    }
    s.validate();
    return s;
}

}  // namespace cran
