#include "cran/config.hpp"

#include <fstream>
#include <set>

namespace cran {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

Range read_range(const json& obj, const char* key, Range def, const std::string& where) {
    if (!obj.contains(key)) {
        return def;
    }
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(where + "." + key + ": expected [lo, hi]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

QosRequirement parse_qos(const json& j, QosRequirement q, const std::string& where) {
    check_keys(j, {"arrival_rate_bps", "total_delay_budget_s", "lvp_threshold",
                   "decode_bler_threshold"},
               where);
    read(j, "arrival_rate_bps", q.arrival_rate, where);
    read(j, "total_delay_budget_s", q.total_delay_budget, where);
    read(j, "lvp_threshold", q.lvp_threshold, where);
    read(j, "decode_bler_threshold", q.decode_bler_threshold, where);
    return q;
}

PairSpec parse_pair(const json& j, PairSpec p, const std::string& where) {
    check_keys(j, {"mean_snr_db", "qos"}, where);
    read(j, "mean_snr_db", p.mean_snr_db, where);
    if (j.contains("qos")) {
        p.qos = parse_qos(j.at("qos"), p.qos, where + ".qos");
    }
    return p;
}

TrafficClass parse_class(const json& j, TrafficClass c, const std::string& where) {
    check_keys(j, {"label", "arrival_rate_bps", "total_delay_budget_s", "lvp_threshold"}, where);
    read(j, "label", c.label, where);
    c.arrival_rate = read_range(j, "arrival_rate_bps", c.arrival_rate, where);
    c.delay_budget = read_range(j, "total_delay_budget_s", c.delay_budget, where);
    c.lvp_threshold = read_range(j, "lvp_threshold", c.lvp_threshold, where);
    return c;
}

nlohmann::ordered_json range_json(const Range& r) { return {r.lo, r.hi}; }

nlohmann::ordered_json class_json(const TrafficClass& c) {
    return {{"label", c.label},
            {"arrival_rate_bps", range_json(c.arrival_rate)},
            {"total_delay_budget_s", range_json(c.delay_budget)},
            {"lvp_threshold", range_json(c.lvp_threshold)}};
}

}  // namespace

void Config::set_seed(std::uint64_t s) {
    seed = s;
    scenario.seed = s;
    simulation.seed = s;
}

Config parse_config(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j, {"schema_version", "seed", "threads", "system_params", "mcs_table", "search",
                   "pair", "simulation", "scenario", "auction", "sweeps"},
               "config");
    if (!j.contains("schema_version")) {
        throw ConfigError("config: schema_version is required");
    }
    if (j.at("schema_version") != kSchemaVersion) {
        throw ConfigError("config: unsupported schema_version " + j.at("schema_version").dump());
    }
    Config c;
    std::uint64_t seed = 1;
    read(j, "seed", seed, "config");
    read(j, "threads", c.threads, "config");

    if (j.contains("system_params")) {
        const auto& s = j.at("system_params");
        const std::string w = "system_params";
        check_keys(s, {"slot_duration_s", "feedback_rtt_s", "subcarriers_per_rb", "symbols_per_rb",
                       "data_symbols_per_slot", "subcarrier_spacing_hz", "total_rbs",
                       "code_block_bits", "max_transmissions"},
                   w);
        read(s, "slot_duration_s", c.params.slot_duration, w);
        read(s, "feedback_rtt_s", c.params.feedback_rtt, w);
        read(s, "subcarriers_per_rb", c.params.subcarriers_per_rb, w);
        read(s, "symbols_per_rb", c.params.symbols_per_rb, w);
        read(s, "data_symbols_per_slot", c.params.data_symbols_per_slot, w);
        read(s, "subcarrier_spacing_hz", c.params.subcarrier_spacing, w);
        read(s, "total_rbs", c.params.total_rbs, w);
        read(s, "code_block_bits", c.params.code_block_bits, w);
        read(s, "max_transmissions", c.params.max_transmissions, w);
    }
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("mcs_table")) {
        const auto& m = j.at("mcs_table");
        check_keys(m, {"builtin", "path"}, "mcs_table");
        if (m.contains("builtin") == m.contains("path")) {
            throw ConfigError("mcs_table: give exactly one of 'builtin' or 'path'");
        }
        if (m.contains("builtin")) {
            const auto name = m.at("builtin").get<std::string>();
            if (name != "nr_256qam") {
                throw ConfigError("mcs_table: unknown builtin table '" + name + "'");
            }
        } else {
            std::filesystem::path p = m.at("path").get<std::string>();
            if (p.is_relative()) {
                p = base_dir / p;
            }
            c.table = McsTable::load(p.string());
            c.mcs_source = m.at("path").get<std::string>();
        }
    }

    if (j.contains("search")) {
        const auto& s = j.at("search");
        check_keys(s, {"rho_min", "rho_max", "tolerance"}, "search");
        read(s, "rho_min", c.bounds.rho_min, "search");
        read(s, "rho_max", c.bounds.rho_max, "search");
        read(s, "tolerance", c.bounds.tolerance, "search");
    }
    try {
        c.bounds.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("pair")) {
        c.pair = parse_pair(j.at("pair"), c.pair, "pair");
    }

    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        const std::string w = "simulation";
        check_keys(s, {"mode", "n_slots", "n_blocks", "conditioned_draws", "trace"}, w);
        std::string mode = "queue";
        read(s, "mode", mode, w);
        if (mode == "queue") {
            c.simulation.mode = SimMode::queue;
        } else if (mode == "block") {
            c.simulation.mode = SimMode::block;
        } else {
            throw ConfigError("simulation.mode: expected 'queue' or 'block'");
        }
        read(s, "n_slots", c.simulation.n_slots, w);
        read(s, "n_blocks", c.simulation.n_blocks, w);
        read(s, "conditioned_draws", c.simulation.conditioned_draws, w);
        read(s, "trace", c.simulation.record_trace, w);
    }

    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        const std::string w = "scenario";
        check_keys(s, {"aps", "users", "area_m", "first_class_fraction", "decode_bler_threshold",
                       "tx_power_dbm", "noise_figure_db", "min_distance_m",
                       "path_loss_intercept_db", "path_loss_slope_db", "first_class",
                       "second_class"},
                   w);
        auto& sc = c.scenario;
        read(s, "aps", sc.aps, w);
        read(s, "users", sc.users, w);
        read(s, "area_m", sc.area_m, w);
        read(s, "first_class_fraction", sc.first_class_fraction, w);
        read(s, "decode_bler_threshold", sc.decode_bler_threshold, w);
        read(s, "tx_power_dbm", sc.path_loss.tx_power_dbm, w);
        read(s, "noise_figure_db", sc.path_loss.noise_figure_db, w);
        read(s, "min_distance_m", sc.path_loss.min_distance_m, w);
        read(s, "path_loss_intercept_db", sc.path_loss.intercept_db, w);
        read(s, "path_loss_slope_db", sc.path_loss.slope_db, w);
        if (s.contains("first_class")) {
            sc.first_class = parse_class(s.at("first_class"), sc.first_class, w + ".first_class");
        }
        if (s.contains("second_class")) {
            sc.second_class = parse_class(s.at("second_class"), sc.second_class, w + ".second_class");
        }
    }

    if (j.contains("auction")) {
        const auto& a = j.at("auction");
        check_keys(a, {"cost_scale", "epsilon_denominator"}, "auction");
        read(a, "cost_scale", c.auction.cost_scale, "auction");
        read(a, "epsilon_denominator", c.auction.epsilon_denominator, "auction");
    }

    if (j.contains("sweeps")) {
        const auto& arr = j.at("sweeps");
        if (!arr.is_array()) {
            throw ConfigError("sweeps: expected an array");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& s = arr[i];
            const std::string w = "sweeps[" + std::to_string(i) + "]";
            check_keys(s, {"name", "axis", "values", "pair", "fixed", "shannon_ifc", "ifc_ber"}, w);
            SweepSpec spec;
            spec.base = c.pair;
            read(s, "name", spec.name, w);
            std::string axis;
            read(s, "axis", axis, w);
            try {
                spec.axis = parse_axis(axis);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(w + ": " + e.what());
            }
            read(s, "values", spec.values, w);
            if (s.contains("pair")) {
                spec.base = parse_pair(s.at("pair"), c.pair, w + ".pair");
            }
            if (s.contains("fixed")) {
                spec.fixed.clear();
                for (const auto& f : s.at("fixed")) {
                    check_keys(f, {"ber_threshold", "transmissions"}, w + ".fixed");
                    FixedConfig fc;
                    read(f, "ber_threshold", fc.ber_threshold, w + ".fixed");
                    read(f, "transmissions", fc.transmissions, w + ".fixed");
                    spec.fixed.push_back(fc);
                }
            }
            read(s, "shannon_ifc", spec.shannon_ifc, w);
            read(s, "ifc_ber", spec.ifc_ber, w);
            try {
                spec.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            for (const auto& other : c.sweeps) {
                if (other.name == spec.name) {
                    throw ConfigError(w + ": duplicate sweep name '" + spec.name + "'");
                }
            }
            c.sweeps.push_back(std::move(spec));
        }
    }
    c.set_seed(seed);
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

nlohmann::ordered_json qos_to_json(const QosRequirement& q) {
    return {{"arrival_rate_bps", q.arrival_rate},
            {"total_delay_budget_s", q.total_delay_budget},
            {"lvp_threshold", q.lvp_threshold},
            {"decode_bler_threshold", q.decode_bler_threshold}};
}

nlohmann::ordered_json config_to_json(const Config& c) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = c.seed;
    const auto& p = c.params;
    j["system_params"] = {{"slot_duration_s", p.slot_duration},
                          {"feedback_rtt_s", p.feedback_rtt},
                          {"subcarriers_per_rb", p.subcarriers_per_rb},
                          {"symbols_per_rb", p.symbols_per_rb},
                          {"data_symbols_per_slot", p.data_symbols_per_slot},
                          {"subcarrier_spacing_hz", p.subcarrier_spacing},
                          {"total_rbs", p.total_rbs},
                          {"code_block_bits", p.code_block_bits},
                          {"max_transmissions", p.max_transmissions}};
    const std::string builtin = "builtin:";
    if (c.mcs_source.rfind(builtin, 0) == 0) {
        j["mcs_table"] = {{"builtin", c.mcs_source.substr(builtin.size())}};
    } else {
        j["mcs_table"] = {{"path", c.mcs_source}};
    }
    j["search"] = {{"rho_min", c.bounds.rho_min},
                   {"rho_max", c.bounds.rho_max},
                   {"tolerance", c.bounds.tolerance}};
    j["pair"] = {{"mean_snr_db", c.pair.mean_snr_db}, {"qos", qos_to_json(c.pair.qos)}};
    j["simulation"] = {{"mode", c.simulation.mode == SimMode::queue ? "queue" : "block"},
                       {"n_slots", c.simulation.n_slots},
                       {"n_blocks", c.simulation.n_blocks},
                       {"conditioned_draws", c.simulation.conditioned_draws},
                       {"trace", c.simulation.record_trace}};
    const auto& s = c.scenario;
    j["scenario"] = {{"aps", s.aps},
                     {"users", s.users},
                     {"area_m", s.area_m},
                     {"first_class_fraction", s.first_class_fraction},
                     {"decode_bler_threshold", s.decode_bler_threshold},
                     {"tx_power_dbm", s.path_loss.tx_power_dbm},
                     {"noise_figure_db", s.path_loss.noise_figure_db},
                     {"min_distance_m", s.path_loss.min_distance_m},
                     {"path_loss_intercept_db", s.path_loss.intercept_db},
                     {"path_loss_slope_db", s.path_loss.slope_db},
                     {"first_class", class_json(s.first_class)},
                     {"second_class", class_json(s.second_class)}};
    j["auction"] = {{"cost_scale", c.auction.cost_scale},
                    {"epsilon_denominator", c.auction.epsilon_denominator}};
    return j;
}

}  // namespace cran
