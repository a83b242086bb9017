#include "noma/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace noma::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct FieldError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double to_double(const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw FieldError("expected a number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(out)) throw FieldError("expected a number, got '" + v + "'");
    return out;
}

std::uint64_t to_uint(const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw FieldError("expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw FieldError("expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw FieldError("empty list entry in '" + v + "'");
        out.push_back(item);
    }
    if (out.empty()) throw FieldError("expected a non-empty list");
    return out;
}

std::vector<double> to_doubles(const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_double(s));
    return out;
}

std::vector<std::size_t> to_sizes(const std::string& v) {
    std::vector<std::size_t> out;
    for (const auto& s : split_list(v)) out.push_back(static_cast<std::size_t>(to_uint(s)));
    return out;
}

double positive(double x) {
    if (!(x > 0.0)) throw FieldError("must be > 0");
    return x;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"distances", [](auto& c, const auto& v) {
             c.distances = to_doubles(v);
             for (double d : c.distances) positive(d);
         }},
        {"users", [](auto& c, const auto& v) { c.users = to_uint(v); }},
        {"carrier_freq", [](auto& c, const auto& v) { c.carrier_freq = positive(to_double(v)); }},
        {"pathloss_exponent", [](auto& c, const auto& v) { c.pathloss_exponent = positive(to_double(v)); }},
        {"antenna_gain", [](auto& c, const auto& v) { c.antenna_gain = positive(to_double(v)); }},
        {"noise_psd_dbm", [](auto& c, const auto& v) { c.noise_psd_dbm = to_double(v); }},
        {"bandwidth", [](auto& c, const auto& v) { c.bandwidth = positive(to_double(v)); }},
        {"p_max_dbm", [](auto& c, const auto& v) { c.p_max_dbm = to_double(v); }},
        {"seed", [](auto& c, const auto& v) { c.seed = to_uint(v); }},
        {"ideal", [](auto& c, const auto& v) { c.force_ideal = to_bool(v); }},

        {"pa.source", [](auto& c, const auto& v) {
             if (v == "explicit") c.pa_source = PaSource::Explicit;
             else if (v == "regression") c.pa_source = PaSource::Regression;
             else if (v == "fit") c.pa_source = PaSource::FitFile;
             else throw FieldError("expected explicit, regression or fit, got '" + v + "'");
         }},
        {"pa.a", [](auto& c, const auto& v) { c.pa_a = to_double(v); }},
        {"pa.alpha", [](auto& c, const auto& v) { c.pa_alpha = to_double(v); }},
        {"pa.k1", [](auto& c, const auto& v) { c.pa_k1 = to_double(v); }},
        {"pa.k2", [](auto& c, const auto& v) { c.pa_k2 = to_double(v); }},
        {"pa.fit_file", [](auto& c, const auto& v) { c.pa_fit_file = v; }},
        {"pa.fit_dpd", [](auto& c, const auto& v) { c.pa_fit_dpd = to_bool(v); }},

        {"solver.epsilon", [](auto& c, const auto& v) { c.solver.epsilon = to_double(v); }},
        {"solver.max_outer_iters", [](auto& c, const auto& v) { c.solver.max_outer_iters = static_cast<int>(to_uint(v)); }},
        {"solver.inner_tol", [](auto& c, const auto& v) { c.solver.inner_tol = to_double(v); }},
        {"solver.barrier_mu", [](auto& c, const auto& v) { c.solver.barrier_mu = to_double(v); }},
        {"solver.tau_grid", [](auto& c, const auto& v) { c.solver.tau_grid = static_cast<int>(to_uint(v)); }},
        {"solver.subgradient_c", [](auto& c, const auto& v) { c.solver.subgradient_c = to_double(v); }},

        {"sumrate.sigmas", [](auto& c, const auto& v) { c.sumrate_sigmas = to_doubles(v); }},
        {"sumrate.bandwidths", [](auto& c, const auto& v) { c.sumrate_bandwidths = to_doubles(v); }},
        {"sumrate.users", [](auto& c, const auto& v) { c.sumrate_users = to_uint(v); }},
        {"sumrate.user_sweep", [](auto& c, const auto& v) { c.sumrate_user_sweep = to_sizes(v); }},
        {"sumrate.user_sweep_sigma", [](auto& c, const auto& v) { c.sumrate_user_sweep_sigma = positive(to_double(v)); }},
        {"sumrate.floors", [](auto& c, const auto& v) { c.sumrate_floors = to_doubles(v); }},

        {"wsr.weights", [](auto& c, const auto& v) { c.wsr_weights = to_doubles(v); }},
        {"wsr.orders", [](auto& c, const auto& v) { c.wsr_orders = split_list(v); }},
        {"wsr.floor_sweep", [](auto& c, const auto& v) { c.wsr_floor_sweep = to_doubles(v); }},

        {"ofdm.subcarriers", [](auto& c, const auto& v) { c.ofdm_subcarriers = to_sizes(v); }},
        {"ofdm.cp", [](auto& c, const auto& v) { c.ofdm_cp = to_uint(v); }},
        {"ofdm.total_power_dbm", [](auto& c, const auto& v) { c.ofdm_total_power_dbm = to_double(v); }},
        {"ofdm.alloc_subcarriers", [](auto& c, const auto& v) { c.ofdm_alloc_subcarriers = to_uint(v); }},
        {"ofdm.alloc_resolution", [](auto& c, const auto& v) { c.ofdm_alloc_resolution = to_uint(v); }},

        {"fit.input", [](auto& c, const auto& v) { c.fit_input = v; }},
        {"fit.rows", [](auto& c, const auto& v) {
             if (v != "any" && v != "0" && v != "1") throw FieldError("expected any, 0 or 1");
             c.fit_rows = v;
         }},

        {"dpd.p_min_dbm", [](auto& c, const auto& v) { c.dpd.p_min_dbm = to_double(v); }},
        {"dpd.p_max_dbm", [](auto& c, const auto& v) { c.dpd.p_max_dbm = to_double(v); }},
        {"dpd.step_db", [](auto& c, const auto& v) { c.dpd.step_db = positive(to_double(v)); }},
        {"dpd.subcarriers", [](auto& c, const auto& v) { c.dpd.n_subcarriers = to_uint(v); }},
        {"dpd.cp", [](auto& c, const auto& v) { c.dpd.cp_len = to_uint(v); }},
        {"dpd.frames", [](auto& c, const auto& v) { c.dpd.frames = to_uint(v); }},
        {"dpd.iters", [](auto& c, const auto& v) { c.dpd.dpd_iters = static_cast<int>(to_uint(v)); }},
        {"dpd.smoothness", [](auto& c, const auto& v) { c.dpd.pa.smoothness = positive(to_double(v)); }},
        {"dpd.saturation", [](auto& c, const auto& v) { c.dpd.pa.saturation_amplitude = positive(to_double(v)); }},
        {"dpd.gain", [](auto& c, const auto& v) { c.dpd.pa.linear_gain = positive(to_double(v)); }},
        {"dpd.taps", [](auto& c, const auto& v) { c.dpd.pa.memory_taps = to_doubles(v); }},
        {"dpd.structure", [](auto& c, const auto& v) {
             const auto s = to_sizes(v);
             if (s.size() != 8) throw FieldError("expected 8 integers P_a,L_a,P_b,L_b,Q_b,P_c,L_c,Q_c");
             c.dpd.structure = {s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7]};
         }},
    };
    return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) {
            throw std::invalid_argument(where + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw std::invalid_argument(where + ": unknown field '" + key + "'");
        if (value.empty()) throw std::invalid_argument(where + ": field '" + key + "' has no value");
        try {
            it->second(cfg, value);
        } catch (const FieldError& e) {
            throw std::invalid_argument(where + ": field '" + key + "': " + e.what());
        }
    }
    try {
        cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

double pathloss_gain(double distance, double carrier_freq, double sigma, double antenna_gain) {
    if (!(distance > 0.0)) throw std::domain_error("distance must be > 0");
    if (!(carrier_freq > 0.0)) throw std::domain_error("carrier frequency must be > 0");
    constexpr double kLight = 3e8;
    constexpr double kPi = 3.14159265358979323846;
    return antenna_gain * std::pow(kLight / (4.0 * kPi * carrier_freq * distance), sigma);
}

std::vector<double> resolve_distances(const ExperimentConfig& cfg, std::optional<std::size_t> users) {
    const std::size_t k = users.value_or(cfg.users);
    if (!users && cfg.users == 0) {
        if (cfg.distances.empty()) throw std::invalid_argument("config: no distances and no users");
        return cfg.distances;
    }
    if (k == 0) throw std::invalid_argument("config: users must be >= 1");
    std::vector<double> d(k);
    for (std::size_t i = 0; i < k; ++i) d[i] = 60.0 + 20.0 * static_cast<double>(i);
    return d;
}

PaModel resolve_pa_model(const ExperimentConfig& cfg) {
    if (cfg.force_ideal) return PaModel::ideal();
    switch (cfg.pa_source) {
        case PaSource::Explicit:
            return PaModel(cfg.pa_a, cfg.pa_alpha);
        case PaSource::Regression:
            return to_power_law({cfg.pa_k1, cfg.pa_k2});
        case PaSource::FitFile: {
            if (cfg.pa_fit_file.empty()) throw std::invalid_argument("config: pa.fit_file is required");
            const auto data = read_measurements(cfg.pa_fit_file, cfg.pa_fit_dpd ? "1" : "0");
            return dpd::fit_power_law(data).model;
        }
    }
    throw std::logic_error("unknown PA source");
}

Scenario build_scenario(const ExperimentConfig& cfg, const PaModel& model,
                        std::optional<double> sigma, std::optional<std::size_t> users,
                        std::optional<double> bandwidth) {
    const double b = bandwidth.value_or(cfg.bandwidth);
    const double noise = dbm_to_watts(cfg.noise_psd_dbm) * b;
    std::vector<double> gains;
    for (double d : resolve_distances(cfg, users)) {
        gains.push_back(pathloss_gain(d, cfg.carrier_freq, sigma.value_or(cfg.pathloss_exponent),
                                      cfg.antenna_gain));
    }
    return Scenario::homogeneous(gains, dbm_to_watts(cfg.p_max_dbm), model, noise, b);
}

std::vector<dpd::NmseMeasurement> read_measurements(const std::filesystem::path& path,
                                                    const std::string& rows) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open measurement file " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument(path.string() + ": empty file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(trim(c));
    }
    auto index_of = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] == name) return i;
        }
        return std::nullopt;
    };
    const auto ip = index_of("p_out_dBm");
    const auto in_db = index_of("nmse_db");
    const auto id = index_of("dpd_enabled");
    if (!ip || !in_db) {
        throw std::invalid_argument(path.string() + ": needs p_out_dBm and nmse_db columns");
    }
    std::vector<dpd::NmseMeasurement> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) f.push_back(trim(c));
        try {
            if (f.size() != cols.size()) throw FieldError("wrong number of columns");
            if (rows != "any" && id && f[*id] != rows) continue;
            out.push_back({dbm_to_watts(to_double(f[*ip])), to_double(f[*in_db])});
        } catch (const FieldError& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace noma::cli
