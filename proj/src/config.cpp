#include "spinprop/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "spinprop/symbols.hpp"

namespace spinprop {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw config_error(std::string(where) + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw config_error(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

double number_at(const json& obj, const char* where, const char* key, bool required,
                 double fallback = 0.0) {
    if (!obj.contains(key)) {
        if (required) throw config_error(std::string(where) + ": missing key '" + key + "'");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw config_error(std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

cplx complex_at(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key)) throw config_error(std::string(where) + ": missing key '" + key + "'");
    const json& v = obj.at(key);
    check_keys(v, (std::string(where) + "." + key).c_str(), {"re", "im"});
    return cplx(number_at(v, key, "re", false), number_at(v, key, "im", false));
}

}  // namespace

BoundaryData RunConfig::boundary(double time) const {
    BoundaryData bd;
    bd.zp = zp;
    bd.sp = sp;
    bd.zpp_conj = std::conj(zpp);
    bd.spp_conj = std::conj(spp);
    bd.size = size;
    bd.hbar = hbar;
    bd.T = time;
    return bd;
}

std::vector<double> RunConfig::scan_times() const {
    std::vector<double> times;
    times.reserve(steps);
    for (int k = 0; k < steps; ++k)
        times.push_back(steps == 1 ? t_min
                                   : t_min + (t_max - t_min) * k / static_cast<double>(steps - 1));
    return times;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: JSON parse failure: ") + e.what());
    }
    check_keys(root, "config",
               {"hamiltonian", "j", "hbar", "boundary", "time", "tolerances", "reference", "oracle",
                "output"});

    RunConfig cfg;
    if (!root.contains("hamiltonian")) throw config_error("config: missing key 'hamiltonian'");
    try {
        cfg.hamiltonian = operator_spec_from_json(root.at("hamiltonian").dump());
    } catch (const std::exception& e) {
        throw config_error(std::string("config.hamiltonian: ") + e.what());
    }

    double jval = number_at(root, "config", "j", true);
    double twoj = 2.0 * jval;
    if (std::abs(twoj - std::round(twoj)) > 1e-9 || std::round(twoj) < 1.0)
        throw config_error("config: j must be a positive half-integer");
    cfg.size = SpinSize{static_cast<int>(std::llround(twoj))};
    cfg.hbar = number_at(root, "config", "hbar", false, 1.0);
    if (cfg.hbar <= 0.0) throw config_error("config: hbar must be positive");

    if (!root.contains("boundary")) throw config_error("config: missing key 'boundary'");
    const json& b = root.at("boundary");
    check_keys(b, "config.boundary", {"zp", "sp", "zpp", "spp"});
    cfg.zp = complex_at(b, "config.boundary", "zp");
    cfg.sp = complex_at(b, "config.boundary", "sp");
    cfg.zpp = complex_at(b, "config.boundary", "zpp");
    cfg.spp = complex_at(b, "config.boundary", "spp");

    if (!root.contains("time")) throw config_error("config: missing key 'time'");
    const json& t = root.at("time");
    if (t.is_number()) {
        cfg.T = t.get<double>();
        if (cfg.T < 0.0) throw config_error("config.time: T must be >= 0");
    } else {
        check_keys(t, "config.time", {"t_min", "t_max", "steps"});
        cfg.has_scan = true;
        cfg.t_min = number_at(t, "config.time", "t_min", true);
        cfg.t_max = number_at(t, "config.time", "t_max", true);
        double st = number_at(t, "config.time", "steps", true);
        cfg.steps = static_cast<int>(std::llround(st));
        if (cfg.t_min < 0.0 || cfg.t_max < cfg.t_min || cfg.steps < 1 ||
            st != static_cast<double>(cfg.steps))
            throw config_error("config.time: need 0 <= t_min <= t_max and integer steps >= 1");
    }

    if (root.contains("tolerances")) {
        const json& tol = root.at("tolerances");
        check_keys(tol, "config.tolerances", {"ode", "newton", "tail"});
        cfg.tol_ode = number_at(tol, "config.tolerances", "ode", false, cfg.tol_ode);
        cfg.tol_newton = number_at(tol, "config.tolerances", "newton", false, cfg.tol_newton);
        cfg.tol_tail = number_at(tol, "config.tolerances", "tail", false, cfg.tol_tail);
        if (cfg.tol_ode <= 0.0 || cfg.tol_newton <= 0.0 || cfg.tol_tail <= 0.0)
            throw config_error("config.tolerances: tolerances must be positive");
    }

    if (root.contains("reference")) {
        const json& ref = root.at("reference");
        check_keys(ref, "config.reference", {"n_max"});
        double nm = number_at(ref, "config.reference", "n_max", true);
        cfg.n_max = static_cast<int>(std::llround(nm));
        if (cfg.n_max < 1 || nm != static_cast<double>(cfg.n_max))
            throw config_error("config.reference: n_max must be an integer >= 1");
    }

    if (root.contains("oracle")) {
        const json& orc = root.at("oracle");
        check_keys(orc, "config.oracle", {"N_list"});
        if (!orc.contains("N_list") || !orc.at("N_list").is_array())
            throw config_error("config.oracle: N_list must be an array of integers");
        for (const auto& v : orc.at("N_list")) {
            if (!v.is_number_integer() || v.get<int>() < 2)
                throw config_error("config.oracle: N_list entries must be integers >= 2");
            cfg.N_list.push_back(v.get<int>());
        }
    }

    if (root.contains("output")) {
        const json& out = root.at("output");
        check_keys(out, "config.output", {"path", "format"});
        if (out.contains("path")) {
            if (!out.at("path").is_string())
                throw config_error("config.output: path must be a string");
            cfg.out_path = out.at("path").get<std::string>();
        }
        if (out.contains("format")) {
            if (!out.at("format").is_string())
                throw config_error("config.output: format must be 'csv' or 'json'");
            std::string f = out.at("format").get<std::string>();
            if (f == "csv")
                cfg.format = Format::csv;
            else if (f == "json")
                cfg.format = Format::json;
            else
                throw config_error("config.output: format must be 'csv' or 'json'");
        }
    }

    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace spinprop
