#include "pemsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pemsim {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, int line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        fail(line, "expected a finite number, got '" + s + "'");
    }
    return v;
}

int to_int(const std::string& s, int line) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        fail(line, "expected an integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s, int line) {
    if (s == "true") return true;
    if (s == "false") return false;
    fail(line, "expected true or false, got '" + s + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>> kSchema = {
    {"plate", {"rho", "E", "h", "a", "l0", "t0"}},
    {"actuator", {"g_mm", "g_12", "g_em", "g_ee", "b"}},
    {"grid", {"n", "bc"}},
    {"circuit", {"R0", "use_actuator_capacitance"}},
    {"dispersion", {"k_min", "k_max", "samples", "spacing"}},
    {"modal", {"m", "n", "eigenvalue", "t_span", "samples", "R", "p0", "p_dot0", "q0", "q_dot0"}},
    {"simulate", {"m", "n", "t_span", "dt", "sample_stride", "R", "deflection"}},
    {"optimize", {"m", "n", "eigenvalue", "R_min", "R_max"}},
};

const std::set<std::string> kRequired = {"plate.rho", "plate.E",  "plate.h", "plate.a",
                                         "plate.l0",  "plate.t0", "actuator.g_em",
                                         "actuator.g_ee", "actuator.b", "grid.n", "grid.bc"};

bool parse_discrete_eigenvalue(const std::string& v, int line) {
    if (v == "continuous") return false;
    if (v == "discrete") return true;
    fail(line, "eigenvalue must be continuous or discrete, got '" + v + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Section> sections;
    {
        std::istringstream is(text);
        std::string line;
        std::string current;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "unterminated section header");
                current = trim(line.substr(1, line.size() - 2));
                if (!kSchema.count(current)) fail(lineno, "unknown section [" + current + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected key = value");
            if (current.empty()) fail(lineno, "key outside of any section");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!kSchema.at(current).count(key)) {
                fail(lineno, "unknown key '" + key + "' in section [" + current + "]");
            }
            if (value.empty()) fail(lineno, "empty value for key '" + key + "'");
            auto [it, inserted] = sections[current].emplace(key, Entry{value, lineno});
            if (!inserted) {
                fail(lineno, "duplicate key '" + key + "' (first set on line " +
                                 std::to_string(it->second.line) + ")");
            }
        }
    }

    for (const auto& req : kRequired) {
        const auto dot = req.find('.');
        const std::string sec = req.substr(0, dot), key = req.substr(dot + 1);
        if (!sections.count(sec) || !sections.at(sec).count(key)) {
            throw ConfigError("config: missing required key " + req);
        }
    }

    RunConfig cfg;
    auto get = [&](const char* sec, const char* key) -> const Entry* {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto dbl = [&](const char* sec, const char* key, double dflt) {
        const Entry* e = get(sec, key);
        return e ? to_double(e->value, e->line) : dflt;
    };
    auto intg = [&](const char* sec, const char* key, int dflt) {
        const Entry* e = get(sec, key);
        return e ? to_int(e->value, e->line) : dflt;
    };
    auto boolean = [&](const char* sec, const char* key, bool dflt) {
        const Entry* e = get(sec, key);
        return e ? to_bool(e->value, e->line) : dflt;
    };

    cfg.plate.rho = dbl("plate", "rho", 0);
    cfg.plate.E = dbl("plate", "E", 0);
    cfg.plate.h = dbl("plate", "h", 0);
    cfg.plate.a = dbl("plate", "a", 0);
    cfg.plate.l0 = dbl("plate", "l0", 0);
    cfg.plate.t0 = dbl("plate", "t0", 0);

    cfg.actuator.g_mm = dbl("actuator", "g_mm", 0.0);
    cfg.actuator.g_12 = dbl("actuator", "g_12", 0.0);
    cfg.actuator.g_em = dbl("actuator", "g_em", 0);
    cfg.actuator.g_ee = dbl("actuator", "g_ee", 0);
    cfg.actuator.b = dbl("actuator", "b", 0);

    cfg.grid_n = intg("grid", "n", 0);
    {
        const Entry* e = get("grid", "bc");
        try {
            cfg.bc = boundary_condition_from_string(e->value);
        } catch (const std::invalid_argument& ex) {
            fail(e->line, ex.what());
        }
    }

    cfg.R0 = dbl("circuit", "R0", cfg.R0);
    cfg.use_actuator_capacitance =
        boolean("circuit", "use_actuator_capacitance", cfg.use_actuator_capacitance);

    cfg.dispersion.k_min = dbl("dispersion", "k_min", cfg.dispersion.k_min);
    cfg.dispersion.k_max = dbl("dispersion", "k_max", cfg.dispersion.k_max);
    cfg.dispersion.samples = intg("dispersion", "samples", cfg.dispersion.samples);
    if (const Entry* e = get("dispersion", "spacing")) {
        if (e->value == "log") cfg.dispersion.log_spacing = true;
        else if (e->value == "linear") cfg.dispersion.log_spacing = false;
        else fail(e->line, "spacing must be linear or log");
    }

    cfg.modal.m = intg("modal", "m", cfg.modal.m);
    cfg.modal.n = intg("modal", "n", cfg.modal.n);
    if (const Entry* e = get("modal", "eigenvalue")) {
        cfg.modal.discrete_eigenvalue = parse_discrete_eigenvalue(e->value, e->line);
    }
    cfg.modal.t_span = dbl("modal", "t_span", cfg.modal.t_span);
    cfg.modal.samples = intg("modal", "samples", cfg.modal.samples);
    cfg.modal.R = dbl("modal", "R", cfg.modal.R);
    cfg.modal.p0 = dbl("modal", "p0", cfg.modal.p0);
    cfg.modal.p_dot0 = dbl("modal", "p_dot0", cfg.modal.p_dot0);
    cfg.modal.q0 = dbl("modal", "q0", cfg.modal.q0);
    cfg.modal.q_dot0 = dbl("modal", "q_dot0", cfg.modal.q_dot0);

    cfg.simulate.m = intg("simulate", "m", cfg.simulate.m);
    cfg.simulate.n = intg("simulate", "n", cfg.simulate.n);
    cfg.simulate.t_span = dbl("simulate", "t_span", cfg.simulate.t_span);
    cfg.simulate.dt = dbl("simulate", "dt", cfg.simulate.dt);
    cfg.simulate.sample_stride = intg("simulate", "sample_stride", cfg.simulate.sample_stride);
    cfg.simulate.R = dbl("simulate", "R", cfg.simulate.R);
    cfg.simulate.deflection = dbl("simulate", "deflection", cfg.simulate.deflection);

    cfg.optimize.m = intg("optimize", "m", cfg.optimize.m);
    cfg.optimize.n = intg("optimize", "n", cfg.optimize.n);
    if (const Entry* e = get("optimize", "eigenvalue")) {
        cfg.optimize.discrete_eigenvalue = parse_discrete_eigenvalue(e->value, e->line);
    }
    cfg.optimize.R_min = dbl("optimize", "R_min", cfg.optimize.R_min);
    cfg.optimize.R_max = dbl("optimize", "R_max", cfg.optimize.R_max);

    return cfg;
}

std::vector<std::string> RunConfig::validate() const {
    try {
        plate.validate();
        actuator.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    if (grid_n < 5) throw ConfigError("config: grid n must be >= 5");
    if (!(R0 > 0)) throw ConfigError("config: circuit R0 must be positive");

    if (!(dispersion.k_min > 0) || dispersion.k_max < dispersion.k_min) {
        throw ConfigError("config: dispersion k range must satisfy 0 < k_min <= k_max");
    }
    if (dispersion.samples < 1) throw ConfigError("config: dispersion samples must be >= 1");
    if (dispersion.samples == 1 && dispersion.k_max != dispersion.k_min) {
        throw ConfigError("config: a single-sample sweep needs k_min == k_max");
    }

    for (auto [m, n, what] :
         {std::tuple{modal.m, modal.n, "modal"}, std::tuple{simulate.m, simulate.n, "simulate"},
          std::tuple{optimize.m, optimize.n, "optimize"}}) {
        if (m < 1 || n < 1) {
            throw ConfigError(std::string("config: ") + what + " mode indices must be >= 1");
        }
    }
    if (simulate.m > grid_n || simulate.n > grid_n) {
        throw ConfigError("config: simulate mode exceeds grid resolution");
    }
    if (!(modal.t_span > 0) || !(simulate.t_span > 0)) {
        throw ConfigError("config: t_span must be positive");
    }
    if (modal.samples < 2) throw ConfigError("config: modal samples must be >= 2");
    if (simulate.dt < 0) throw ConfigError("config: simulate dt must be >= 0 (0 = auto)");
    if (simulate.sample_stride < 1) throw ConfigError("config: sample_stride must be >= 1");
    if (modal.R < 0 || simulate.R < 0) throw ConfigError("config: R must be >= 0 (0 = none)");
    if (!(simulate.deflection > 0)) throw ConfigError("config: deflection must be positive");
    if (!(optimize.R_min > 0) || !(optimize.R_max > optimize.R_min)) {
        throw ConfigError("config: optimize needs 0 < R_min < R_max");
    }

    std::vector<std::string> warnings;
    if (!plate.is_thin_plate()) {
        warnings.push_back("h/a >= 0.1: outside the thin-plate regime");
    }
    const double spacing = plate.l0 / (grid_n + 1);
    if (actuator.b > spacing * (1.0 + 1e-12)) {
        throw ConfigError("config: actuator edge b exceeds the physical grid spacing");
    }
    if (plate.a != plate.l0) {
        warnings.push_back("a != l0: the dimensionless domain is the unit square scaled by l0");
    }
    return warnings;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    LoadedConfig lc;
    lc.raw = ss.str();
    lc.path = path;
    lc.config = parse_config(lc.raw);
    return lc;
}

}  // namespace pemsim
