#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "twm/model.hpp"
#include "twm/oracle.hpp"
#include "twm/regimes.hpp"

namespace twm {

// Flat "key = value" text; '#' starts a comment.  Every key has a default.
struct Scenario {
    MediumParams medium;
    BoundaryFields boundary;
    std::string envelope1 = "flat", envelope2 = "flat";
    std::string regime = "general";
    std::string solver = "analytic";

    double z_max = 20.0;
    int n_z = 201;
    double tau_min = 0.0, tau_max = 0.0;
    int n_tau = 1;

    double prep_detuning = 0.0;
    double seed_eps = 0.0;
    double mb_tau_start = std::numeric_limits<double>::quiet_NaN();
    oracle::IntegratorConfig integrator;
    double omega1 = 1.0, omega2 = 1.0;

    std::string prefix = "twm";
    std::string format = "csv";

    // compare gates
    double tol_canonical = 1e-6;  // max |J_analytic - J_canonical| / eta scale
    double tol_mb = 1e-3;         // max |J_analytic - J_mb| / eta scale
    double tol_manley_rowe = 1e-8;
    double tol_hamiltonian = 1e-9;

    std::string sweep_parameter;
    double sweep_min = 0, sweep_max = 0;
    int sweep_count = 1;

    std::vector<double> z_grid() const {
        std::vector<double> z(static_cast<std::size_t>(n_z));
        for (int i = 0; i < n_z; ++i) z[i] = z_max * i / (n_z - 1);
        return z;
    }
    std::vector<double> tau_grid() const {
        std::vector<double> t(static_cast<std::size_t>(n_tau));
        for (int i = 0; i < n_tau; ++i) t[i] = n_tau == 1 ? tau_min : tau_min + (tau_max - tau_min) * i / (n_tau - 1);
        return t;
    }
    double eta_scale() const { return std::max({boundary.eta10, boundary.eta20, boundary.eta30}); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(v.substr(used)).size() != 0)
        throw Error(ErrorCode::BadScenario, key + ": expected a number, got '" + v + "'");
    return x;
}

inline int to_int(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw Error(ErrorCode::BadScenario, key + ": expected an integer");
    return static_cast<int>(x);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

}  // namespace detail

// flat | gaussian(fwhm[, center]) | sech(width[, center]) | flattop(on, off, rise) | samples(t:v, t:v, ...)
inline Envelope parse_envelope(const std::string& text) {
    std::string s = detail::trim(text);
    if (s == "flat") return Envelope::flat();
    auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') throw Error(ErrorCode::BadScenario, "bad envelope '" + s + "'");
    std::string name = detail::trim(s.substr(0, open));
    auto args = detail::split(s.substr(open + 1, s.size() - open - 2), ',');
    auto num = [&](std::size_t i) { return detail::to_double("envelope " + name, args.at(i)); };
    Envelope e = Envelope::flat();
    if (name == "gaussian" || name == "sech") {
        if (args.empty() || args.size() > 2) throw Error(ErrorCode::BadScenario, name + " takes (width[, center])");
        double c = args.size() == 2 ? num(1) : 0.0;
        e = name == "gaussian" ? Envelope::gaussian(num(0), c) : Envelope::sech(num(0), c);
    } else if (name == "flattop") {
        if (args.size() != 3) throw Error(ErrorCode::BadScenario, "flattop takes (t_on, t_off, rise)");
        e = Envelope::flattop(num(0), num(1), num(2));
    } else if (name == "samples") {
        std::vector<double> t, v;
        for (const auto& a : args) {
            auto tv = detail::split(a, ':');
            if (tv.size() != 2) throw Error(ErrorCode::BadScenario, "samples entries look like tau:value");
            t.push_back(detail::to_double("envelope samples", tv[0]));
            v.push_back(detail::to_double("envelope samples", tv[1]));
        }
        e = Envelope::samples(t, v);
    } else {
        throw Error(ErrorCode::BadScenario, "unknown envelope shape '" + name + "'");
    }
    auto msg = e.check();
    if (!msg.empty()) throw Error(ErrorCode::BadScenario, msg);
    return e;
}

struct ScenarioKey {
    std::string doc;
    std::function<void(Scenario&, const std::string&)> set;
    std::function<std::string(const Scenario&)> get;
    bool numeric = true;
};

namespace detail {
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace detail

inline const std::map<std::string, ScenarioKey>& scenario_keys() {
    using S = Scenario;
    static const std::map<std::string, ScenarioKey> keys = [] {
        std::map<std::string, ScenarioKey> k;
        auto num = [&k](const std::string& name, const std::string& doc, auto member) {
            k[name] = {doc, [name, member](S& s, const std::string& v) { member(s) = detail::to_double(name, v); },
                       [member](const S& s) { return detail::fmt17(member(const_cast<S&>(s))); }, true};
        };
        auto integer = [&k](const std::string& name, const std::string& doc, auto member) {
            k[name] = {doc, [name, member](S& s, const std::string& v) { member(s) = detail::to_int(name, v); },
                       [member](const S& s) { return std::to_string(member(const_cast<S&>(s))); }, true};
        };
        auto text = [&k](const std::string& name, const std::string& doc, auto member) {
            k[name] = {doc, [member](S& s, const std::string& v) { member(s) = v; },
                       [member](const S& s) { return member(const_cast<S&>(s)); }, false};
        };
        num("medium.N", "atomic density times the coupling prefactor", [](S& s) -> double& { return s.medium.N; });
        num("medium.mu1", "coupling of field 1", [](S& s) -> double& { return s.medium.mu1; });
        num("medium.mu2", "coupling of field 2", [](S& s) -> double& { return s.medium.mu2; });
        num("medium.mu3", "coupling of field 3", [](S& s) -> double& { return s.medium.mu3; });
        num("medium.delta2", "two-photon detuning", [](S& s) -> double& { return s.medium.delta2; });
        num("medium.delta3", "one-photon detuning of the upper level", [](S& s) -> double& { return s.medium.delta3; });
        num("medium.gamma", "upper-level decay rate", [](S& s) -> double& { return s.medium.gamma; });
        num("medium.delta_k", "residual wave-vector mismatch", [](S& s) -> double& { return s.medium.delta_k; });
        num("medium.theta", "constant phase offset", [](S& s) -> double& { return s.medium.theta; });
        num("boundary.eta10", "peak entrance flux of field 1", [](S& s) -> double& { return s.boundary.eta10; });
        num("boundary.eta20", "peak entrance flux of field 2", [](S& s) -> double& { return s.boundary.eta20; });
        num("boundary.eta30", "entrance flux of field 3", [](S& s) -> double& { return s.boundary.eta30; });
        num("boundary.phi0", "entrance phase of field 3", [](S& s) -> double& { return s.boundary.phi0; });
        text("boundary.envelope1", "time shape of field 1", [](S& s) -> std::string& { return s.envelope1; });
        text("boundary.envelope2", "time shape of field 2", [](S& s) -> std::string& { return s.envelope2; });
        text("regime", "general or a regime tag", [](S& s) -> std::string& { return s.regime; });
        text("solver", "analytic | canonical-ode | maxwell-bloch | all", [](S& s) -> std::string& { return s.solver; });
        num("grid.z_max", "medium length", [](S& s) -> double& { return s.z_max; });
        integer("grid.n_z", "number of z samples", [](S& s) -> int& { return s.n_z; });
        num("grid.tau_min", "first retarded time", [](S& s) -> double& { return s.tau_min; });
        num("grid.tau_max", "last retarded time", [](S& s) -> double& { return s.tau_max; });
        integer("grid.n_tau", "number of retarded-time slices", [](S& s) -> int& { return s.n_tau; });
        num("branch.prep_detuning", "detuning used to pick the entrance branch", [](S& s) -> double& { return s.prep_detuning; });
        num("oracle.seed_eps", "canonical start J at the vacuum point", [](S& s) -> double& { return s.seed_eps; });
        num("oracle.rtol", "relative tolerance", [](S& s) -> double& { return s.integrator.rtol; });
        num("oracle.atol", "absolute tolerance", [](S& s) -> double& { return s.integrator.atol; });
        num("oracle.max_step", "largest step as a fraction of the natural scale", [](S& s) -> double& { return s.integrator.max_step; });
        num("mb.tau_start", "start time of the Maxwell-Bloch run, all atoms in |1>", [](S& s) -> double& { return s.mb_tau_start; });
        num("frequency.omega1", "carrier frequency of field 1 (energy efficiency)", [](S& s) -> double& { return s.omega1; });
        num("frequency.omega2", "carrier frequency of field 2 (energy efficiency)", [](S& s) -> double& { return s.omega2; });
        text("output.prefix", "file name prefix", [](S& s) -> std::string& { return s.prefix; });
        text("output.format", "csv | svg | both", [](S& s) -> std::string& { return s.format; });
        num("tolerance.canonical", "compare gate: analytic vs canonical J", [](S& s) -> double& { return s.tol_canonical; });
        num("tolerance.mb", "compare gate: analytic vs Maxwell-Bloch J", [](S& s) -> double& { return s.tol_mb; });
        num("tolerance.manley_rowe", "compare gate: Manley-Rowe drift", [](S& s) -> double& { return s.tol_manley_rowe; });
        num("tolerance.hamiltonian", "compare gate: canonical energy drift", [](S& s) -> double& { return s.tol_hamiltonian; });
        text("sweep.parameter", "numeric key to sweep", [](S& s) -> std::string& { return s.sweep_parameter; });
        num("sweep.min", "first sweep value", [](S& s) -> double& { return s.sweep_min; });
        num("sweep.max", "last sweep value", [](S& s) -> double& { return s.sweep_max; });
        integer("sweep.count", "number of sweep values", [](S& s) -> int& { return s.sweep_count; });
        return k;
    }();
    return keys;
}

inline void set_key(Scenario& s, const std::string& key, const std::string& value) {
    const auto& keys = scenario_keys();
    auto it = keys.find(key);
    if (it == keys.end()) throw Error(ErrorCode::BadScenario, "unknown key '" + key + "'");
    it->second.set(s, value);
}

// structural checks; physics checks live in validate()
inline void check_scenario(Scenario& s) {
    s.boundary.envelope1 = parse_envelope(s.envelope1);
    s.boundary.envelope2 = parse_envelope(s.envelope2);
    if (s.regime != "general" && !regime_from_string(s.regime))
        throw Error(ErrorCode::BadScenario, "unknown regime '" + s.regime + "'");
    if (s.solver != "analytic" && s.solver != "canonical-ode" && s.solver != "maxwell-bloch" && s.solver != "all")
        throw Error(ErrorCode::BadScenario, "unknown solver '" + s.solver + "'");
    if (s.format != "csv" && s.format != "svg" && s.format != "both")
        throw Error(ErrorCode::BadScenario, "format must be csv, svg or both");
    if (s.n_z < 2 || !(s.z_max > 0)) throw Error(ErrorCode::GridMismatch, "grid needs n_z >= 2 and z_max > 0");
    if (s.n_tau < 1 || s.tau_max < s.tau_min) throw Error(ErrorCode::GridMismatch, "grid needs n_tau >= 1 and tau_max >= tau_min");
    if (s.n_tau > 1 && !(s.tau_max > s.tau_min)) throw Error(ErrorCode::GridMismatch, "several tau slices need tau_max > tau_min");
    if (s.sweep_count < 1) throw Error(ErrorCode::BadScenario, "sweep.count must be >= 1");
    if (!s.sweep_parameter.empty()) {
        auto it = scenario_keys().find(s.sweep_parameter);
        if (it == scenario_keys().end() || !it->second.numeric)
            throw Error(ErrorCode::BadScenario, "sweep.parameter '" + s.sweep_parameter + "' is not a numeric key");
    }
}

inline Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::istringstream is(text);
    std::string line;
    int n = 0;
    std::map<std::string, int> seen;
    while (std::getline(is, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::BadScenario, "line " + std::to_string(n) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        if (seen.count(key))
            throw Error(ErrorCode::BadScenario, "line " + std::to_string(n) + ": duplicate key '" + key + "'");
        seen[key] = n;
        try {
            set_key(s, key, value);
        } catch (const Error& e) {
            throw Error(ErrorCode::BadScenario, "line " + std::to_string(n) + ": " + e.what());
        }
    }
    check_scenario(s);
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadScenario, "cannot open scenario '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

// every key with its resolved value, sorted
inline std::vector<std::pair<std::string, std::string>> echo(const Scenario& s) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : scenario_keys()) out.emplace_back(k, v.get(s));
    return out;
}

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string scenario_hash(const Scenario& s) {
    std::string all;
    for (const auto& [k, v] : echo(s)) all += k + "=" + v + "\n";
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(all)));
    return buf;
}

}  // namespace twm
