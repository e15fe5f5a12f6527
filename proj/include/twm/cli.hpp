#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "twm/hamiltonian.hpp"
#include "twm/oracle.hpp"
#include "twm/regimes.hpp"
#include "twm/report.hpp"
#include "twm/scenario.hpp"

namespace twm::cli {

enum Exit { Ok = 0, Validation = 2, SolverFailure = 3, ToleranceBreach = 4 };

inline int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::NonPositiveCoupling:
    case ErrorCode::NegativeFlux:
    case ErrorCode::ResonanceViolation:
    case ErrorCode::DomainError:
    case ErrorCode::MuOrdering:
    case ErrorCode::ConditionViolated:
    case ErrorCode::GridMismatch:
    case ErrorCode::CFLViolation:
    case ErrorCode::BadScenario: return Validation;
    default: return SolverFailure;
    }
}

struct Options {
    std::string command;
    std::string scenario;
    std::string out = ".";
    std::optional<std::string> solver;
    std::optional<std::string> format;
    std::optional<double> seed_eps;
    int threads = 1;
};

// Runs fn(i) for i in [0, n) on a small pool; results are stored by index so order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

// One solver's output on the (tau, z) grid.
struct Grid2 {
    std::vector<double> tau, z;
    // [tau][z]
    std::vector<std::vector<double>> eta1, eta2, eta3, J, phi, pop1, pop2, pop3;
    std::vector<std::vector<double>> H;  // canonical only

    void resize(std::size_t nt, std::size_t nz) {
        for (auto* v : {&eta1, &eta2, &eta3, &J, &phi, &pop1, &pop2, &pop3})
            v->assign(nt, std::vector<double>(nz, std::numeric_limits<double>::quiet_NaN()));
    }
};

inline AdiabaticSolution analytic_slice(const Scenario& sc, const BoundaryFields& b) {
    EntranceOptions eo;
    eo.prep_detuning = sc.prep_detuning;
    return solve(sc.medium, b, eo);
}

inline Grid2 run_analytic(const Scenario& sc, int threads) {
    Grid2 g;
    g.tau = sc.tau_grid();
    g.z = sc.z_grid();
    g.resize(g.tau.size(), g.z.size());
    std::vector<std::optional<Error>> errs(g.tau.size());
    parallel_for(g.tau.size(), threads, [&](std::size_t it) {
        try {
            auto b = sc.boundary.at(g.tau[it]);
            auto s = analytic_slice(sc, b);
            auto tr = sample(s, g.z, true);
            for (std::size_t iz = 0; iz < g.z.size(); ++iz) {
                const auto& p = tr[iz];
                g.eta1[it][iz] = p.eta1;
                g.eta2[it][iz] = p.eta2;
                g.eta3[it][iz] = p.eta3;
                g.J[it][iz] = p.J;
                g.phi[it][iz] = p.phi;
                g.pop1[it][iz] = std::norm(p.state.c1);
                g.pop2[it][iz] = std::norm(p.state.c2);
                g.pop3[it][iz] = std::norm(p.state.c3);
            }
        } catch (const Error& e) {
            errs[it] = e;
        }
    });
    for (auto& e : errs)
        if (e) throw *e;
    return g;
}

inline Grid2 run_canonical(const Scenario& sc, int threads) {
    Grid2 g;
    g.tau = sc.tau_grid();
    g.z = sc.z_grid();
    g.resize(g.tau.size(), g.z.size());
    g.H.assign(g.tau.size(), std::vector<double>(g.z.size(), 0.0));
    std::vector<std::optional<Error>> errs(g.tau.size());
    const auto& p = sc.medium;
    parallel_for(g.tau.size(), threads, [&](std::size_t it) {
        try {
            auto b = sc.boundary.at(g.tau[it]);
            oracle::CanonicalOptions co;
            co.seed_eps = sc.seed_eps;
            co.prep_detuning = sc.prep_detuning;
            auto tr = oracle::integrate_canonical(p, b, g.z, sc.integrator, co);
            for (std::size_t iz = 0; iz < g.z.size(); ++iz) {
                g.eta1[it][iz] = tr.eta1[iz];
                g.eta2[it][iz] = tr.eta2[iz];
                g.eta3[it][iz] = tr.eta3[iz];
                g.J[it][iz] = tr.J[iz];
                g.phi[it][iz] = tr.phi[iz];
                g.H[it][iz] = tr.H[iz];
                try {
                    auto st = atomic_state(std::sqrt(p.mu1 * std::max(0.0, tr.eta1[iz])),
                                           std::sqrt(p.mu2 * std::max(0.0, tr.eta2[iz])),
                                           std::sqrt(p.mu3 * std::max(0.0, tr.eta3[iz])), tr.phi[iz], p.delta2, p.delta3,
                                           tr.lambda0[iz]);
                    g.pop1[it][iz] = std::norm(st.c1);
                    g.pop2[it][iz] = std::norm(st.c2);
                    g.pop3[it][iz] = std::norm(st.c3);
                } catch (const Error&) {
                    // populations stay NaN where the eigenvector is not unique
                }
            }
        } catch (const Error& e) {
            errs[it] = e;
        }
    });
    for (auto& e : errs)
        if (e) throw *e;
    return g;
}

inline Grid2 run_mb(const Scenario& sc) {
    Grid2 g;
    g.tau = sc.tau_grid();
    g.z = sc.z_grid();
    g.resize(g.tau.size(), g.z.size());
    oracle::MbOptions mo;
    mo.tau_start = sc.mb_tau_start;
    auto r = oracle::integrate_mb(sc.medium, sc.boundary, {g.z, g.tau}, sc.integrator, mo);
    for (std::size_t it = 0; it < g.tau.size(); ++it)
        for (std::size_t iz = 0; iz < g.z.size(); ++iz) {
            g.eta1[it][iz] = r.eta(0, it, iz);
            g.eta2[it][iz] = r.eta(1, it, iz);
            g.eta3[it][iz] = r.eta(2, it, iz);
            g.J[it][iz] = r.J(it, iz);
            g.phi[it][iz] = r.phi(it, iz);
            g.pop1[it][iz] = r.population(0, it, iz);
            g.pop2[it][iz] = r.population(1, it, iz);
            g.pop3[it][iz] = r.population(2, it, iz);
        }
    return g;
}

inline std::vector<std::string> metadata(const Scenario& sc, const std::string& solver) {
    std::vector<std::string> m;
    m.push_back("scenario_hash = " + scenario_hash(sc));
    m.push_back("solver = " + solver);
    for (const auto& [k, v] : echo(sc)) m.push_back(k + " = " + v);
    return m;
}

inline report::Table to_table(const Scenario& sc, const Grid2& g, const std::string& solver) {
    report::Table t;
    t.meta = metadata(sc, solver);
    t.header = {"tau", "z", "eta1", "eta2", "eta3", "J", "phi", "pop1", "pop2", "pop3"};
    for (std::size_t it = 0; it < g.tau.size(); ++it)
        for (std::size_t iz = 0; iz < g.z.size(); ++iz)
            t.rows.push_back({g.tau[it], g.z[iz], g.eta1[it][iz], g.eta2[it][iz], g.eta3[it][iz], g.J[it][iz],
                              g.phi[it][iz], g.pop1[it][iz], g.pop2[it][iz], g.pop3[it][iz]});
    return t;
}

// slice where the entrance pulses are strongest
inline std::size_t peak_slice(const Scenario& sc, const std::vector<double>& tau) {
    std::size_t best = 0;
    double v = -1;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        auto b = sc.boundary.at(tau[i]);
        if (b.eta10 + b.eta20 > v) v = b.eta10 + b.eta20, best = i;
    }
    return best;
}

// closed-form J(z) of the chosen regime
inline double regime_J(const Scenario& sc, Regime r, const BoundaryFields& b, double z) {
    const auto& p = sc.medium;
    switch (r) {
    case Regime::EitUndepleted: return linear_solution(regime_parameters(r, p, b), b.eta10, z);
    case Regime::EitDepleted: {
        double dk = regime_parameters(r, p, b).delta_k_prime;
        return dk == 0 ? eit_depleted(z, p, b.eta10) : eit_mismatch(z, p, b.eta10, dk).J;
    }
    case Regime::MaxCohUndepleted: return maxcoh_undepleted(z, p, b);
    case Regime::MaxCohDepleted: return maxcoh_depleted(z, p, b.eta10);
    case Regime::Conventional: return conventional(z, p, b);
    }
    return 0;
}

inline void write_outputs(const Scenario& sc, const Options& o, const Grid2& g, const std::string& solver) {
    std::filesystem::path dir(o.out);
    std::string base = (dir / (sc.prefix + "_" + solver)).string();
    if (sc.format == "csv" || sc.format == "both") report::write_csv(base + ".csv", to_table(sc, g, solver));
    if (sc.format == "svg" || sc.format == "both") {
        auto it = peak_slice(sc, g.tau);
        report::write_svg(base + "_J.svg", "exchange J(z), " + solver, "z", g.z,
                          {{"J", g.J[it]}, {"eta1", g.eta1[it]}, {"eta2", g.eta2[it]}});
        report::write_svg(base + "_pop.svg", "bare-state populations, " + solver, "z", g.z,
                          {{"|c1|^2", g.pop1[it]}, {"|c2|^2", g.pop2[it]}, {"|c3|^2", g.pop3[it]}});
    }
}

inline std::vector<std::string> solvers_of(const Scenario& sc) {
    if (sc.solver == "all") return {"analytic", "canonical-ode", "maxwell-bloch"};
    return {sc.solver};
}

inline Grid2 run_solver(const Scenario& sc, const std::string& solver, int threads) {
    if (solver == "analytic") return run_analytic(sc, threads);
    if (solver == "canonical-ode") return run_canonical(sc, threads);
    return run_mb(sc);
}

inline int cmd_solve(const Scenario& sc, const Options& o, std::ostream& log) {
    std::filesystem::create_directories(o.out);
    for (const auto& solver : solvers_of(sc)) {
        auto g = run_solver(sc, solver, o.threads);
        write_outputs(sc, o, g, solver);
        log << "wrote " << solver << " (" << g.tau.size() << " x " << g.z.size() << ")\n";
    }
    if (sc.regime != "general") {
        auto r = *regime_from_string(sc.regime);
        report::Table t;
        t.meta = metadata(sc, std::string("regime ") + to_string(r));
        auto b0 = sc.boundary.at(sc.tau_grid()[peak_slice(sc, sc.tau_grid())]);
        auto spec = regime_parameters(r, sc.medium, b0);
        t.meta.push_back("kappa = " + report::num(spec.kappa));
        t.meta.push_back("Gamma = " + report::num(spec.Gamma));
        t.meta.push_back("delta_k_prime = " + report::num(spec.delta_k_prime));
        t.meta.push_back("N_z_opt = " + report::num(optimal_length(spec)));
        for (const auto& w : spec.warnings) t.meta.push_back("warning: " + w);
        t.header = {"tau", "z", "J"};
        for (double tau : sc.tau_grid()) {
            auto b = sc.boundary.at(tau);
            for (double z : sc.z_grid()) t.rows.push_back({tau, z, regime_J(sc, r, b, z)});
        }
        report::write_csv((std::filesystem::path(o.out) / (sc.prefix + "_regime.csv")).string(), t);
        for (const auto& w : spec.warnings) log << "warning: " << w << "\n";
    }
    return Ok;
}

struct SweepRow {
    double value = 0, J_max = 0, z_opt = 0, epsilon = 0, W = 0;
    int status = 0;
};

// Uses the exact turning point when it lies inside the medium, otherwise the exit value.
inline SweepRow sweep_row(const Scenario& base, double value) {
    SweepRow row;
    row.value = value;
    Scenario sc = base;
    set_key(sc, sc.sweep_parameter, report::num(value));
    check_scenario(sc);
    validate(sc.medium, sc.boundary);
    auto tau = sc.tau_grid();
    std::vector<AdiabaticSolution> sols;
    std::size_t bt = 0;
    double best = -1, zbest = 0;
    for (std::size_t it = 0; it < tau.size(); ++it) {
        sols.push_back(analytic_slice(sc, sc.boundary.at(tau[it])));
        const auto& s = sols.back();
        double zq = s.monotone || s.trivial ? std::numeric_limits<double>::infinity() : s.z_quarter;
        double z = std::min(zq, sc.z_max);
        double J = zq <= sc.z_max ? s.J1 : exchange_at(z, s).J;
        if (J > best) best = J, zbest = z, bt = it;
    }
    row.J_max = best;
    row.z_opt = zbest;
    auto b = sc.boundary.at(tau[bt]);
    row.epsilon = fractional_efficiency(std::max(0.0, best), b.eta10, b.eta20);
    double w3 = sc.omega1 + sc.omega2;
    if (tau.size() < 2) {
        row.W = w3 * std::max(0.0, best) / (sc.omega1 * b.eta10 + sc.omega2 * b.eta20);
    } else {
        FluxSeries out, in;
        for (std::size_t it = 0; it < tau.size(); ++it) {
            auto bi = sc.boundary.at(tau[it]);
            out.tau.push_back(tau[it]);
            out.eta3.push_back(fluxes_at(exchange_at(zbest, sols[it]), bi).eta3);
            in.tau.push_back(tau[it]);
            in.eta1.push_back(bi.eta10);
            in.eta2.push_back(bi.eta20);
        }
        row.W = total_efficiency(out, in, sc.omega1, sc.omega2, w3);
    }
    return row;
}

inline int cmd_sweep(const Scenario& sc, const Options& o, std::ostream& log) {
    if (sc.sweep_parameter.empty()) throw Error(ErrorCode::BadScenario, "sweep.parameter is not set");
    std::filesystem::create_directories(o.out);
    std::size_t n = static_cast<std::size_t>(sc.sweep_count);
    std::vector<SweepRow> rows(n);
    parallel_for(n, o.threads, [&](std::size_t i) {
        double v = n == 1 ? sc.sweep_min : sc.sweep_min + (sc.sweep_max - sc.sweep_min) * static_cast<double>(i) / (n - 1);
        try {
            rows[i] = sweep_row(sc, v);
        } catch (const Error& e) {
            double nan = std::numeric_limits<double>::quiet_NaN();
            rows[i] = {v, nan, nan, nan, nan, static_cast<int>(e.code())};
        }
    });
    report::Table t;
    t.meta = metadata(sc, "analytic sweep");
    t.meta.push_back("status: 0 = ok, otherwise the numeric error code");
    t.header = {sc.sweep_parameter, "J_max", "z_opt", "epsilon", "W", "status"};
    for (const auto& r : rows) t.rows.push_back({r.value, r.J_max, r.z_opt, r.epsilon, r.W, static_cast<double>(r.status)});
    auto path = (std::filesystem::path(o.out) / (sc.prefix + "_sweep.csv")).string();
    report::write_csv(path, t);
    if (sc.format == "svg" || sc.format == "both") {
        std::vector<double> x, eps;
        for (const auto& r : rows) x.push_back(r.value), eps.push_back(r.epsilon);
        report::write_svg((std::filesystem::path(o.out) / (sc.prefix + "_sweep.svg")).string(), "conversion efficiency",
                          sc.sweep_parameter, x, {{"epsilon", eps}});
    }
    log << "wrote " << path << " (" << n << " rows)\n";
    return Ok;
}

struct CompareLine {
    std::string name;
    double max = 0, mean = 0, tolerance = 0;
    bool breach() const { return !(max <= tolerance); }
};

inline CompareLine deviation(const std::string& name, const Grid2& a, const Grid2& b, double scale, double tol,
                             std::size_t skip_z = 0) {
    CompareLine c{name, 0, 0, tol};
    std::size_t n = 0;
    for (std::size_t it = 0; it < a.tau.size(); ++it)
        for (std::size_t iz = skip_z; iz < a.z.size(); ++iz) {
            double d = std::abs(a.J[it][iz] - b.J[it][iz]) / scale;
            if (std::isnan(d)) d = std::numeric_limits<double>::infinity();
            c.max = std::max(c.max, d);
            c.mean += d;
            ++n;
        }
    if (n) c.mean /= static_cast<double>(n);
    return c;
}

inline std::vector<CompareLine> compare(const Scenario& sc, int threads) {
    std::vector<CompareLine> lines;
    double scale = sc.eta_scale();
    auto an = run_analytic(sc, threads);
    auto ca = run_canonical(sc, threads);
    lines.push_back(deviation("analytic_vs_canonical", an, ca, scale, sc.tol_canonical));
    // energy drift normalized by (N/2) times the largest entrance Rabi frequency
    {
        CompareLine h{"canonical_hamiltonian_drift", 0, 0, sc.tol_hamiltonian};
        std::size_t n = 0;
        for (std::size_t it = 0; it < ca.tau.size(); ++it) {
            auto b = sc.boundary.at(ca.tau[it]);
            double W = std::sqrt(std::max({sc.medium.mu1 * b.eta10, sc.medium.mu2 * b.eta20, sc.medium.mu3 * b.eta30}));
            double norm = 0.5 * sc.medium.N * std::max(W, 1e-300);
            for (double v : ca.H[it]) {
                double d = std::abs(v - ca.H[it][0]) / norm;
                h.max = std::max(h.max, d);
                h.mean += d;
                ++n;
            }
        }
        if (n) h.mean /= static_cast<double>(n);
        lines.push_back(h);
    }
    auto mb = run_mb(sc);
    lines.push_back(deviation("analytic_vs_maxwell_bloch", an, mb, scale, sc.tol_mb));
    if (sc.medium.gamma == 0) {
        CompareLine s{"manley_rowe_sum_drift", 0, 0, sc.tol_manley_rowe};
        CompareLine d{"manley_rowe_difference_drift", 0, 0, sc.tol_manley_rowe};
        std::size_t n = 0;
        for (std::size_t it = 0; it < mb.tau.size(); ++it) {
            double s0 = mb.eta1[it][0] + mb.eta3[it][0], d0 = mb.eta1[it][0] - mb.eta2[it][0];
            double ref = std::max(mb.eta1[it][0] + mb.eta2[it][0] + mb.eta3[it][0], 1e-300);
            if (ref < 1e-6 * scale) continue;  // nothing propagates in this slice
            for (std::size_t iz = 0; iz < mb.z.size(); ++iz) {
                double ds = std::abs(mb.eta1[it][iz] + mb.eta3[it][iz] - s0) / ref;
                double dd = std::abs(mb.eta1[it][iz] - mb.eta2[it][iz] - d0) / ref;
                s.max = std::max(s.max, ds), s.mean += ds;
                d.max = std::max(d.max, dd), d.mean += dd;
                ++n;
            }
        }
        if (n) s.mean /= static_cast<double>(n), d.mean /= static_cast<double>(n);
        lines.push_back(s);
        lines.push_back(d);
    }
    return lines;
}

inline int cmd_compare(const Scenario& sc, const Options& o, std::ostream& out) {
    auto lines = compare(sc, o.threads);
    bool breach = false;
    std::ostringstream rep;
    rep << "scenario_hash = " << scenario_hash(sc) << "\n";
    for (const auto& l : lines) {
        rep << l.name << ".max = " << report::num(l.max) << "\n";
        rep << l.name << ".mean = " << report::num(l.mean) << "\n";
        rep << l.name << ".tolerance = " << report::num(l.tolerance) << "\n";
        rep << l.name << ".status = " << (l.breach() ? "breach" : "ok") << "\n";
        breach = breach || l.breach();
    }
    rep << "status = " << (breach ? "breach" : "ok") << "\n";
    out << rep.str();
    std::filesystem::create_directories(o.out);
    std::ofstream f(std::filesystem::path(o.out) / (sc.prefix + "_compare.txt"));
    f << rep.str();
    return breach ? ToleranceBreach : Ok;
}

inline int cmd_validate(const Scenario& sc, std::ostream& out) {
    auto c = validate(sc.medium, sc.boundary);
    for (const auto& w : c.warnings) out << "warning: " << w << "\n";
    if (sc.regime != "general") {
        auto r = *regime_from_string(sc.regime);
        auto spec = regime_parameters(r, sc.medium, sc.boundary);
        for (const auto& w : spec.warnings) out << "warning: " << w << "\n";
    }
    out << "ok " << scenario_hash(sc) << "\n";
    return Ok;
}

inline int run(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        Scenario sc = load_scenario(o.scenario);
        if (o.solver) set_key(sc, "solver", *o.solver);
        if (o.format) set_key(sc, "output.format", *o.format);
        if (o.seed_eps) sc.seed_eps = *o.seed_eps;
        check_scenario(sc);
        validate(sc.medium, sc.boundary);
        if (o.command == "solve") return cmd_solve(sc, o, out);
        if (o.command == "sweep") return cmd_sweep(sc, o, out);
        if (o.command == "compare") return cmd_compare(sc, o, out);
        if (o.command == "validate") return cmd_validate(sc, out);
        err << "unknown command '" << o.command << "'\n";
        return Validation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return SolverFailure;
    }
}

}  // namespace twm::cli
