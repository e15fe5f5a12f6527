#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "twm/hamiltonian.hpp"
#include "twm/model.hpp"
#include "twm/specfun.hpp"

namespace twm {

enum class Regime { EitUndepleted, EitDepleted, MaxCohUndepleted, MaxCohDepleted, Conventional };

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::EitUndepleted: return "eit-undepleted";
    case Regime::EitDepleted: return "eit-depleted";
    case Regime::MaxCohUndepleted: return "maxcoh-undepleted";
    case Regime::MaxCohDepleted: return "maxcoh-depleted";
    case Regime::Conventional: return "conventional";
    }
    return "?";
}

inline std::optional<Regime> regime_from_string(const std::string& s) {
    for (auto r : {Regime::EitUndepleted, Regime::EitDepleted, Regime::MaxCohUndepleted, Regime::MaxCohDepleted,
                   Regime::Conventional})
        if (s == to_string(r)) return r;
    return std::nullopt;
}

struct RegimeSpec {
    Regime tag = Regime::EitUndepleted;
    double N = 1.0;
    double kappa = 0;
    double Gamma = 0;
    double delta_k_prime = 0;
    double zeta = 0;
    std::vector<std::string> warnings;
};

// Lower-state amplitudes for the coherence regimes (caller supplied).
struct Coherence {
    double c1sq = 0.5, c2sq = 0.5;
    double rho12() const { return std::sqrt(c1sq * c2sq); }
};

inline double zeta_of(const MediumParams& p) {
    if (!(p.mu2 < p.mu3)) throw Error(ErrorCode::MuOrdering, "zeta needs mu2 < mu3");
    return std::sqrt(p.mu3 / (p.mu3 - p.mu2));
}

inline RegimeSpec regime_parameters(Regime tag, const MediumParams& p, const BoundaryFields& b,
                                    Coherence coh = {}) {
    RegimeSpec s;
    s.tag = tag;
    s.N = p.N;
    double W1 = std::sqrt(p.mu1 * b.eta10), W2 = std::sqrt(p.mu2 * b.eta20), W3 = std::sqrt(p.mu3 * b.eta30);
    double Wmax = std::max({W1, W2, W3});
    switch (tag) {
    case Regime::EitUndepleted:
    case Regime::EitDepleted: {
        s.kappa = 0.5 * p.N * std::sqrt(p.mu1 * p.mu3) / W2;
        s.Gamma = p.gamma / W2 * std::sqrt(p.mu1 / p.mu3);
        s.delta_k_prime = p.delta_k - 0.5 * p.N * p.mu3 * p.delta2 / (W2 * W2);
        if (!(W2 > 10 * std::max({W1, W3, p.gamma, std::abs(p.delta2)})) && tag == Regime::EitUndepleted)
            s.warnings.push_back("EIT validity: |Omega2| should dominate Omega1, Omega3, gamma and |delta2|");
        if (tag == Regime::EitDepleted && std::abs(b.eta10 - b.eta20) > 1e-9 * std::max(b.eta10, b.eta20))
            s.warnings.push_back("depleted EIT formulas assume eta10 = eta20");
        break;
    }
    case Regime::MaxCohUndepleted: {
        double rho = coh.rho12();
        s.kappa = 0.5 * p.N * std::sqrt(p.mu2 * p.mu3) / std::abs(p.delta3) * rho;
        s.Gamma = p.gamma / std::abs(p.delta3) * (p.mu2 * coh.c2sq + p.mu3 * coh.c1sq) / (rho * std::sqrt(p.mu2 * p.mu3));
        s.delta_k_prime = p.delta_k + 0.5 * p.N * (p.mu3 * coh.c1sq - p.mu2 * coh.c2sq) / p.delta3;
        if (!(std::abs(cplx(p.delta3, p.gamma)) > 10 * Wmax))
            s.warnings.push_back("max-coherence validity: |delta3 + i gamma| should dominate the Rabi frequencies");
        break;
    }
    case Regime::MaxCohDepleted: {
        double zeta = zeta_of(p);
        s.zeta = zeta;
        double c1sq = 1.0 / (1.0 + zeta * zeta), c2sq = zeta * zeta / (1.0 + zeta * zeta);
        double km = 0.25 * p.N * std::sqrt(p.mu2 * p.mu3) / std::abs(p.delta3);
        s.kappa = km * 2.0 / zeta;
        double rho = std::sqrt(c1sq * c2sq);
        s.Gamma = p.gamma / std::abs(p.delta3) * (p.mu2 * c2sq + p.mu3 * c1sq) / (rho * std::sqrt(p.mu2 * p.mu3));
        s.delta_k_prime = p.delta_k + 0.5 * p.N * (p.mu3 * c1sq - p.mu2 * c2sq) / p.delta3;
        if (!(std::abs(cplx(p.delta3, p.gamma)) > 10 * Wmax))
            s.warnings.push_back("max-coherence validity: |delta3 + i gamma| should dominate the Rabi frequencies");
        break;
    }
    case Regime::Conventional: {
        s.kappa = 0.5 * p.N * W2 * std::sqrt(p.mu1 * p.mu3) / std::abs(p.delta2 * p.delta3);
        s.Gamma = p.gamma / std::abs(p.delta3) * std::sqrt(p.mu1 / p.mu3) * std::abs(p.delta2) / W2;
        s.delta_k_prime = p.delta_k + 0.5 * p.N * (p.mu3 / p.delta3 - p.mu1 / p.delta2);
        if (!(std::min(std::abs(p.delta2), std::abs(p.delta3)) > 10 * std::max(Wmax, p.gamma)))
            s.warnings.push_back("conventional validity: |delta2|, |delta3| should dominate the Rabi frequencies and gamma");
        break;
    }
    }
    return s;
}

// Undepleted-pump solution with loss and mismatch.
inline double linear_solution(const RegimeSpec& s, double eta_in, double z) {
    double x = s.delta_k_prime / (2.0 * s.kappa);
    double f = std::sqrt(1.0 + x * x);
    double sn = std::sin(s.kappa * z * f);
    return eta_in / (1.0 + x * x) * std::exp(-s.Gamma * s.kappa * z) * sn * sn;
}

// N z at the first conversion maximum (matched case).
inline double optimal_length(const RegimeSpec& s) { return s.N * std::numbers::pi / (2.0 * s.kappa); }

inline double optimal_length_closed_form(Regime tag, const MediumParams& p, const BoundaryFields& b, double rho12 = 0.5) {
    double W2 = std::sqrt(p.mu2 * b.eta20);
    switch (tag) {
    case Regime::EitUndepleted:
    case Regime::EitDepleted: return std::numbers::pi * W2 / std::sqrt(p.mu1 * p.mu3);
    case Regime::MaxCohUndepleted:
    case Regime::MaxCohDepleted: return std::numbers::pi * std::abs(p.delta3) / (rho12 * std::sqrt(p.mu2 * p.mu3));
    case Regime::Conventional: return std::numbers::pi * std::abs(p.delta2 * p.delta3) / (std::sqrt(p.mu1 * p.mu3) * W2);
    }
    return 0;
}

namespace detail {
// solves y + m tanh(y) = u for y >= 0 (monotone when m > -1)
inline double solve_arth_relation(double u, double m) {
    if (u <= 0) return 0.0;
    // f(y) = y + m tanh y - u is increasing; bracket the root
    double lo = m >= 0 ? std::max(0.0, u - m) : u;
    double hi = m >= 0 ? u : u / (1.0 + m);
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double t = std::tanh(y);
        double f = y + m * t - u;
        if (f > 0) hi = y;
        else lo = y;
        double d = 1.0 + m * (1.0 - t * t);
        double ny = y - f / d;
        if (!(ny > lo && ny < hi)) ny = 0.5 * (lo + hi);
        if (std::abs(ny - y) <= 4e-16 * std::max(1.0, y)) return ny;
        y = ny;
    }
    return y;
}
}  // namespace detail

inline double kappa_e(const MediumParams& p, double eta20) {
    return 0.5 * p.N * std::sqrt(p.mu1 * p.mu3 / (p.mu2 * eta20));
}

// Equal inputs, exact matching:
// (mu2/mu3) kappa_e z = Arth(sqrt(J/eta0)) + ((mu1+mu2-mu3)/mu3) sqrt(J/eta0)
inline double eit_depleted(double z, const MediumParams& p, double eta0) {
    if (!(eta0 > 0)) throw Error(ErrorCode::DomainError, "eta0 must be positive");
    double m = (p.mu1 + p.mu2 - p.mu3) / p.mu3;
    if (!(m > -1.0)) throw Error(ErrorCode::NonMonotoneRelation, "Arth relation is not monotone for these couplings");
    double u = p.mu2 / p.mu3 * kappa_e(p, eta0) * z;
    double y = detail::solve_arth_relation(u, m);
    double t = std::tanh(y);
    return eta0 * t * t;
}

struct MismatchedEit {
    double J = 0;
    double amplitude = 0;        // J1 ~ eta0 (1 - x)
    double modulus = 0;          // sqrt(J1/J2)
    double period = 0;           // 2 K(p) / (kappa_e sqrt(1 + x))
    double period_estimate = 0;  // ln(16 kappa_e / dk') / kappa_e
};

inline MismatchedEit eit_mismatch(double z, const MediumParams& p, double eta0, double dk_prime) {
    double ke = kappa_e(p, eta0);
    double x = std::abs(dk_prime) / (2.0 * ke);
    if (!(x < 1.0)) throw Error(ErrorCode::DomainError, "|dk'/2 kappa_e| must be < 1");
    MismatchedEit r;
    r.amplitude = eta0 * (1.0 - x);
    r.modulus = std::sqrt((1.0 - x) / (1.0 + x));
    double arg = ke * z * std::sqrt(1.0 + x);
    double sn = jacobi_sn(arg, r.modulus);
    r.J = r.amplitude * sn * sn;
    if (x > 0) {
        r.period = 2.0 * ellip_k(r.modulus) / (ke * std::sqrt(1.0 + x));
        r.period_estimate = std::log(16.0 * ke / std::abs(dk_prime)) / ke;
    } else {
        r.period = r.period_estimate = std::numeric_limits<double>::infinity();
    }
    return r;
}

inline double maxcoh_dk_prime(const MediumParams& p, const BoundaryFields& b) {
    return p.delta_k - 0.25 * p.N * (std::sqrt(p.mu1 / b.eta10) + (p.mu2 - p.mu3) / p.delta3);
}

inline double maxcoh_undepleted(double z, const MediumParams& p, const BoundaryFields& b,
                                std::vector<std::string>* warnings = nullptr) {
    if (warnings && b.eta20 > 0.1 * b.eta10) warnings->push_back("max-coherence undepleted formula assumes eta20 << eta10");
    RegimeSpec s;
    s.N = p.N;
    s.kappa = 0.25 * p.N * std::sqrt(p.mu2 * p.mu3) / std::abs(p.delta3);
    s.delta_k_prime = maxcoh_dk_prime(p, b);
    return linear_solution(s, b.eta20, z);
}

// detuning delta3 that satisfies mu3 eta0 = mu1 delta3^2 / (mu3 - mu2), positive branch
inline double maxcoh_matched_delta3(const MediumParams& p, double eta0) {
    if (!(p.mu2 < p.mu3)) throw Error(ErrorCode::NoSolution, "condition needs mu2 < mu3");
    return std::sqrt(p.mu3 * eta0 * (p.mu3 - p.mu2) / p.mu1);
}

// Large-delta3 coefficient set around a given lambda.
inline MismatchCoefficients maxcoh_coefficients(const MediumParams& p, const BoundaryFields& b, double l) {
    MismatchCoefficients c;
    double q = p.q();
    c.q = q;
    c.A1 = q * ((2 * l + p.delta2) * p.delta3 - p.mu1 * b.eta10 - p.mu2 * b.eta20) + p.mu1 * p.delta3 + p.mu2 * l -
           p.mu3 * (l + p.delta2);
    c.a0 = (2 * l + p.delta2) * p.delta3 - p.mu1 * b.eta10 - p.mu2 * b.eta20;
    c.a1 = 2 * q * p.delta3 + (p.mu1 + p.mu2 - p.mu3);
    c.A2 = c.A3 = c.a2 = 0;
    return c;
}

inline double maxcoh_lambda(const MediumParams& p, double eta0) { return std::sqrt(p.mu1 * eta0) * zeta_of(p); }

inline AtomicState maxcoh_entrance_state(const MediumParams& p, double eta10, double l) {
    double W1 = std::sqrt(p.mu1 * eta10);
    double n = std::sqrt(l * l + W1 * W1);
    return {W1 / n, -l / n, 0.0};
}

namespace detail {
inline void check_maxcoh_depleted(const MediumParams& p, double eta0) {
    if (!(p.mu2 < p.mu3)) throw Error(ErrorCode::MuOrdering, "mu2 must be below mu3");
    double lhs = p.mu3 * eta0, rhs = p.mu1 * p.delta3 * p.delta3 / (p.mu3 - p.mu2);
    double res = (lhs - rhs) / lhs;
    if (std::abs(res) > 1e-9)
        throw Error(ErrorCode::ConditionViolated, "mu3 eta0 = mu1 delta3^2/(mu3-mu2) violated, relative residual " + std::to_string(res));
    if (p.delta2 != 0.0 || p.delta_k != 0.0) throw Error(ErrorCode::ConditionViolated, "requires delta2 = 0 and dk = 0");
}
}  // namespace detail

// kappa_m (2/zeta) z = Arth(sqrt(J/eta0)) - ((mu1+mu2-mu3)/mu3) sqrt(J/eta0)
inline double maxcoh_depleted(double z, const MediumParams& p, double eta0) {
    detail::check_maxcoh_depleted(p, eta0);
    double m = -(p.mu1 + p.mu2 - p.mu3) / p.mu3;
    if (!(m > -1.0)) throw Error(ErrorCode::NonMonotoneRelation, "Arth relation is not monotone for these couplings");
    double zeta = zeta_of(p);
    double km = 0.25 * p.N * std::sqrt(p.mu2 * p.mu3) / p.delta3;
    double y = detail::solve_arth_relation(km * 2.0 / zeta * z, m);
    double t = std::tanh(y);
    return eta0 * t * t;
}

// The elliptic solution fed with the regime's own lambda and coefficients.
inline AdiabaticSolution maxcoh_depleted_solution(const MediumParams& p, double eta0) {
    detail::check_maxcoh_depleted(p, eta0);
    BoundaryFields b;
    b.eta10 = b.eta20 = eta0;
    double l = maxcoh_lambda(p, eta0);
    return solution_from_coefficients(p, b, l, maxcoh_coefficients(p, b, l));
}

inline double conventional_A1(const MediumParams& p) {
    return p.q() * p.delta2 * p.delta3 + p.mu1 * p.delta3 - p.mu3 * p.delta2;
}

struct ConventionalSolution {
    double J1 = 0, J2 = 0, kappa = 0, p = 0;
};

inline ConventionalSolution conventional_parameters(const MediumParams& p, const BoundaryFields& b) {
    MismatchCoefficients c;
    c.A1 = conventional_A1(p);
    auto r = oscillation_roots(p, c, b);
    ConventionalSolution s;
    s.J1 = r.J1;
    s.J2 = r.J2;
    s.kappa = 0.5 * p.N * std::sqrt(p.mu1 * p.mu2 * p.mu3 * r.J2) / std::abs(p.delta2 * p.delta3);
    s.p = r.J2 > 0 ? std::min(1.0, std::sqrt(r.J1 / r.J2)) : 0.0;
    return s;
}

inline double conventional(double z, const MediumParams& p, const BoundaryFields& b,
                           std::vector<std::string>* warnings = nullptr) {
    double Wmax = std::sqrt(std::max({p.mu1 * b.eta10, p.mu2 * b.eta20, p.mu3 * b.eta30}));
    if (warnings && !(std::min(std::abs(p.delta2), std::abs(p.delta3)) > 10 * Wmax))
        warnings->push_back("conventional formula assumes |delta2|, |delta3| >> Rabi frequencies");
    auto s = conventional_parameters(p, b);
    double sn = jacobi_sn(s.kappa * z, s.p);
    return s.J1 * sn * sn;
}

// eta0 tanh^2(kappa_n z) and the textbook sinc^2 law
inline double conventional_tanh2(double z, const MediumParams& p, double eta0) {
    double k = 0.5 * p.N * std::sqrt(p.mu1 * p.mu2 * p.mu3 * eta0) / std::abs(p.delta2 * p.delta3);
    double t = std::tanh(k * z);
    return eta0 * t * t;
}

inline double conventional_sinc2(double z, const MediumParams& p, const BoundaryFields& b) {
    double dk = p.delta_k - p.N * p.mu1 / (2 * p.delta2) + p.N * p.mu3 / (2 * p.delta3);
    double h = dk / 2;
    double s = std::sin(h * z);
    return p.N * p.N * p.mu1 * p.mu2 * p.mu3 * b.eta10 * b.eta20 / (4 * p.delta2 * p.delta2 * p.delta3 * p.delta3) *
           s * s / (h * h);
}

struct Tuning {
    std::string parameter;  // which knob was set
    double value = 0;
    double residual = 0;    // mismatch measure at the tuned point
    double untuned = 0;     // same measure at the caller's parameters
    MediumParams tuned;
};

inline Tuning compensation_tuning(Regime tag, const MediumParams& p, const BoundaryFields& b) {
    Tuning t;
    t.tuned = p;
    switch (tag) {
    case Regime::EitUndepleted:
    case Regime::EitDepleted: {
        auto a1e = [&](const MediumParams& m) { return -m.q() * m.mu2 * b.eta20 - m.mu3 * m.delta2; };
        t.parameter = "delta2";
        t.value = 2.0 / p.N * p.mu2 * b.eta20 / p.mu3 * p.delta_k;
        t.tuned.delta2 = t.value;
        t.untuned = a1e(p);
        t.residual = a1e(t.tuned);
        break;
    }
    case Regime::Conventional: {
        if (p.delta2 == 0 || p.delta3 == 0) throw Error(ErrorCode::NoSolution, "conventional tuning needs nonzero detunings");
        t.parameter = "delta_k";
        double q = p.mu3 / p.delta3 - p.mu1 / p.delta2;
        t.value = -0.5 * p.N * q;
        t.tuned.delta_k = t.value;
        t.untuned = conventional_A1(p);
        t.residual = conventional_A1(t.tuned);
        break;
    }
    case Regime::MaxCohUndepleted: {
        double den = p.delta_k - 0.25 * p.N * std::sqrt(p.mu1 / b.eta10);
        if (den == 0 || p.mu2 == p.mu3) throw Error(ErrorCode::NoSolution, "no delta3 cancels the mismatch");
        t.parameter = "delta3";
        t.value = 0.25 * p.N * (p.mu2 - p.mu3) / den;
        t.tuned.delta3 = t.value;
        t.untuned = p.delta3 != 0 ? maxcoh_dk_prime(p, b) : std::numeric_limits<double>::infinity();
        t.residual = maxcoh_dk_prime(t.tuned, b);
        break;
    }
    case Regime::MaxCohDepleted: {
        if (!(p.mu2 < p.mu3)) throw Error(ErrorCode::NoSolution, "condition needs mu2 < mu3");
        double eta0 = b.eta10;
        t.parameter = "delta3";
        t.value = maxcoh_matched_delta3(p, eta0);
        t.tuned.delta3 = t.value;
        t.tuned.delta2 = 0;
        t.untuned = maxcoh_coefficients(p, b, maxcoh_lambda(p, eta0)).A1;
        t.residual = maxcoh_coefficients(t.tuned, b, maxcoh_lambda(p, eta0)).A1;
        break;
    }
    }
    return t;
}

inline double fractional_efficiency(double J_max, double eta10, double eta20) {
    if (J_max < 0) throw Error(ErrorCode::DomainError, "J_max must be non-negative");
    double m = std::min(eta10, eta20);
    if (eta10 == 0 && eta20 == 0) throw Error(ErrorCode::DivisionByZero, "both entrance fluxes vanish");
    if (m == 0) return 0.0;
    return J_max / m;
}

struct FluxSeries {
    std::vector<double> tau, eta1, eta2, eta3;
};

// W = int w3 eta3(z) / int (w1 eta10 + w2 eta20) with trapezoidal quadrature
inline double total_efficiency(const FluxSeries& at_z, const FluxSeries& entrance, double w1, double w2, double w3) {
    auto n = at_z.tau.size();
    if (n < 2 || entrance.tau.size() != n || at_z.eta3.size() != n || entrance.eta1.size() != n ||
        entrance.eta2.size() != n)
        throw Error(ErrorCode::GridMismatch, "series must share one time grid with >= 2 samples");
    for (std::size_t i = 0; i < n; ++i)
        if (at_z.tau[i] != entrance.tau[i]) throw Error(ErrorCode::GridMismatch, "time grids differ");
    if (std::abs(w3 - (w1 + w2)) > 1e-12 * std::abs(w3)) throw Error(ErrorCode::ResonanceViolation, "w3 != w1 + w2");
    double num = 0, den = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = at_z.tau[i + 1] - at_z.tau[i];
        num += 0.5 * h * w3 * (at_z.eta3[i] + at_z.eta3[i + 1]);
        den += 0.5 * h * (w1 * (entrance.eta1[i] + entrance.eta1[i + 1]) + w2 * (entrance.eta2[i] + entrance.eta2[i + 1]));
    }
    if (den == 0) throw Error(ErrorCode::DivisionByZero, "no input energy");
    return num / den;
}

// photons converted per atom
inline double figure_of_merit(Regime tag, double tau, double W10, double W20, double delta2, double delta3) {
    switch (tag) {
    case Regime::EitUndepleted:
    case Regime::EitDepleted: return tau * W10;
    case Regime::MaxCohUndepleted:
    case Regime::MaxCohDepleted: return tau * W20 * (W20 / std::abs(delta3));
    case Regime::Conventional: return tau * W20 * (W10 * W20 / std::abs(delta3 * delta2));
    }
    return 0;
}

struct ValidityReport {
    double tau0 = std::numeric_limits<double>::infinity();
    double ratio = 0;    // tau / tau0
    double min_gap = 0;  // smallest eigenvalue separation from the tracked branch
    double gap_tau = 0;
};

inline ValidityReport adiabatic_validity(Regime tag, const MediumParams& p, const BoundaryFields& b, double tau,
                                         const Trajectory* along = nullptr, double lambda = std::nan("")) {
    ValidityReport v;
    double W10 = std::sqrt(p.mu1 * b.eta10), W20 = std::sqrt(p.mu2 * b.eta20);
    if (std::isnan(lambda)) lambda = entrance_eigenvalue(p, b);
    if (p.gamma > 0) {
        switch (tag) {
        case Regime::EitUndepleted:
        case Regime::EitDepleted: v.tau0 = (W20 * W20) / (W10 * W10) / p.gamma; break;
        case Regime::MaxCohUndepleted:
        case Regime::MaxCohDepleted: v.tau0 = p.delta3 * p.delta3 / (W20 * W20) / p.gamma; break;
        case Regime::Conventional: {
            auto st = atomic_state(W10, W20, std::sqrt(p.mu3 * b.eta30), b.phi0 + p.theta, p.delta2, p.delta3, lambda);
            double c3 = std::norm(st.c3);
            v.tau0 = c3 > 0 ? 1.0 / (p.gamma * c3) : std::numeric_limits<double>::infinity();
            break;
        }
        }
    }
    v.ratio = std::isinf(v.tau0) ? 0.0 : tau / v.tau0;
    auto gap_at = [&](double W1, double W2, double W3, double phi, double l0) {
        auto r = solve_cubic_real(characteristic(W1, W2, W3, phi, p.delta2, p.delta3));
        double g = std::numeric_limits<double>::infinity();
        std::size_t self = 0;
        for (std::size_t i = 1; i < r.size(); ++i)
            if (std::abs(r[i] - l0) < std::abs(r[self] - l0)) self = i;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (i != self) g = std::min(g, std::abs(r[i] - r[self]));
        return g;
    };
    v.min_gap = gap_at(W10, W20, std::sqrt(p.mu3 * b.eta30), b.phi0 + p.theta, lambda);
    if (along) {
        for (const auto& pt : *along) {
            double l0 = lambda + p.q() * pt.J;
            v.min_gap = std::min(v.min_gap, gap_at(std::sqrt(p.mu1 * std::max(0.0, pt.eta1)),
                                                   std::sqrt(p.mu2 * std::max(0.0, pt.eta2)),
                                                   std::sqrt(p.mu3 * std::max(0.0, pt.eta3)), pt.phi, l0));
        }
    }
    v.gap_tau = v.min_gap * tau;
    return v;
}

}  // namespace twm
