#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "twm/model.hpp"
#include "twm/specfun.hpp"

namespace twm {

using cplx = std::complex<double>;
using Matrix3 = std::array<std::array<cplx, 3>, 3>;

struct MismatchCoefficients {
    double A1 = 0, A2 = 0, A3 = 0;
    double a0 = 0, a1 = 0, a2 = 0;
    double q = 0;
};

struct AtomicState {
    cplx c1, c2, c3;
    double norm2() const { return std::norm(c1) + std::norm(c2) + std::norm(c3); }
};

struct ExchangeState {
    double J = 0;
    double phi = 0;
    double z = 0;
};

struct Fluxes {
    double eta1 = 0, eta2 = 0, eta3 = 0;
};

// Interaction Hamiltonian (units of hbar) for real Rabi frequencies with the
// loop phase on the 2-3 coupling. Its eigenvalues are the lambda_0 of the
// characteristic equation  l(l+d2)(l+d3) - (W1^2+W2^2+W3^2) l - W1^2 d3 - W3^2 d2 = -2 W1 W2 W3 cos(phi).
inline Matrix3 hamiltonian_matrix(double W1, double W2, double W3, double phi, double d2, double d3) {
    cplx e = std::polar(1.0, phi);
    return {{{cplx(0), cplx(-W1), cplx(-W3)},
             {cplx(-W1), cplx(-d2), -W2 * e},
             {cplx(-W3), -W2 * std::conj(e), cplx(-d3)}}};
}

inline CubicCoeffs characteristic(double W1, double W2, double W3, double phi, double d2, double d3) {
    double S = W1 * W1 + W2 * W2 + W3 * W3;
    return {1.0, d2 + d3, d2 * d3 - S, -W1 * W1 * d3 - W3 * W3 * d2 + 2.0 * W1 * W2 * W3 * std::cos(phi)};
}

namespace detail {

inline double matrix_norm(const Matrix3& H) {
    double s = 0;
    for (auto& row : H)
        for (auto& v : row) s += std::norm(v);
    return std::sqrt(s);
}

// null vector of (H - l) from the best-conditioned pair of rows
inline std::array<cplx, 3> null_vector(const Matrix3& H, double l) {
    Matrix3 A = H;
    for (int i = 0; i < 3; ++i) A[i][i] -= l;
    auto cross = [](const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) {
        return std::array<cplx, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    };
    std::array<cplx, 3> best{};
    double bn = -1;
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
        auto v = cross(A[i], A[j]);
        double n = std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
        if (n > bn) {
            bn = n;
            best = v;
        }
    }
    return best;
}

}  // namespace detail

inline AtomicState atomic_state(double W1, double W2, double W3, double phi, double d2, double d3,
                                double lambda_branch) {
    Matrix3 H = hamiltonian_matrix(W1, W2, W3, phi, d2, d3);
    auto roots = solve_cubic_real(characteristic(W1, W2, W3, phi, d2, d3));
    double scale = std::max(1.0, detail::matrix_norm(H));
    // the tracked eigenvalue must be isolated
    int near = 0;
    for (double r : roots)
        if (std::abs(r - lambda_branch) < 1e-10 * scale) ++near;
    if (near > 1) throw Error(ErrorCode::BranchAmbiguity, "degenerate eigenvalue at the tracked branch");

    std::array<cplx, 3> v;
    bool all_zero = (W1 == 0 && W2 == 0 && W3 == 0);
    if (all_zero) {
        // diagonal: pick the bare state whose energy is closest
        double e[3] = {0.0, -d2, -d3};
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(e[i] - lambda_branch) < std::abs(e[k] - lambda_branch)) k = i;
        v = {cplx(0), cplx(0), cplx(0)};
        v[k] = 1.0;
    } else {
        v = detail::null_vector(H, lambda_branch);
    }
    double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    if (!(n > 0)) throw Error(ErrorCode::BranchAmbiguity, "eigenvector undetermined");
    int ref = std::abs(v[0]) > 1e-300 ? 0 : (std::abs(v[1]) > 1e-300 ? 1 : 2);
    cplx ph = std::abs(v[ref]) / v[ref];
    for (auto& c : v) c = c * ph / n;
    return {v[0], v[1], v[2]};
}

struct EntranceOptions {
    // extra delta2 applied along the field homotopy (delta2 + (1-s) prep);
    // models adiabatic preparation of the lower-state superposition
    double prep_detuning = 0.0;
    int min_steps = 20;
    double start_scale = 1e-4;
};

// Energy of the adiabatic state at z = 0, continued from the field-free limit.
inline double entrance_eigenvalue(const MediumParams& p, const BoundaryFields& b, const EntranceOptions& opt = {}) {
    double W1 = std::sqrt(p.mu1 * b.eta10), W2 = std::sqrt(p.mu2 * b.eta20), W3 = std::sqrt(p.mu3 * b.eta30);
    double phi = b.phi0 + p.theta;
    double ref = std::max({W1, W2, W3, std::abs(p.delta2), std::abs(p.delta3), std::abs(opt.prep_detuning), 1e-300});

    auto roots_at = [&](double s) {
        double d2 = p.delta2 + (1.0 - s) * opt.prep_detuning;
        return solve_cubic_real(characteristic(s * W1, s * W2, s * W3, phi, d2, p.delta3));
    };
    auto check_distinct = [&](const std::vector<double>& r, double l) {
        int near = 0;
        for (double x : r)
            if (std::abs(x - l) <= 1e-10 * ref) ++near;
        if (near > 1) throw Error(ErrorCode::BranchAmbiguity, "entrance eigenvalue is degenerate");
    };

    if (W1 == 0 && W2 == 0 && W3 == 0) return 0.0;

    double s = opt.start_scale;
    auto r = roots_at(s);
    // the branch that contains the bare ground state
    double lam = 0, best = -1, second = -1;
    for (double x : r) {
        double d2 = p.delta2 + (1.0 - s) * opt.prep_detuning;
        auto st = atomic_state(s * W1, s * W2, s * W3, phi, d2, p.delta3, x);
        double w = std::norm(st.c1);
        if (w > best) {
            second = best;
            best = w;
            lam = x;
        } else if (w > second) {
            second = w;
        }
    }
    if (best - second < 1e-6) throw Error(ErrorCode::BranchAmbiguity, "ground state is shared by two branches at weak field");

    int steps = std::max(opt.min_steps, 1);
    double ratio = std::pow(1.0 / s, 1.0 / steps);
    double prev = lam, prev_s = s;
    while (s < 1.0) {
        double next_s = std::min(1.0, s * ratio);
        // subdivide while the nearest root is not clearly separated
        for (;;) {
            auto rr = roots_at(next_s);
            double pred = lam + (lam - prev) * (next_s - s) / std::max(s - prev_s, 1e-300);
            if (s == prev_s) pred = lam;
            std::vector<std::pair<double, double>> d;
            for (double x : rr) d.push_back({std::abs(x - pred), x});
            std::sort(d.begin(), d.end());
            bool clear = d.size() == 1 || d[1].first > 3.0 * d[0].first + 1e-12 * ref;
            if (clear || next_s - s < 1e-9) {
                check_distinct(rr, d[0].second);
                prev = lam;
                prev_s = s;
                lam = d[0].second;
                s = next_s;
                break;
            }
            next_s = s + 0.5 * (next_s - s);
        }
    }
    auto cc = characteristic(W1, W2, W3, phi, p.delta2, p.delta3);
    for (int it = 0; it < 3; ++it) {
        double d = cc.derivative(lam);
        if (d == 0) break;
        lam -= cc(lam) / d;
    }
    check_distinct(roots_at(1.0), lam);
    return lam;
}

// Expansion of G(lambda + qJ, J) = G0 + A1 J + A2 J^2 + A3 J^3 and of dG/dlambda
// along the Manley-Rowe line eta1 = eta10 - J, eta2 = eta20 - J, eta3 = J.
inline MismatchCoefficients mismatch_coefficients(const MediumParams& p, double l, const BoundaryFields& b) {
    if (b.eta30 != 0.0) throw Error(ErrorCode::DomainError, "mismatch coefficients are defined for eta30 = 0");
    MismatchCoefficients c;
    double q = p.q(), d2 = p.delta2, d3 = p.delta3;
    double m = p.mu1 + p.mu2 - p.mu3;
    double S0 = p.mu1 * b.eta10 + p.mu2 * b.eta20;
    c.q = q;
    c.A1 = q * ((l + d2) * (l + d3) + l * (l + d2) + l * (l + d3) - S0) + p.mu1 * (l + d3) + p.mu2 * l -
           p.mu3 * (l + d2);
    c.A2 = q * q * (3.0 * l + d2 + d3) + q * m;
    c.A3 = q * q * q;
    c.a0 = 3.0 * l * l + 2.0 * l * (d2 + d3) + d2 * d3 - S0;
    c.a1 = 2.0 * q * (3.0 * l + d2 + d3) + m;
    c.a2 = 3.0 * q * q;
    return c;
}

// Coefficients (ascending powers of J) of g^2 - G^2; degree 6 at most.
inline std::vector<double> exchange_polynomial(const MediumParams& p, const MismatchCoefficients& c,
                                               const BoundaryFields& b) {
    double k = 4.0 * p.mu1 * p.mu2 * p.mu3;
    std::vector<double> r(7, 0.0);
    // 4 mu J (eta10 - J)(eta20 - J)
    r[1] += k * b.eta10 * b.eta20;
    r[2] += -k * (b.eta10 + b.eta20);
    r[3] += k;
    // (A1 + A2 J + A3 J^2)^2 J^2
    r[2] -= c.A1 * c.A1;
    r[3] -= 2.0 * c.A1 * c.A2;
    r[4] -= c.A2 * c.A2 + 2.0 * c.A1 * c.A3;
    r[5] -= 2.0 * c.A2 * c.A3;
    r[6] -= c.A3 * c.A3;
    return r;
}

inline double horner(const std::vector<double>& c, double x) {
    double v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

struct OscillationRoots {
    double J1 = 0, J2 = 0, B1 = 0;
    std::vector<std::string> warnings;
};

inline OscillationRoots oscillation_roots(const MediumParams& p, const MismatchCoefficients& c, const BoundaryFields& b) {
    OscillationRoots o;
    o.B1 = c.A1 * c.A1 / (4.0 * p.mu1 * p.mu2 * p.mu3);
    double s = b.eta10 + b.eta20 + o.B1;
    double dd = b.eta10 - b.eta20;
    double disc = dd * dd + o.B1 * (2.0 * (b.eta10 + b.eta20) + o.B1);
    if (!(disc >= 0) || !std::isfinite(disc)) throw Error(ErrorCode::NoOscillationRegime, "complex oscillation roots");
    double sq = std::sqrt(disc);
    o.J2 = 0.5 * (s + sq);
    o.J1 = o.J2 > 0 ? b.eta10 * b.eta20 / o.J2 : 0.0;  // product of the roots, no cancellation
    double extra = std::abs(c.A2 * o.J1 + c.A3 * o.J1 * o.J1);
    if (extra > 0.01 * std::abs(c.A1) && extra > 0)
        o.warnings.push_back("A2 J + A3 J^2 is not negligible against A1 (intensity-dependent mismatch ignored)");
    return o;
}

inline double conversion_coefficient(const MediumParams& p, double a0, double J2) {
    if (a0 == 0.0 || !std::isfinite(1.0 / a0)) throw Error(ErrorCode::VanishingA0, "dG/dlambda vanishes at the entrance");
    return 0.5 * p.N * std::sqrt(p.mu1 * p.mu2 * p.mu3 * J2) / std::abs(a0);
}

struct AdiabaticSolution {
    MediumParams params;
    BoundaryFields boundary;
    double lambda = 0;
    MismatchCoefficients coeffs;
    double J1 = 0, J2 = 0, B1 = 0;
    double p = 0;       // elliptic modulus sqrt(J1/J2)
    double r = 0;       // a1 J2 / a0
    double kappa = 0;
    int sign0 = 1;      // sign of sin(phi) while J grows
    double chi0 = 0;
    double z_quarter = std::numeric_limits<double>::infinity();  // z(J1)
    bool monotone = false;
    bool trivial = false;  // one pump is absent
    std::vector<std::string> warnings;

    double period() const { return monotone ? std::numeric_limits<double>::infinity() : 2.0 * z_quarter; }
    double delta_k_prime() const { return -params.N * coeffs.A1 / (2.0 * coeffs.a0); }
};

// Builds the elliptic solution for a given entrance energy and coefficient set.
inline AdiabaticSolution solution_from_coefficients(const MediumParams& p, const BoundaryFields& b, double lambda,
                                                    const MismatchCoefficients& c) {
    AdiabaticSolution s;
    s.params = p;
    s.boundary = b;
    s.lambda = lambda;
    s.coeffs = c;
    auto roots = oscillation_roots(p, c, b);
    s.J1 = roots.J1;
    s.J2 = roots.J2;
    s.B1 = roots.B1;
    s.warnings = roots.warnings;
    if (s.J1 <= 0.0) {
        s.trivial = true;
        s.sign0 = c.a0 > 0 ? -1 : 1;
        s.kappa = s.J2 > 0 && c.a0 != 0 ? conversion_coefficient(p, c.a0, s.J2) : 0.0;
        return s;
    }
    s.kappa = conversion_coefficient(p, c.a0, s.J2);
    s.sign0 = c.a0 > 0 ? -1 : 1;
    if ((c.a0 + c.a1 * s.J1) * c.a0 <= 0.0)
        throw Error(ErrorCode::NonMonotoneRelation, "dG/dlambda changes sign inside [0, J1]");
    s.p = std::min(1.0, std::sqrt(s.J1 / s.J2));
    s.r = c.a1 * s.J2 / c.a0;
    s.monotone = (s.J1 == s.J2);
    if (s.monotone) s.p = 1.0;
    // z(0) = 0 with the F + r(F - E) form; the third-kind form differs only by this constant
    s.chi0 = s.p < 1.0 ? -s.r * (ellip_f(std::numbers::pi / 2, s.p) - (1.0 - s.p * s.p) *
                                     ellip_pi(std::numbers::pi / 2, s.p * s.p, s.p))
                       : 0.0;
    if (!s.monotone) {
        double K = ellip_k(s.p), E = ellip_e_complete(s.p);
        s.z_quarter = (K + s.r * (K - E)) / s.kappa;
    }
    return s;
}

inline AdiabaticSolution solve(const MediumParams& p, const BoundaryFields& b, const EntranceOptions& opt = {}) {
    auto checked = validate(p, b);
    double lambda = entrance_eigenvalue(p, b, opt);
    auto c = mismatch_coefficients(p, lambda, b);
    auto s = solution_from_coefficients(p, b, lambda, c);
    s.warnings.insert(s.warnings.begin(), checked.warnings.begin(), checked.warnings.end());
    return s;
}

// kappa z for 0 <= J <= J1 on the first (rising) quarter
inline double implicit_distance(double J, const AdiabaticSolution& s) {
    if (s.trivial) {
        if (J == 0.0) return 0.0;
        throw Error(ErrorCode::DomainError, "no exchange possible");
    }
    if (!(J >= 0.0 && J <= s.J1 * (1 + 1e-15))) throw Error(ErrorCode::DomainError, "J outside [0, J1]");
    double g = std::asin(std::min(1.0, std::sqrt(J / s.J1)));
    if (s.monotone) {
        if (g >= std::numbers::pi / 2) return std::numeric_limits<double>::infinity();
        double sg = std::sin(g);
        return ((1.0 + s.r) * std::atanh(sg) - s.r * sg) / s.kappa;
    }
    double F = ellip_f(g, s.p), E = ellip_e(g, s.p);
    return (F + s.r * (F - E)) / s.kappa;
}

namespace detail {
inline double invert_quarter(double u, const AdiabaticSolution& s) {
    // solve F(g) + r (F(g) - E(g)) = u on [0, pi/2]
    constexpr double half_pi = std::numbers::pi / 2;
    double top = s.kappa * s.z_quarter;
    if (u <= 0) return 0.0;
    if (u >= top) return half_pi;
    auto f = [&](double g) { return ellip_f(g, s.p) + s.r * (ellip_f(g, s.p) - ellip_e(g, s.p)) - u; };
    std::uintmax_t iters = 200;
    auto res = boost::math::tools::toms748_solve(f, 0.0, half_pi, -u, top - u,
                                                 boost::math::tools::eps_tolerance<double>(52), iters);
    double g = 0.5 * (res.first + res.second);
    // one Newton step on the smooth relation
    double sg = std::sin(g);
    double d = (1.0 + s.r * s.p * s.p * sg * sg) / std::sqrt(1.0 - s.p * s.p * sg * sg);
    double ng = g - f(g) / d;
    if (ng >= 0 && ng <= half_pi && std::abs(f(ng)) <= std::abs(f(g))) g = ng;
    return g;
}
}  // namespace detail

inline double phase_at(double J, bool rising, const AdiabaticSolution& s) {
    const auto& c = s.coeffs;
    const auto& b = s.boundary;
    double Asum = c.A1 + c.A2 * J + c.A3 * J * J;
    double sgn = rising ? s.sign0 : -s.sign0;
    double cosphi;
    double den = 2.0 * std::sqrt(s.params.mu1 * s.params.mu2 * s.params.mu3 * std::max(0.0, b.eta10 - J) *
                                 std::max(0.0, b.eta20 - J));
    if (Asum == 0.0) {
        cosphi = 0.0;
    } else if (den == 0.0) {
        cosphi = Asum > 0 ? -1.0 : 1.0;
    } else {
        // cos(phi) = G/g with g = -2 sqrt(mu1 mu2 mu3 J (eta10-J)(eta20-J))
        cosphi = -Asum * std::sqrt(J) / den;
    }
    cosphi = std::clamp(cosphi, -1.0, 1.0);
    return sgn * std::acos(cosphi);
}

inline ExchangeState exchange_at(double z, const AdiabaticSolution& s) {
    if (!(z >= 0.0)) throw Error(ErrorCode::DomainError, "z must be non-negative");
    ExchangeState out;
    out.z = z;
    if (s.trivial) {
        out.J = 0.0;
        out.phi = s.sign0 * std::numbers::pi / 2;
        return out;
    }
    if (s.monotone) {
        // (1 + r) y - r tanh(y) = kappa z, J = J1 tanh^2(y)
        double u = s.kappa * z;
        double lo = s.r > 0 ? u / (1 + s.r) : (u + s.r) / (1 + s.r);
        double hi = s.r > 0 ? (u + s.r) / (1 + s.r) : u / (1 + s.r);
        lo = std::max(0.0, lo);
        hi = std::max(hi, lo);
        double y = 0.5 * (lo + hi);
        for (int it = 0; it < 60; ++it) {
            double f = (1 + s.r) * y - s.r * std::tanh(y) - u;
            double t = std::tanh(y);
            double d = 1 + s.r * t * t;
            double ny = y - f / d;
            if (!(ny >= lo && ny <= hi)) ny = 0.5 * (lo + hi);
            if (f > 0) hi = y;
            else lo = y;
            if (std::abs(ny - y) <= 1e-16 * std::max(1.0, y)) {
                y = ny;
                break;
            }
            y = ny;
        }
        double t = std::tanh(y);
        out.J = s.J1 * t * t;
        out.phi = phase_at(out.J, true, s);
        return out;
    }
    double T = 2.0 * s.z_quarter;
    double zz = std::fmod(z, T);
    bool rising = zz <= s.z_quarter;
    if (!rising) zz = T - zz;
    double g = detail::invert_quarter(s.kappa * zz, s);
    double sg = std::sin(g);
    out.J = s.J1 * sg * sg;
    out.phi = phase_at(out.J, rising, s);
    return out;
}

inline Fluxes fluxes_at(const ExchangeState& e, const BoundaryFields& b) {
    return {b.eta10 - e.J, b.eta20 - e.J, b.eta30 + e.J};
}

inline AtomicState atomic_state_at(const ExchangeState& e, const AdiabaticSolution& s) {
    auto f = fluxes_at(e, s.boundary);
    const auto& p = s.params;
    double l0 = s.lambda + s.coeffs.q * e.J;
    return atomic_state(std::sqrt(p.mu1 * std::max(0.0, f.eta1)), std::sqrt(p.mu2 * std::max(0.0, f.eta2)),
                        std::sqrt(p.mu3 * f.eta3), e.phi, p.delta2, p.delta3, l0);
}

struct TrajectoryPoint {
    double z = 0;
    double eta1 = 0, eta2 = 0, eta3 = 0;
    double J = 0, phi = 0;
    AtomicState state;
};

using Trajectory = std::vector<TrajectoryPoint>;

inline Trajectory sample(const AdiabaticSolution& s, const std::vector<double>& z, bool with_state = true) {
    Trajectory t;
    t.reserve(z.size());
    for (double zi : z) {
        auto e = exchange_at(zi, s);
        auto f = fluxes_at(e, s.boundary);
        TrajectoryPoint pt{zi, f.eta1, f.eta2, f.eta3, e.J, e.phi, {}};
        if (with_state) pt.state = atomic_state_at(e, s);
        t.push_back(pt);
    }
    return t;
}

}  // namespace twm
