#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "twm/model.hpp"

// Independent numerical references. Nothing here calls into specfun or
// hamiltonian: eigenvalues come from Eigen, integrals from adaptive quadrature.

namespace twm::oracle {

using cplx = std::complex<double>;

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.01;  // fraction of the natural length (canonical) or of 1/gap (MB)
};

struct SpaceTimeGrid {
    std::vector<double> z;
    std::vector<double> tau;
};

// ---------------------------------------------------------------- quadrature

namespace detail {

// double-exponential quadrature; the integrands peak at or beyond the upper end
inline double integrate_toward(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    double err = 0, l1 = 0;
    double sum = ts.integrate(f, a, b, 1e-15, &err, &l1);
    if (!(err <= 1e-12 * std::max(1.0, std::abs(sum))) || !std::isfinite(sum))
        throw Error(ErrorCode::NonConvergence, "elliptic quadrature did not converge");
    return sum;
}

}  // namespace detail

inline double quadrature_ellip_f(double g, double p) {
    if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::DomainError, "modulus outside [0, 1]");
    auto f = [p](double t) { double s = std::sin(t); return 1.0 / std::sqrt(1.0 - p * p * s * s); };
    return detail::integrate_toward(f, 0.0, g);
}

inline double quadrature_ellip_e(double g, double p) {
    auto f = [p](double t) { double s = std::sin(t); return std::sqrt(1.0 - p * p * s * s); };
    return detail::integrate_toward(f, 0.0, g);
}

inline double quadrature_ellip_pi(double g, double r, double p) {
    if (r * std::sin(g) * std::sin(g) >= 1.0) throw Error(ErrorCode::SingularCharacteristic, "r sin^2 >= 1");
    auto f = [p, r](double t) {
        double s2 = std::sin(t) * std::sin(t);
        return 1.0 / ((1.0 - r * s2) * std::sqrt(1.0 - p * p * s2));
    };
    return detail::integrate_toward(f, 0.0, g);
}

// The characteristic polynomial with Manley-Rowe fluxes and the conserved
// energy lambda_0 = lambda + q J, evaluated directly (no expansion in J).
struct RawCharacteristic {
    MediumParams p;
    BoundaryFields b;
    double lambda = 0;

    double G(double J) const {
        double l = lambda + p.q() * J;
        double e1 = b.eta10 - J, e2 = b.eta20 - J, e3 = b.eta30 + J;
        double S = p.mu1 * e1 + p.mu2 * e2 + p.mu3 * e3;
        return l * (l + p.delta2) * (l + p.delta3) - S * l - p.mu1 * e1 * p.delta3 - p.mu3 * e3 * p.delta2;
    }
    double G_lambda(double J) const {
        double l = lambda + p.q() * J;
        double e1 = b.eta10 - J, e2 = b.eta20 - J, e3 = b.eta30 + J;
        double S = p.mu1 * e1 + p.mu2 * e2 + p.mu3 * e3;
        return 3 * l * l + 2 * l * (p.delta2 + p.delta3) + p.delta2 * p.delta3 - S;
    }
    double g2(double J) const {
        return 4.0 * p.mu1 * p.mu2 * p.mu3 * (b.eta10 - J) * (b.eta20 - J) * (b.eta30 + J);
    }
    double disc(double J) const { double g = G(J); return g2(J) - g * g; }
};

// First positive zero of g^2 - G^2 (the turning point J1), by scanning and bracketing.
inline double quadrature_turning_point(const RawCharacteristic& rc) {
    double top = std::min(rc.b.eta10, rc.b.eta20);
    if (top <= 0) return 0.0;
    const int n = 4000;
    double prev = top * 1e-9;
    for (int i = 1; i <= n; ++i) {
        double x = top * i / n;
        if (rc.disc(x) <= 0.0) {
            if (rc.disc(x) == 0.0) return x;
            std::uintmax_t it = 200;
            auto r = boost::math::tools::toms748_solve([&](double J) { return rc.disc(J); }, prev, x,
                                                       boost::math::tools::eps_tolerance<double>(52), it);
            return 0.5 * (r.first + r.second);
        }
        prev = x;
    }
    return top;
}

// Distance z(J) from the raw integral  (N/2) z = int_0^J |dG/dl| dJ' / sqrt(g^2 - G^2)
// with J' = J1 sin^2(t) to remove both square-root endpoints. Close to the
// endpoints g^2 - G^2 is replaced by its linearization about the simple root.
inline double quadrature_distance(double J, const RawCharacteristic& rc, double J1) {
    if (J <= 0) return 0.0;
    double top = std::asin(std::min(1.0, std::sqrt(J / J1)));
    double h = 1e-6 * J1;
    double slope0 = (rc.disc(h) - rc.disc(0.0)) / h;           // > 0
    double slope1 = (rc.disc(J1) - rc.disc(J1 - h)) / h;       // < 0
    auto f = [&](double t) {
        double s = std::sin(t), c = std::cos(t);
        double Jp = J1 * s * s;
        double w = std::abs(rc.G_lambda(Jp)) * 2.0 * J1;
        if (c < 1e-5) return w * s / std::sqrt(-slope1 * J1);
        double ratio = Jp > 1e-8 * J1 ? rc.disc(Jp) / Jp : slope0;  // (g^2 - G^2)/J stays finite at 0
        return w * c / std::sqrt(std::max(J1 * ratio, 1e-300));
    };
    double e = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, top, 12, 1e-13, &e);
    return v / (0.5 * rc.p.N);
}

// ---------------------------------------------------------------- eigenvalues

inline Eigen::Matrix3cd hamiltonian(double W1, double W2, double W3, double phi, double d2, double d3) {
    Eigen::Matrix3cd H;
    cplx e = std::polar(1.0, phi);
    H << 0.0, -W1, -W3, -W1, -d2, -W2 * e, -W3, -W2 * std::conj(e), -d3;
    return H;
}

// Entrance eigenvalue by a plain linear homotopy on the Hermitian matrix.
inline double entrance_energy(const MediumParams& p, const BoundaryFields& b, double prep_detuning = 0.0) {
    double W1 = std::sqrt(p.mu1 * b.eta10), W2 = std::sqrt(p.mu2 * b.eta20), W3 = std::sqrt(p.mu3 * b.eta30);
    double phi = b.phi0 + p.theta;
    const int n = 2000;
    double lam = 0;
    for (int k = 0; k <= n; ++k) {
        double s = k == 0 ? 1e-6 : double(k) / n;
        double d2 = p.delta2 + (1.0 - s) * prep_detuning;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(hamiltonian(s * W1, s * W2, s * W3, phi, d2, p.delta3));
        auto ev = es.eigenvalues();
        int pick = 0;
        if (k == 0) {
            double best = -1;
            for (int i = 0; i < 3; ++i) {
                double w = std::norm(es.eigenvectors()(0, i));
                if (w > best) { best = w; pick = i; }
            }
        } else {
            for (int i = 1; i < 3; ++i)
                if (std::abs(ev(i) - lam) < std::abs(ev(pick) - lam)) pick = i;
        }
        lam = ev(pick);
    }
    return lam;
}

// ---------------------------------------------------------------- canonical ODE

struct CanonicalTrajectory {
    std::vector<double> z, J, phi, H, lambda0;
    std::vector<double> eta1, eta2, eta3;
};

class CanonicalSystem {
public:
    using State = std::array<double, 2>;  // X = sqrt(2 eta3) cos(phi), Y = sqrt(2 eta3) sin(phi)

    CanonicalSystem(const MediumParams& p, const BoundaryFields& b, double energy)
        : p_(p), b_(b), energy_(energy), k_(std::sqrt(p.mu1 * p.mu2 * p.mu3)) {}

    // lambda_0 at a state, nearest to the value the conserved energy predicts
    double lambda0(const State& s) const {
        double J = j_of(s);
        double e1 = std::max(0.0, b_.eta10 - J), e2 = std::max(0.0, b_.eta20 - J), e3 = std::max(0.0, b_.eta30 + J);
        double phi = std::atan2(s[1], s[0]);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(
            hamiltonian(std::sqrt(p_.mu1 * e1), std::sqrt(p_.mu2 * e2), std::sqrt(p_.mu3 * e3), phi, p_.delta2, p_.delta3),
            Eigen::EigenvaluesOnly);
        double pred = (energy_ - p_.delta_k * J) * 2.0 / p_.N;
        auto ev = es.eigenvalues();
        double l = ev(0);
        for (int i = 1; i < 3; ++i)
            if (std::abs(ev(i) - pred) < std::abs(l - pred)) l = ev(i);
        for (int it = 0; it < 2; ++it) {
            double d = r_lambda(l, J);
            if (d == 0) break;
            double step = residual(l, s) / d;
            if (!std::isfinite(step)) throw Error(ErrorCode::BranchLoss, "lambda Newton diverged");
            l -= step;
        }
        return l;
    }

    void operator()(const State& s, State& ds, double) const {
        double J = j_of(s);
        double l = lambda0(s);
        double Rl = r_lambda(l, J);
        double scale = std::abs(p_.mu1 * b_.eta10) + std::abs(p_.mu2 * b_.eta20) + std::abs(p_.delta2 * p_.delta3) + 1e-300;
        if (std::abs(Rl) < 1e-12 * scale) throw Error(ErrorCode::BranchLoss, "dG/dlambda vanished");
        double e1 = std::max(0.0, b_.eta10 - J), e2 = std::max(0.0, b_.eta20 - J);
        double pr = std::sqrt(e1 * e2);
        double RJ = -(p_.mu3 - p_.mu1 - p_.mu2) * l + p_.mu1 * p_.delta3 - p_.mu3 * p_.delta2;
        if (s[0] != 0.0 && pr > 0) RJ -= std::sqrt(2.0) * k_ * s[0] * (e1 + e2) / (2.0 * pr);
        double RX = RJ * s[0] + std::sqrt(2.0) * k_ * pr;
        double RY = RJ * s[1];
        double lX = -RX / Rl, lY = -RY / Rl;
        ds[0] = -(0.5 * p_.N * lY + p_.delta_k * s[1]);
        ds[1] = 0.5 * p_.N * lX + p_.delta_k * s[0];
    }

    double J(const State& s) const { return j_of(s); }
    double energy(const State& s) const { return 0.5 * p_.N * lambda0(s) + p_.delta_k * j_of(s); }
    double r_lambda_at(const State& s) const { return r_lambda(lambda0(s), j_of(s)); }

private:
    double j_of(const State& s) const { return 0.5 * (s[0] * s[0] + s[1] * s[1]) - b_.eta30; }
    double r_lambda(double l, double J) const {
        double S = p_.mu1 * (b_.eta10 - J) + p_.mu2 * (b_.eta20 - J) + p_.mu3 * (b_.eta30 + J);
        return 3 * l * l + 2 * l * (p_.delta2 + p_.delta3) + p_.delta2 * p_.delta3 - S;
    }
    double residual(double l, const State& s) const {
        double J = j_of(s);
        double e1 = std::max(0.0, b_.eta10 - J), e2 = std::max(0.0, b_.eta20 - J), e3 = b_.eta30 + J;
        double S = p_.mu1 * e1 + p_.mu2 * e2 + p_.mu3 * e3;
        return l * (l + p_.delta2) * (l + p_.delta3) - S * l - p_.mu1 * e1 * p_.delta3 - p_.mu3 * e3 * p_.delta2 +
               std::sqrt(2.0) * k_ * std::sqrt(e1 * e2) * s[0];
    }

    MediumParams p_;
    BoundaryFields b_;
    double energy_;
    double k_;
};

struct CanonicalOptions {
    double seed_eps = 0.0;       // starting J when eta30 = 0; 0 starts exactly at the vacuum point
    double prep_detuning = 0.0;  // same meaning as for the analytic branch tracking
};

namespace detail {
template <class Sys, class State, class Obs>
void run_odeint(Sys& sys, State& x, const std::vector<double>& times, double dt0, double max_dt,
                const IntegratorConfig& cfg, Obs obs) {
    using namespace boost::numeric::odeint;
    auto stepper = make_controlled(cfg.atol, cfg.rtol, max_dt, runge_kutta_fehlberg78<State>());
    try {
        integrate_times(stepper, std::ref(sys), x, times.begin(), times.end(), dt0, obs,
                        max_step_checker(200000));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StiffnessFailure, e.what());
    }
}
}  // namespace detail

inline CanonicalTrajectory integrate_canonical(const MediumParams& p, const BoundaryFields& b,
                                               const std::vector<double>& z, const IntegratorConfig& cfg = {},
                                               const CanonicalOptions& opt = {}) {
    validate(p, b);
    if (z.size() < 2 || z.front() != 0.0) throw Error(ErrorCode::GridMismatch, "z samples must start at 0");
    double lam = entrance_energy(p, b, opt.prep_detuning);
    double phi0 = b.phi0 + p.theta;
    CanonicalSystem::State x{};
    double J0 = 0;
    if (b.eta30 > 0) {
        x = {std::sqrt(2 * b.eta30) * std::cos(phi0), std::sqrt(2 * b.eta30) * std::sin(phi0)};
    }
    double energy = 0.5 * p.N * lam;
    CanonicalSystem sys(p, b, energy);
    int grow = sys.r_lambda_at(x) > 0 ? -1 : 1;
    if (b.eta30 == 0 && opt.seed_eps > 0) {
        // seed on the growing branch with phi = +-pi/2
        J0 = opt.seed_eps;
        x = {0.0, grow * std::sqrt(2 * J0)};
        energy = sys.energy(x);
        sys = CanonicalSystem(p, b, energy);
    }

    double k = std::sqrt(p.mu1 * p.mu2 * p.mu3 * std::max(b.eta10, b.eta20));
    double scale = std::abs(sys.r_lambda_at(x));
    double length = scale > 0 && k > 0 ? scale / (0.5 * p.N * k) : 1.0;
    double max_dt = cfg.max_step * length;

    CanonicalTrajectory out;
    auto obs = [&](const CanonicalSystem::State& s, double zz) {
        double l = sys.lambda0(s);
        double J = sys.J(s);
        double ph = (s[0] == 0 && s[1] == 0) ? grow * std::numbers::pi / 2 : std::atan2(s[1], s[0]);
        out.z.push_back(zz);
        out.J.push_back(J);
        out.phi.push_back(ph);
        out.lambda0.push_back(l);
        out.H.push_back(0.5 * p.N * l + p.delta_k * J);
        out.eta1.push_back(b.eta10 - J);
        out.eta2.push_back(b.eta20 - J);
        out.eta3.push_back(b.eta30 + J);
    };
    detail::run_odeint(sys, x, z, std::min(max_dt, z[1] - z[0]) * 0.1, max_dt, cfg, obs);
    return out;
}

// Integrates a canonical state from z0 to z1 (either direction).
inline CanonicalSystem::State canonical_flow(const MediumParams& p, const BoundaryFields& b, double energy,
                                             CanonicalSystem::State x, double z0, double z1, double max_dt,
                                             const IntegratorConfig& cfg = {}) {
    using State = CanonicalSystem::State;
    CanonicalSystem sys(p, b, energy);
    double sign = z1 >= z0 ? 1.0 : -1.0;
    double len = std::abs(z1 - z0);
    if (len == 0) return x;
    // backward flow is the forward flow of the reversed field
    auto rhs = [&](const State& s, State& ds, double t) {
        sys(s, ds, z0 + sign * t);
        ds[0] *= sign;
        ds[1] *= sign;
    };
    using namespace boost::numeric::odeint;
    auto stepper = make_controlled(cfg.atol, cfg.rtol, max_dt, runge_kutta_fehlberg78<State>());
    try {
        integrate_adaptive(stepper, rhs, x, 0.0, len, std::min(max_dt, len) * 0.1);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StiffnessFailure, e.what());
    }
    return x;
}

// ---------------------------------------------------------------- Maxwell-Bloch

struct MbOptions {
    double tau_start = std::numeric_limits<double>::quiet_NaN();  // default: first output time
};

struct MbResult {
    SpaceTimeGrid grid;
    MediumParams params;
    BoundaryFields boundary;
    // [field j][tau index][z index]
    std::array<std::vector<std::vector<cplx>>, 3> omega;
    std::array<std::vector<std::vector<cplx>>, 3> c;

    double eta(int j, std::size_t it, std::size_t iz) const {
        double mu = j == 0 ? params.mu1 : j == 1 ? params.mu2 : params.mu3;
        return std::norm(omega[j][it][iz]) / mu;
    }
    double J(std::size_t it, std::size_t iz) const { return eta(2, it, iz) - boundary.eta30; }
    double phi(std::size_t it, std::size_t iz) const {
        double v = std::arg(omega[2][it][iz]) - std::arg(omega[0][it][iz]) - std::arg(omega[1][it][iz]) + params.theta -
                   params.delta_k * grid.z[iz];
        return std::remainder(v, 2.0 * std::numbers::pi);
    }
    double population(int j, std::size_t it, std::size_t iz) const { return std::norm(c[j][it][iz]); }
};

class MbSystem {
public:
    using State = std::vector<cplx>;

    MbSystem(const MediumParams& p, const BoundaryFields& b, const std::vector<double>& z)
        : p_(p), b_(b), z_(z), n_(z.size()), h_(z[1] - z[0]) {
        for (auto& v : src_) v.resize(n_);
        for (auto& v : fld_) v.resize(n_);
        rot_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) rot_[k] = std::polar(1.0, p.theta - p.delta_k * z[k]);
    }

    // fields at every node for atoms c at retarded time t
    void fields(const State& c, double t) {
        const cplx I(0, 1);
        double N = p_.N;
        for (std::size_t k = 0; k < n_; ++k) {
            cplx c1 = c[3 * k], c2 = c[3 * k + 1], c3 = c[3 * k + 2];
            src_[0][k] = I * (0.5 * N * p_.mu1) * std::conj(c1) * c2;
            src_[1][k] = I * (0.5 * N * p_.mu2) * std::conj(c2) * c3 * rot_[k];
            src_[2][k] = I * (0.5 * N * p_.mu3) * std::conj(c1) * c3;
        }
        cplx in[3] = {std::sqrt(p_.mu1 * b_.eta10 * b_.envelope1(t)), std::sqrt(p_.mu2 * b_.eta20 * b_.envelope2(t)),
                      std::polar(std::sqrt(p_.mu3 * b_.eta30), b_.phi0)};
        for (int j = 0; j < 3; ++j) cumulative(src_[j], in[j], fld_[j]);
    }

    void operator()(const State& c, State& dc, double t) {
        fields(c, t);
        const cplx I(0, 1);
        cplx d3(p_.delta3, p_.gamma);
        for (std::size_t k = 0; k < n_; ++k) {
            cplx c1 = c[3 * k], c2 = c[3 * k + 1], c3 = c[3 * k + 2];
            cplx W1 = fld_[0][k], W2 = fld_[1][k], W3 = fld_[2][k];
            dc[3 * k] = I * (std::conj(W1) * c2 + std::conj(W3) * c3);
            dc[3 * k + 1] = I * (W1 * c1 + std::conj(W2) * rot_[k] * c3 + p_.delta2 * c2);
            dc[3 * k + 2] = I * (W2 * std::conj(rot_[k]) * c2 + W3 * c1 + d3 * c3);
        }
    }

    const std::array<std::vector<cplx>, 3>& last_fields() const { return fld_; }

private:
    // fourth-order cumulative quadrature on the uniform z grid
    void cumulative(const std::vector<cplx>& f, cplx start, std::vector<cplx>& out) const {
        const double w = h_ / 24.0;
        out[0] = start;
        if (n_ < 4) {
            for (std::size_t k = 1; k < n_; ++k) out[k] = out[k - 1] + 0.5 * h_ * (f[k - 1] + f[k]);
            return;
        }
        out[1] = out[0] + w * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        for (std::size_t k = 1; k + 2 < n_; ++k)
            out[k + 1] = out[k] + w * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
        std::size_t m = n_ - 1;
        out[m] = out[m - 1] + w * (f[m - 3] - 5.0 * f[m - 2] + 19.0 * f[m - 1] + 9.0 * f[m]);
    }

    MediumParams p_;
    BoundaryFields b_;
    std::vector<double> z_;
    std::size_t n_;
    double h_;
    std::array<std::vector<cplx>, 3> src_, fld_;
    std::vector<cplx> rot_;
};

inline MbResult integrate_mb(const MediumParams& p, const BoundaryFields& b, const SpaceTimeGrid& grid,
                             const IntegratorConfig& cfg = {}, const MbOptions& opt = {}) {
    validate(p, b);
    const auto& z = grid.z;
    const auto& tau = grid.tau;
    if (z.size() < 2 || tau.empty()) throw Error(ErrorCode::GridMismatch, "grid needs >= 2 z samples and >= 1 tau sample");
    if (z.front() != 0.0) throw Error(ErrorCode::GridMismatch, "z grid must start at 0");
    double h = z[1] - z[0];
    for (std::size_t k = 1; k < z.size(); ++k)
        if (!(std::abs((z[k] - z[k - 1]) - h) <= 1e-9 * h)) throw Error(ErrorCode::GridMismatch, "z grid must be uniform");
    for (std::size_t k = 1; k < tau.size(); ++k)
        if (!(tau[k] > tau[k - 1])) throw Error(ErrorCode::GridMismatch, "tau grid must increase");

    double wref = std::sqrt(std::max({p.mu1 * b.eta10, p.mu2 * b.eta20, p.mu3 * b.eta30}));
    double mumax = std::max({p.mu1, p.mu2, p.mu3});
    if (wref > 0 && p.N * mumax * h / (4.0 * wref) > 0.5)
        throw Error(ErrorCode::CFLViolation, "z step too coarse for the field growth rate");

    MbSystem sys(p, b, z);
    MbSystem::State c(3 * z.size(), cplx(0));
    for (std::size_t k = 0; k < z.size(); ++k) c[3 * k] = 1.0;

    double t0 = std::isnan(opt.tau_start) ? tau.front() : opt.tau_start;
    if (t0 > tau.front()) throw Error(ErrorCode::GridMismatch, "tau_start after the first output time");
    std::vector<double> times;
    times.push_back(t0);
    for (double t : tau)
        if (t > t0) times.push_back(t);

    double rate = std::max({wref, std::abs(p.delta2), std::abs(p.delta3), p.gamma, 1e-300});
    double max_dt = cfg.max_step * 100.0 / rate;  // max_step 0.01 -> one unit of 1/rate

    MbResult out;
    out.grid = grid;
    out.params = p;
    out.boundary = b;
    for (int j = 0; j < 3; ++j) {
        out.omega[j].assign(tau.size(), std::vector<cplx>(z.size()));
        out.c[j].assign(tau.size(), std::vector<cplx>(z.size()));
    }
    std::size_t slot = 0;
    auto store = [&](const MbSystem::State& s, double t) {
        // tau samples equal to t0 are stored before any stepping
        while (slot < tau.size() && tau[slot] <= t + 1e-12 * std::max(1.0, std::abs(t))) {
            sys.fields(s, t);
            const auto& f = sys.last_fields();
            for (std::size_t k = 0; k < z.size(); ++k) {
                for (int j = 0; j < 3; ++j) {
                    out.omega[j][slot][k] = f[j][k];
                    out.c[j][slot][k] = s[3 * k + j];
                }
            }
            ++slot;
        }
    };
    if (times.size() == 1) {
        store(c, t0);
        return out;
    }
    try {
        detail::run_odeint(sys, c, times, std::min(max_dt, 1e-3 / rate), max_dt, cfg, store);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::StiffnessFailure) throw Error(ErrorCode::NonConvergence, e.what());
        throw;
    }
    for (auto& v : c)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorCode::NonConvergence, "Maxwell-Bloch state is not finite");
    return out;
}

}  // namespace twm::oracle
