#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twm {

enum class ErrorCode {
    NonPositiveCoupling,
    NegativeFlux,
    ResonanceViolation,
    DomainError,
    SingularCharacteristic,
    BranchAmbiguity,
    VanishingA0,
    NoOscillationRegime,
    NonMonotoneRelation,
    ConditionViolated,
    MuOrdering,
    NoSolution,
    DivisionByZero,
    GridMismatch,
    StiffnessFailure,
    BranchLoss,
    CFLViolation,
    NonConvergence,
    BadScenario,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::NonPositiveCoupling: return "NonPositiveCoupling";
    case ErrorCode::NegativeFlux: return "NegativeFlux";
    case ErrorCode::ResonanceViolation: return "ResonanceViolation";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SingularCharacteristic: return "SingularCharacteristic";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::VanishingA0: return "VanishingA0";
    case ErrorCode::NoOscillationRegime: return "NoOscillationRegime";
    case ErrorCode::NonMonotoneRelation: return "NonMonotoneRelation";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::MuOrdering: return "MuOrdering";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::StiffnessFailure: return "StiffnessFailure";
    case ErrorCode::BranchLoss: return "BranchLoss";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BadScenario: return "BadScenario";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// One frequency unit for all rates and detunings, one length unit; mu*eta has
// units of frequency^2.
struct MediumParams {
    double N = 1.0;
    double mu1 = 0.05, mu2 = 0.5, mu3 = 1.0;
    double delta2 = 0.0, delta3 = 0.0;
    double gamma = 0.0;
    double delta_k = 0.0;
    double theta = 0.0;

    double q() const { return -2.0 * delta_k / N; }
};

// Normalized temporal envelope f(tau) in [0, 1].
class Envelope {
public:
    enum class Shape { Flat, Gaussian, Sech, FlatTop, Samples };

    static Envelope flat() { return Envelope(Shape::Flat); }
    static Envelope gaussian(double fwhm, double center = 0.0) {
        Envelope e(Shape::Gaussian);
        e.a_ = fwhm;
        e.b_ = center;
        return e;
    }
    static Envelope sech(double width, double center = 0.0) {
        Envelope e(Shape::Sech);
        e.a_ = width;
        e.b_ = center;
        return e;
    }
    // smooth plateau between t_on and t_off with tanh edges of width rise
    static Envelope flattop(double t_on, double t_off, double rise) {
        Envelope e(Shape::FlatTop);
        e.a_ = t_on;
        e.b_ = t_off;
        e.c_ = rise;
        return e;
    }
    static Envelope samples(std::vector<double> tau, std::vector<double> value) {
        Envelope e(Shape::Samples);
        e.tau_ = std::move(tau);
        e.val_ = std::move(value);
        return e;
    }

    Shape shape() const { return shape_; }

    double operator()(double t) const {
        switch (shape_) {
        case Shape::Flat: return 1.0;
        case Shape::Gaussian: {
            double x = (t - b_) / a_;
            return std::exp(-4.0 * std::log(2.0) * x * x);
        }
        case Shape::Sech: return 1.0 / std::cosh((t - b_) / a_);
        case Shape::FlatTop: {
            double v = 0.5 * (std::tanh((t - a_) / c_) - std::tanh((t - b_) / c_));
            return std::clamp(v, 0.0, 1.0);
        }
        case Shape::Samples: {
            if (tau_.empty()) return 0.0;
            if (t <= tau_.front()) return val_.front();
            if (t >= tau_.back()) return val_.back();
            auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
            std::size_t i = static_cast<std::size_t>(it - tau_.begin()) - 1;
            double w = (t - tau_[i]) / (tau_[i + 1] - tau_[i]);
            return (1.0 - w) * val_[i] + w * val_[i + 1];
        }
        }
        return 0.0;
    }

    // problems with the definition itself (bad widths, unsorted samples...)
    std::string check() const {
        switch (shape_) {
        case Shape::Flat: return {};
        case Shape::Gaussian:
        case Shape::Sech: return a_ > 0 ? std::string{} : "envelope width must be positive";
        case Shape::FlatTop:
            if (!(c_ > 0)) return "flattop rise must be positive";
            if (!(b_ > a_)) return "flattop needs t_off > t_on";
            return {};
        case Shape::Samples: {
            if (tau_.size() < 2 || tau_.size() != val_.size()) return "envelope samples need >= 2 (tau, value) pairs";
            for (std::size_t i = 1; i < tau_.size(); ++i)
                if (!(tau_[i] > tau_[i - 1])) return "envelope sample times must increase";
            double peak = 0;
            for (double v : val_) {
                if (v < 0 || v > 1 + 1e-12) return "envelope samples must lie in [0, 1]";
                peak = std::max(peak, v);
            }
            if (std::abs(peak - 1.0) > 1e-9) return "envelope samples must peak at 1";
            return {};
        }
        }
        return {};
    }

private:
    explicit Envelope(Shape s) : shape_(s) {}
    Shape shape_;
    double a_ = 0, b_ = 0, c_ = 0;
    std::vector<double> tau_, val_;
};

struct BoundaryFields {
    double eta10 = 1.0, eta20 = 1.0, eta30 = 0.0;
    double phi0 = 0.0;
    Envelope envelope1 = Envelope::flat();
    Envelope envelope2 = Envelope::flat();

    // fluxes of one retarded-time slice
    BoundaryFields at(double tau) const {
        BoundaryFields b = *this;
        b.eta10 = eta10 * envelope1(tau);
        b.eta20 = eta20 * envelope2(tau);
        b.envelope1 = Envelope::flat();
        b.envelope2 = Envelope::flat();
        return b;
    }
};

struct BackgroundTransition {
    double mu = 0.0;
    double delta = 0.0;
    int mode = 1;
};

inline double rabi(double mu, double eta) {
    if (!(mu > 0)) throw Error(ErrorCode::NonPositiveCoupling, "rabi: mu must be positive");
    if (eta < 0) throw Error(ErrorCode::NegativeFlux, "rabi: eta must be non-negative");
    return std::sqrt(mu * eta);
}

struct Checked {
    MediumParams params;
    BoundaryFields boundary;
    std::vector<std::string> warnings;
};

inline Checked validate(const MediumParams& p, const BoundaryFields& b) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v))
            throw Error(ErrorCode::NonPositiveCoupling, std::string(name) + " must be positive");
    };
    positive(p.mu1, "mu1");
    positive(p.mu2, "mu2");
    positive(p.mu3, "mu3");
    positive(p.N, "N");
    if (!(p.gamma >= 0)) throw Error(ErrorCode::DomainError, "gamma must be non-negative");
    for (double v : {p.delta2, p.delta3, p.delta_k, p.theta})
        if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "medium parameters must be finite");

    auto flux = [](double v, const char* name) {
        if (!(v >= 0) || !std::isfinite(v))
            throw Error(ErrorCode::NegativeFlux, std::string(name) + " must be non-negative");
    };
    flux(b.eta10, "eta10");
    flux(b.eta20, "eta20");
    flux(b.eta30, "eta30");
    if (auto m = b.envelope1.check(); !m.empty()) throw Error(ErrorCode::DomainError, "envelope1: " + m);
    if (auto m = b.envelope2.check(); !m.empty()) throw Error(ErrorCode::DomainError, "envelope2: " + m);

    Checked out{p, b, {}};
    if (p.mu1 > 0.2 * p.mu2) out.warnings.push_back("mu1 > 0.2 mu2: the simple-model hierarchy mu1 << mu2 is not satisfied");
    double omega_max = std::sqrt(std::max({p.mu1 * b.eta10, p.mu2 * b.eta20, p.mu3 * b.eta30}));
    if (p.gamma > 0 && omega_max > 0 && p.gamma > 0.1 * omega_max)
        out.warnings.push_back("gamma is not small compared with the Rabi frequencies");
    return out;
}

// Background mismatch from far-detuned levels: n_j = 1 + N (c/w_j) sum mu_jm/delta_jm,
// so k_j = w_j/c + N sum_m mu_jm/delta_jm and the c/w_j factors cancel.
inline double residual_mismatch(const std::vector<BackgroundTransition>& transitions,
                                double omega1, double omega2, double omega3, double N) {
    double scale = std::max({std::abs(omega1), std::abs(omega2), std::abs(omega3)});
    if (std::abs(omega3 - (omega1 + omega2)) > 1e-12 * scale)
        throw Error(ErrorCode::ResonanceViolation, "omega3 != omega1 + omega2");
    double s[3] = {0, 0, 0};
    for (const auto& t : transitions) {
        if (t.mode < 1 || t.mode > 3) throw Error(ErrorCode::DomainError, "background mode index must be 1, 2 or 3");
        if (t.delta == 0) throw Error(ErrorCode::DomainError, "background detuning must be nonzero");
        s[t.mode - 1] += t.mu / t.delta;
    }
    // the vacuum parts w1/c + w2/c - w3/c vanish at resonance
    return N * (s[0] + s[1] - s[2]);
}

}  // namespace twm
