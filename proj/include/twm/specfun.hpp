#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "twm/model.hpp"

namespace twm {

namespace carlson {

// Duplication algorithms for the symmetric integrals (B.C. Carlson,
// Numer. Algorithms 10 (1995) 13), in the form popularised by Numerical Recipes.

inline double rf(double x, double y, double z) {
    constexpr double errtol = 0.0008;
    constexpr double third = 1.0 / 3.0;
    constexpr double c1 = 1.0 / 24.0, c2 = 0.1, c3 = 3.0 / 44.0, c4 = 1.0 / 14.0;
    if (std::min({x, y, z}) < 0 || std::min({x + y, x + z, y + z}) <= 0)
        throw Error(ErrorCode::DomainError, "carlson rf: invalid arguments");
    double xt = x, yt = y, zt = z, ave, delx, dely, delz;
    for (int it = 0; it < 200; ++it) {
        double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        double alamb = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + alamb);
        yt = 0.25 * (yt + alamb);
        zt = 0.25 * (zt + alamb);
        ave = third * (xt + yt + zt);
        delx = (ave - xt) / ave;
        dely = (ave - yt) / ave;
        delz = (ave - zt) / ave;
        if (std::max({std::abs(delx), std::abs(dely), std::abs(delz)}) < errtol) break;
    }
    double e2 = delx * dely - delz * delz, e3 = delx * dely * delz;
    return (1.0 + (c1 * e2 - c2 - c3 * e3) * e2 + c4 * e3) / std::sqrt(ave);
}

inline double rd(double x, double y, double z) {
    constexpr double errtol = 0.0005;
    constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 6.0, c3 = 9.0 / 22.0, c4 = 3.0 / 26.0,
                     c5 = 0.25 * c3, c6 = 1.5 * c4;
    if (std::min(x, y) < 0 || std::min(x + y, z) <= 0)
        throw Error(ErrorCode::DomainError, "carlson rd: invalid arguments");
    double xt = x, yt = y, zt = z, sum = 0, fac = 1, ave, delx, dely, delz;
    for (int it = 0; it < 200; ++it) {
        double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        double alamb = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + alamb));
        fac *= 0.25;
        xt = 0.25 * (xt + alamb);
        yt = 0.25 * (yt + alamb);
        zt = 0.25 * (zt + alamb);
        ave = 0.2 * (xt + yt + 3.0 * zt);
        delx = (ave - xt) / ave;
        dely = (ave - yt) / ave;
        delz = (ave - zt) / ave;
        if (std::max({std::abs(delx), std::abs(dely), std::abs(delz)}) < errtol) break;
    }
    double ea = delx * dely, eb = delz * delz, ec = ea - eb, ed = ea - 6.0 * eb, ee = ed + ec + ec;
    return 3.0 * sum + fac * (1.0 + ed * (-c1 + c5 * ed - c6 * delz * ee) +
                              delz * (c2 * ee + delz * (-c3 * ec + delz * c4 * ea))) /
                           (ave * std::sqrt(ave));
}

inline double rc(double x, double y) {
    constexpr double errtol = 0.0008, third = 1.0 / 3.0;
    constexpr double c1 = 0.3, c2 = 1.0 / 7.0, c3 = 0.375, c4 = 9.0 / 22.0;
    if (x < 0 || y == 0) throw Error(ErrorCode::DomainError, "carlson rc: invalid arguments");
    double xt, yt, w;
    if (y > 0) {
        xt = x;
        yt = y;
        w = 1.0;
    } else {
        xt = x - y;
        yt = -y;
        w = std::sqrt(x) / std::sqrt(xt);
    }
    double ave, s;
    for (int it = 0; it < 200; ++it) {
        double alamb = 2.0 * std::sqrt(xt) * std::sqrt(yt) + yt;
        xt = 0.25 * (xt + alamb);
        yt = 0.25 * (yt + alamb);
        ave = third * (xt + yt + yt);
        s = (yt - ave) / ave;
        if (std::abs(s) < errtol) break;
    }
    return w * (1.0 + s * s * (c1 + s * (c2 + s * (c3 + s * c4)))) / std::sqrt(ave);
}

inline double rj(double x, double y, double z, double p) {
    constexpr double errtol = 0.0005;
    constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 3.0, c3 = 3.0 / 22.0, c4 = 3.0 / 26.0,
                     c5 = 0.75 * c3, c6 = 1.5 * c4, c7 = 0.5 * c2, c8 = c3 + c3;
    if (std::min({x, y, z}) < 0 || std::min({x + y, x + z, y + z, std::abs(p)}) <= 0)
        throw Error(ErrorCode::DomainError, "carlson rj: invalid arguments");
    double sum = 0, fac = 1, xt, yt, zt, pt, a = 0, b = 0, rcx = 0;
    if (p > 0) {
        xt = x;
        yt = y;
        zt = z;
        pt = p;
    } else {
        xt = std::min({x, y, z});
        zt = std::max({x, y, z});
        yt = x + y + z - xt - zt;
        a = 1.0 / (yt - p);
        b = a * (zt - yt) * (yt - xt);
        pt = yt + b;
        double rho = xt * zt / yt, tau = p * pt / yt;
        rcx = rc(rho, tau);
    }
    double ave, delx, dely, delz, delp;
    for (int it = 0; it < 200; ++it) {
        double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        double alamb = sx * (sy + sz) + sy * sz;
        double alpha = pt * (sx + sy + sz) + sx * sy * sz;
        alpha *= alpha;
        double beta = pt * (pt + alamb) * (pt + alamb);
        sum += fac * rc(alpha, beta);
        fac *= 0.25;
        xt = 0.25 * (xt + alamb);
        yt = 0.25 * (yt + alamb);
        zt = 0.25 * (zt + alamb);
        pt = 0.25 * (pt + alamb);
        ave = 0.2 * (xt + yt + zt + pt + pt);
        delx = (ave - xt) / ave;
        dely = (ave - yt) / ave;
        delz = (ave - zt) / ave;
        delp = (ave - pt) / ave;
        if (std::max({std::abs(delx), std::abs(dely), std::abs(delz), std::abs(delp)}) < errtol) break;
    }
    double ea = delx * (dely + delz) + dely * delz, eb = delx * dely * delz, ec = delp * delp,
           ed = ea - 3.0 * ec, ee = eb + 2.0 * delp * (ea - ec);
    double ans = 3.0 * sum + fac * (1.0 + ed * (-c1 + c5 * ed - c6 * ee) + eb * (c7 + delp * (-c8 + delp * c4)) +
                                    delp * ea * (c2 - delp * c3) - c2 * delp * ec) /
                                 (ave * std::sqrt(ave));
    if (p <= 0) ans = a * (b * ans + 3.0 * (rcx - rf(xt, yt, zt)));
    return ans;
}

}  // namespace carlson

namespace detail {
inline void check_elliptic(double amplitude, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "elliptic modulus outside [0, 1]");
    if (!(amplitude >= 0.0 && amplitude <= std::numbers::pi / 2 + 1e-15))
        throw Error(ErrorCode::DomainError, "elliptic amplitude outside [0, pi/2]");
}
}  // namespace detail

// F(g, p) = int_0^g dt / sqrt(1 - p^2 sin^2 t)
inline double ellip_f(double amplitude, double p) {
    detail::check_elliptic(amplitude, p);
    double s = std::sin(amplitude), c = std::cos(amplitude);
    if (amplitude == 0.0) return 0.0;
    if (p == 1.0) {
        if (s >= 1.0) throw Error(ErrorCode::DomainError, "F(pi/2, 1) diverges");
        return std::atanh(s);
    }
    double ps = p * s;
    return s * carlson::rf(c * c, (1.0 - ps) * (1.0 + ps), 1.0);
}

inline double ellip_e(double amplitude, double p) {
    detail::check_elliptic(amplitude, p);
    double s = std::sin(amplitude), c = std::cos(amplitude);
    if (amplitude == 0.0) return 0.0;
    if (p == 1.0) return s;
    double ps = p * s, q = (1.0 - ps) * (1.0 + ps), cc = c * c;
    return s * (carlson::rf(cc, q, 1.0) - ps * ps * carlson::rd(cc, q, 1.0) / 3.0);
}

// Pi(g, r, p) = int_0^g dt / ((1 - r sin^2 t) sqrt(1 - p^2 sin^2 t))
inline double ellip_pi(double amplitude, double r, double p) {
    detail::check_elliptic(amplitude, p);
    if (amplitude == 0.0) return 0.0;
    double s = std::sin(amplitude), c = std::cos(amplitude);
    double rs = 1.0 - r * s * s;
    if (rs <= 0.0) throw Error(ErrorCode::SingularCharacteristic, "r sin^2(g) >= 1");
    if (p == 1.0 && s >= 1.0) throw Error(ErrorCode::DomainError, "Pi(pi/2, r, 1) diverges");
    double ps = p * s, q = (1.0 - ps) * (1.0 + ps), cc = c * c;
    if (cc == 0.0 && q == 0.0) throw Error(ErrorCode::DomainError, "Pi diverges");
    return s * carlson::rf(cc, q, 1.0) + r * s * s * s * carlson::rj(cc, q, 1.0, rs) / 3.0;
}

inline double ellip_k(double p) {
    if (p >= 1.0) throw Error(ErrorCode::DomainError, "K(1) diverges");
    return ellip_f(std::numbers::pi / 2, p);
}

inline double ellip_e_complete(double p) { return ellip_e(std::numbers::pi / 2, p); }

namespace detail {
// F for an arbitrary real amplitude (p < 1), by quasi-periodicity
inline double ellip_f_real(double phi, double p) {
    constexpr double half_pi = std::numbers::pi / 2;
    double m = std::round(phi / std::numbers::pi);
    double r = phi - m * std::numbers::pi;  // in [-pi/2, pi/2]
    double f = ellip_f(std::min(std::abs(r), half_pi), p);
    return 2.0 * m * ellip_k(p) + (r < 0 ? -f : f);
}

// Jacobi amplitude by the descending Landen (AGM) scale, p < 1
inline double amplitude_agm(double u, double p) {
    std::array<double, 40> a{}, c{};
    a[0] = 1.0;
    double b = std::sqrt((1.0 - p) * (1.0 + p));
    c[0] = p;
    int n = 0;
    while (std::abs(c[n]) > 1e-17 && n < 38) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int k = n; k > 0; --k) phi = 0.5 * (phi + std::asin(std::clamp(c[k] / a[k] * std::sin(phi), -1.0, 1.0)));
    return phi;
}
}  // namespace detail

// sn(u; p): inverse of F, extended periodically
inline double jacobi_sn(double u, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "jacobi_sn: modulus outside [0, 1]");
    if (p == 0.0) return std::sin(u);
    if (p == 1.0) return std::tanh(u);
    double phi = detail::amplitude_agm(u, p);
    for (int it = 0; it < 3; ++it) {
        double s = std::sin(phi);
        double f = detail::ellip_f_real(phi, p) - u;
        double step = f * std::sqrt(1.0 - p * p * s * s);
        phi -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(phi))) break;
    }
    return std::sin(phi);
}

inline double arth(double x) {
    if (!(std::abs(x) < 1.0)) throw Error(ErrorCode::DomainError, "arth: |x| must be < 1");
    return std::atanh(x);
}

struct CubicCoeffs {
    double c3 = 1, c2 = 0, c1 = 0, c0 = 0;
    double operator()(double x) const { return ((c3 * x + c2) * x + c1) * x + c0; }
    double derivative(double x) const { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
};

// Real roots (with multiplicity) in ascending order.
inline std::vector<double> solve_cubic_real(const CubicCoeffs& k) {
    for (double v : {k.c3, k.c2, k.c1, k.c0})
        if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "cubic coefficients must be finite");
    double scale = std::max({std::abs(k.c3), std::abs(k.c2), std::abs(k.c1), std::abs(k.c0)});
    std::vector<double> roots;
    if (scale == 0.0) return roots;

    if (std::abs(k.c3) <= 1e-14 * scale) {
        double a = k.c2, b = k.c1, c = k.c0;
        if (std::abs(a) <= 1e-14 * scale) {
            if (b != 0.0) roots.push_back(-c / b);
            return roots;
        }
        double disc = b * b - 4 * a * c;
        if (disc < 0) {
            if (disc > -1e-14 * b * b) disc = 0;
            else return roots;
        }
        double sq = std::sqrt(disc);
        double qq = -0.5 * (b + std::copysign(sq, b));
        if (qq != 0.0) {
            roots.push_back(qq / a);
            roots.push_back(c / qq);
        } else {
            roots.push_back(0.0);
            roots.push_back(0.0);
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    double a = k.c2 / k.c3, b = k.c1 / k.c3, c = k.c0 / k.c3;
    double Q = (a * a - 3.0 * b) / 9.0;
    double R = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    double Q3 = Q * Q * Q;
    if (Q > 0.0 && R * R <= Q3) {
        double th = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
        double sq = -2.0 * std::sqrt(Q);
        for (int j = 0; j < 3; ++j)
            roots.push_back(sq * std::cos((th + 2.0 * std::numbers::pi * (j - 1)) / 3.0) - a / 3.0);
        // j-1 ordering keeps the formula symmetric; the sort below fixes the order
    } else {
        double A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R * R - Q3)), R);
        double B = (A == 0.0) ? 0.0 : Q / A;
        roots.push_back(A + B - a / 3.0);
    }
    for (double& x : roots) {
        for (int it = 0; it < 4; ++it) {
            double d = k.derivative(x);
            if (d == 0.0) break;
            double step = k(x) / d;
            double nx = x - step;
            if (!std::isfinite(nx) || std::abs(k(nx)) > std::abs(k(x))) break;
            x = nx;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace twm
