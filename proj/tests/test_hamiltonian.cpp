#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "twm/hamiltonian.hpp"

using namespace twm;

namespace {

double char_poly(double l, double W1, double W2, double W3, double cphi, double d2, double d3) {
    double S = W1 * W1 + W2 * W2 + W3 * W3;
    return l * l * l + (d2 + d3) * l * l + (d2 * d3 - S) * l - W1 * W1 * d3 - W3 * W3 * d2 + 2 * W1 * W2 * W3 * cphi;
}

MediumParams detuned() {
    MediumParams p;
    p.delta2 = 0.3;
    p.delta3 = -0.2;
    return p;
}

}  // namespace

TEST(Hamiltonian, MatrixIsHermitianAndMatchesCubic) {
    auto H = hamiltonian_matrix(0.3, 0.7, 0.4, 0.9, 0.25, -0.6);
    Eigen::Matrix3cd M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            M(i, j) = H[i][j];
            EXPECT_NEAR(std::abs(H[i][j] - std::conj(H[j][i])), 0.0, 1e-16);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(M);
    auto roots = solve_cubic_real(characteristic(0.3, 0.7, 0.4, 0.9, 0.25, -0.6));
    ASSERT_EQ(roots.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(roots[i], es.eigenvalues()(i), 1e-13);
    for (double r : roots) EXPECT_NEAR(char_poly(r, 0.3, 0.7, 0.4, std::cos(0.9), 0.25, -0.6), 0.0, 1e-13);
}

TEST(Hamiltonian, AtomicStateIsNormalizedEigenvector) {
    auto roots = solve_cubic_real(characteristic(0.3, 0.7, 0.4, 0.9, 0.25, -0.6));
    auto H = hamiltonian_matrix(0.3, 0.7, 0.4, 0.9, 0.25, -0.6);
    for (double l : roots) {
        auto s = atomic_state(0.3, 0.7, 0.4, 0.9, 0.25, -0.6, l);
        EXPECT_NEAR(s.norm2(), 1.0, 1e-14);
        cplx c[3] = {s.c1, s.c2, s.c3};
        for (int i = 0; i < 3; ++i) {
            cplx row = 0;
            for (int j = 0; j < 3; ++j) row += H[i][j] * c[j];
            EXPECT_NEAR(std::abs(row - l * c[i]), 0.0, 1e-13);
        }
        EXPECT_GE(s.c1.real(), 0.0);
        EXPECT_NEAR(s.c1.imag(), 0.0, 1e-16);
    }
}

TEST(Hamiltonian, DegenerateBranchIsRejected) {
    // no couplings and delta2 = 0: |1> and |2> share the eigenvalue 0
    try {
        atomic_state(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BranchAmbiguity);
    }
}

TEST(Hamiltonian, EitEntranceDarkState) {
    MediumParams p;
    BoundaryFields b;
    double l = entrance_eigenvalue(p, b);
    EXPECT_NEAR(l, 0.0, 1e-14);
    double W1 = std::sqrt(p.mu1), W2 = std::sqrt(p.mu2);
    auto s = atomic_state(W1, W2, 0.0, 0.0, 0.0, 0.0, l);
    double n = std::hypot(W1, W2);
    EXPECT_NEAR(s.c1.real(), W2 / n, 1e-14);
    EXPECT_NEAR(std::abs(s.c2), 0.0, 1e-14);
    EXPECT_NEAR(s.c3.real(), -W1 / n, 1e-14);
}

TEST(Hamiltonian, EntranceBranchContinuesFromGroundState) {
    auto p = detuned();
    BoundaryFields b;
    b.eta10 = 0.6;
    double l = entrance_eigenvalue(p, b);
    // the chosen root is the one adiabatically connected to |1>: largest |c1|^2 among the three
    auto roots = solve_cubic_real(characteristic(std::sqrt(p.mu1 * 0.6), std::sqrt(p.mu2), 0, 0, p.delta2, p.delta3));
    double best = -1, lbest = 0;
    for (double r : roots) {
        double c1 = std::norm(atomic_state(std::sqrt(p.mu1 * 0.6), std::sqrt(p.mu2), 0, 0, p.delta2, p.delta3, r).c1);
        if (c1 > best) best = c1, lbest = r;
    }
    EXPECT_NEAR(l, lbest, 1e-12);
}

TEST(Hamiltonian, CoefficientsAreExactPolynomialInJ) {
    MediumParams p = detuned();
    p.delta_k = 0.07;
    p.N = 1.5;
    BoundaryFields b;
    b.eta10 = 0.8;
    b.eta20 = 1.3;
    double l = entrance_eigenvalue(p, b);
    auto c = mismatch_coefficients(p, l, b);
    for (double J : {0.05, 0.3, 0.7}) {
        double l0 = l + c.q * J;
        double W1 = std::sqrt(p.mu1 * (b.eta10 - J)), W2 = std::sqrt(p.mu2 * (b.eta20 - J)), W3 = std::sqrt(p.mu3 * J);
        double G = char_poly(l0, W1, W2, W3, 0.0, p.delta2, p.delta3);
        EXPECT_NEAR(G, c.A1 * J + c.A2 * J * J + c.A3 * J * J * J, 1e-14);
    }
    EXPECT_NEAR(c.a0, 3 * l * l + 2 * l * (p.delta2 + p.delta3) + p.delta2 * p.delta3 - p.mu1 * 0.8 - p.mu2 * 1.3, 1e-15);
    b.eta30 = 0.1;
    EXPECT_THROW(mismatch_coefficients(p, l, b), Error);
}

TEST(Hamiltonian, TurningPointIsRootOfExchangePolynomial) {
    MediumParams p = detuned();
    BoundaryFields b;
    b.eta10 = 0.6;
    auto s = solve(p, b);
    auto poly = exchange_polynomial(p, s.coeffs, b);
    EXPECT_EQ(poly.size(), 7u);
    EXPECT_NEAR(horner(poly, s.J1), 0.0, 1e-13);
    EXPECT_GT(horner(poly, 0.5 * s.J1), 0.0);
    EXPECT_LT(s.J1, std::min(b.eta10, b.eta20));
    EXPECT_GT(s.J2, std::max(b.eta10, b.eta20));
    EXPECT_NEAR(s.J1 * s.J2, b.eta10 * b.eta20, 1e-15);
}

TEST(Hamiltonian, ImplicitDistanceRoundTrip) {
    MediumParams p = detuned();
    BoundaryFields b;
    b.eta10 = 0.6;
    auto s = solve(p, b);
    EXPECT_FALSE(s.monotone);
    EXPECT_NEAR(implicit_distance(s.J1, s), s.z_quarter, 1e-12 * s.z_quarter);
    for (double f : {0.0, 0.1, 0.5, 0.9, 0.999}) {
        double J = f * s.J1;
        double z = implicit_distance(J, s);
        EXPECT_NEAR(exchange_at(z, s).J, J, 1e-12);
    }
    EXPECT_THROW(implicit_distance(1.1 * s.J1, s), Error);
    EXPECT_THROW(exchange_at(-1.0, s), Error);
}

TEST(Hamiltonian, ExchangeIsPeriodicAndMirrored) {
    MediumParams p = detuned();
    BoundaryFields b;
    b.eta10 = 0.6;
    auto s = solve(p, b);
    double T = s.period();
    for (double z : {0.3, 2.0, 7.7}) {
        EXPECT_NEAR(exchange_at(z + T, s).J, exchange_at(z, s).J, 1e-12);
        EXPECT_NEAR(exchange_at(T - z, s).J, exchange_at(z, s).J, 1e-12);
    }
    EXPECT_NEAR(exchange_at(s.z_quarter, s).J, s.J1, 1e-13);
    EXPECT_NEAR(exchange_at(T, s).J, 0.0, 1e-12);
}

TEST(Hamiltonian, MatchedEitIsMonotone) {
    MediumParams p;
    BoundaryFields b;
    auto s = solve(p, b);
    EXPECT_TRUE(s.monotone);
    EXPECT_TRUE(std::isinf(s.period()));
    EXPECT_DOUBLE_EQ(s.J1, 1.0);
    double prev = -1;
    for (double z = 0; z < 60; z += 2) {
        double J = exchange_at(z, s).J;
        EXPECT_GT(J, prev);
        EXPECT_LT(J, 1.0);
        prev = J;
    }
}

TEST(Hamiltonian, SamplingCarriesFluxesAndStates) {
    MediumParams p;
    BoundaryFields b;
    auto s = solve(p, b);
    auto tr = sample(s, {0.0, 10.0, 30.0});
    ASSERT_EQ(tr.size(), 3u);
    for (const auto& pt : tr) {
        EXPECT_NEAR(pt.eta1 + pt.eta3, b.eta10, 1e-15);
        EXPECT_NEAR(pt.eta2 + pt.eta3, b.eta20, 1e-15);
        EXPECT_NEAR(pt.state.norm2(), 1.0, 1e-14);
    }
    // populations move from |1> toward |2>
    EXPECT_GT(std::norm(tr[0].state.c1), 0.9);
    EXPECT_GT(std::norm(tr[2].state.c2), 0.9);
}

TEST(Hamiltonian, OnePumpAbsentIsTrivial) {
    MediumParams p;
    BoundaryFields b;
    b.eta10 = 0.0;
    auto s = solve(p, b);
    EXPECT_TRUE(s.trivial);
    EXPECT_DOUBLE_EQ(exchange_at(5.0, s).J, 0.0);
}
