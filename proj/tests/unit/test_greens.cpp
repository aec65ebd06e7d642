#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "duet/errors.hpp"
#include "duet/greens.hpp"

using namespace duet;
constexpr double pi = std::numbers::pi;

namespace {

// exp(A t) of the first-order system; strict Ohmic or Drude (auxiliary z_j) baths
GreensPair expm_oracle(const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, double t) {
    const BathSpec* bs[2] = {&b1, &b2};
    int nz = 0;
    for (auto* b : bs) nz += (!b->strict_ohmic && b->gamma > 0);
    const int n = 4 + nz;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    A(0, 2) = A(1, 3) = 1.0;
    A(2, 0) = -nb.omega_plus * nb.omega_plus;
    A(3, 1) = -nb.omega_minus * nb.omega_minus;
    int iz = 4;
    for (int j = 0; j < 2; ++j) {
        const double c = std::cos(nb.psi_angle), s = std::sin(nb.psi_angle);
        Eigen::Vector2d u = j == 0 ? Eigen::Vector2d(c, s) : Eigen::Vector2d(-s, c);
        if (bs[j]->gamma == 0) continue;
        if (bs[j]->strict_ohmic) {
            A.block(2, 2, 2, 2) -= bs[j]->gamma * u * u.transpose();
        } else {
            A.block(2, iz, 2, 1) = -u;
            A.block(iz, 2, 1, 2) = bs[j]->gamma * bs[j]->lambda_cut * u.transpose();
            A(iz, iz) = -bs[j]->lambda_cut;
            ++iz;
        }
    }
    Eigen::MatrixXd E = (A * t).exp();
    return {E.block(0, 2, 2, 2), E.block(2, 2, 2, 2)};
}

}  // namespace

TEST_CASE("Laplace matrix: decoupled oscillators") {
    auto nb = renormalized_basis(1.0, 0.3, 0.4);
    LaplaceMatrix m(nb, BathSpec::strict(0, 0), BathSpec::strict(0, 0));
    const cplx s(0.3, 1.7);
    CMat2 g = m(s);
    CHECK(std::abs(g(0, 0) - 1.0 / (s * s + 0.85 * 0.85)) < 1e-14);
    CHECK(std::abs(g(1, 1) - 1.0 / (s * s + 1.15 * 1.15)) < 1e-14);
    CHECK(std::abs(g(0, 1)) < 1e-15);
}

TEST_CASE("Laplace matrix: Delta = 0 off-diagonal structure") {
    const double W = 1.0, g1 = 0.2, g2 = 0.07;
    LaplaceMatrix m(renormalized_basis(W, 0.0, pi / 4), BathSpec::strict(g1, 0), BathSpec::strict(g2, 0));
    for (cplx s : {cplx(0.1, 0.5), cplx(1.0, -2.0), cplx(0.01, 1.0)}) {
        const cplx expect = (s * (g2 - g1) / 2.0) / ((s * s + W * W + s * g1) * (s * s + W * W + s * g2));
        CHECK(std::abs(m(s)(0, 1) - expect) < 1e-13 * std::abs(expect) + 1e-15);
    }
}

TEST_CASE("Laplace matrix: projector form equals direct inverse; alpha^2 + beta^2 = 1") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-3, 3), up(0.01, 3);
    const BathSpec pairs[3][2] = {{BathSpec::strict(0.3, 0), BathSpec::strict(0.05, 0)},
                                  {BathSpec::sharp(0.2, 20), BathSpec::drude(0.1, 8)},
                                  {BathSpec::drude(0.4, 3), BathSpec::strict(0.0, 0)}};
    for (auto& pr : pairs) {
        LaplaceMatrix m(renormalized_basis(1.0, 0.4, 0.9), pr[0], pr[1]);
        for (int i = 0; i < 20; ++i) {
            const cplx s(up(rng), u(rng));
            const CMat2 g = m(s);
            CHECK((g * m.inverse(s) - CMat2::Identity()).norm() < 1e-10);
            auto k = m.scalars(s);
            if (std::abs(k.rho) > 1e-8) CHECK(std::abs(k.alpha * k.alpha + k.beta * k.beta - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("closed forms: initial conditions in every regime") {
    const double W = 1.0;
    for (double t : {0.0}) {
        for (auto gp : {greens_strong_delta0(W, 0.7, 0.1, 0.03, t), greens_one_bath(W, 0.7, 0.1, t),
                        greens_weak(W, 0.25, 0.7, 0.05, 0.005, t), greens_strong_delta0(W, 0.7, 3.0, 2.0, t)}) {
            CHECK(gp.g.norm() < 1e-10);
            CHECK((gp.gdot - Mat2::Identity()).norm() < 1e-10);
        }
    }
    LaplaceMatrix m(renormalized_basis(W, 0.4, 0.3), BathSpec::strict(0.2, 0), BathSpec::strict(0.1, 0));
    auto gn = greens_numeric(m, 0.0);
    CHECK(gn.g.norm() == 0.0);
    auto small = greens_numeric(m, 1e-6);
    CHECK((small.gdot - Mat2::Identity()).norm() < 1e-5);
    CHECK((small.g - 1e-6 * Mat2::Identity()).norm() < 1e-10);
}

TEST_CASE("strong Delta = 0: identical baths, first zero, two equivalent forms") {
    const double W = 1.0;
    auto same = greens_strong_delta0(W, 0.8, 0.1, 0.1, 3.3);
    CHECK(std::abs(same.g(0, 1)) < 1e-15);
    CHECK(same.g(0, 0) == doctest::Approx(same.g(1, 1)));
    const double W1 = std::sqrt(1 - 0.0025);
    double g1, d1;
    damped_mode(W, 0.1, pi / W1, g1, d1);
    CHECK(std::abs(g1) < 1e-15);

    // 1/2 (G1 + G2) 1 + 1/2 (G1 - G2) R with R = [[cos2psi, sin2psi],[sin2psi, -cos2psi]]
    const double t = 5, psi = pi / 4;
    double G1, G2, dd;
    damped_mode(W, 0.1, t, G1, dd);
    damped_mode(W, 0.03, t, G2, dd);
    Mat2 R;
    R << std::cos(2 * psi), std::sin(2 * psi), std::sin(2 * psi), -std::cos(2 * psi);
    const Mat2 alt = 0.5 * (G1 + G2) * Mat2::Identity() + 0.5 * (G1 - G2) * R;
    CHECK((greens_strong_delta0(W, psi, 0.1, 0.03, t).g - alt).norm() < 1e-14);
}

TEST_CASE("overdamped continuation is smooth through critical damping") {
    double a, da, b, db, c, dc;
    damped_mode(1.0, 2.0 - 1e-7, 2.0, a, da);
    damped_mode(1.0, 2.0, 2.0, b, db);
    damped_mode(1.0, 2.0 + 1e-7, 2.0, c, dc);
    CHECK(std::abs(a - b) < 1e-6);
    CHECK(std::abs(c - b) < 1e-6);
    CHECK(std::abs(dc - db) < 1e-6);
}

TEST_CASE("one bath: gamma2 -> 0 limit and the surviving mode") {
    const double W = 1.0, psi = 0.6;
    for (double t : {0.5, 7.0, 40.0}) {
        auto a = greens_one_bath(W, psi, 0.1, t), b = greens_strong_delta0(W, psi, 0.1, 1e-12, t);
        CHECK((a.g - b.g).norm() < 1e-10);
    }
    // gamma1 t >> 1: G -> u2 u2^T sin(Wt)/W; amplitude (1/2 +- 1/2 cos 2psi)/W
    double amp00 = 0, amp11 = 0;
    for (double t = 400; t < 410; t += 0.01) {
        auto g = greens_one_bath(W, psi, 0.1, t).g;
        amp00 = std::max(amp00, std::abs(g(0, 0)));
        amp11 = std::max(amp11, std::abs(g(1, 1)));
    }
    CHECK(amp00 == doctest::Approx((0.5 - 0.5 * std::cos(2 * psi)) / W).epsilon(1e-4));
    CHECK(amp11 == doctest::Approx((0.5 + 0.5 * std::cos(2 * psi)) / W).epsilon(1e-4));
}

TEST_CASE("weak coupling: structure") {
    auto same = greens_weak(1.0, 0.25, 0.7, 0.03, 0.03, 12.0);
    CHECK(same.g(0, 1) == 0.0);
    auto z = greens_weak(1.0, 0.25, 0.0, 0.05, 0.005, 12.0);
    CHECK(z.g(0, 1) == 0.0);
    auto m = weak_modes(1.0, 0.25, 0.0, 0.05, 0.005);
    CHECK(m.gamma_plus == 0.05);
    CHECK(m.gamma_minus == 0.005);
}

TEST_CASE("numeric Bromwich vs matrix exponential (strict Ohmic and Drude)") {
    struct Case {
        double W, D, psi;
        BathSpec b1, b2;
    };
    std::vector<Case> cases{{1.0, 0.3, 0.4, BathSpec::strict(0.2, 0), BathSpec::strict(0.05, 0)},
                            {1.0, 0.0, pi / 4, BathSpec::strict(0.1, 0), BathSpec::strict(0.0, 0)},
                            {1.0, 0.6, 1.1, BathSpec::drude(0.15, 6), BathSpec::drude(0.05, 10)},
                            {1.0, 0.2, 0.3, BathSpec::strict(2.5, 0), BathSpec::strict(0.4, 0)}};
    for (auto& c : cases) {
        auto nb = renormalized_basis(c.W, c.D, c.psi);
        LaplaceMatrix m(nb, c.b1, c.b2);
        for (double t : {0.05, 1.0, 7.3, 30.0, 100.0}) {
            auto a = greens_numeric(m, t, {1e-13, 1e-11});
            auto b = expm_oracle(nb, c.b1, c.b2, t);
            CHECK((a.g - b.g).norm() < 1e-8);
            CHECK((a.gdot - b.gdot).norm() < 1e-8);
        }
    }
}

TEST_CASE("regime cross-validation: Delta = 0 closed form vs numeric on [0, 50/W]") {
    const double W = 1.0, psi = pi / 4;
    for (auto [g1, g2] : {std::pair{0.1, 0.03}, std::pair{0.1, 0.0}, std::pair{0.5, 2.6}}) {
        LaplaceMatrix m(renormalized_basis(W, 0, psi), BathSpec::strict(g1, 0), BathSpec::strict(g2, 0));
        for (double t = 0; t <= 50; t += 2.5) {
            auto a = greens_numeric(m, t), b = greens_strong_delta0(W, psi, g1, g2, t);
            CHECK((a.g - b.g).cwiseAbs().maxCoeff() < 1e-6);
            CHECK((a.gdot - b.gdot).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("weak coupling closed form vs numeric") {
    const double W = 1.0, D = 0.25, psi = pi / 4, g1 = 0.05, g2 = 0.005;
    LaplaceMatrix m(renormalized_basis(W, D, psi), BathSpec::strict(g1, 0), BathSpec::strict(g2, 0));
    auto a = greens_numeric(m, 20.0), b = greens_weak(W, D, psi, g1, g2, 20.0);
    CHECK(std::abs(a.g(0, 1) - b.g(0, 1)) < 5e-3);
    // diagonal entries drift through the O(gamma^2) pole shift, bounded by |d omega| t / Omega
    double shift = 0;
    for (cplx z : m.poles())
        if (z.imag() > 0) shift = std::max({shift, std::abs(z.imag() - 0.875), std::abs(z.imag() - 1.125)});
    CHECK((a.g - b.g).cwiseAbs().maxCoeff() < 1.5 * shift * 20.0 / 0.875);
    // residual scales as gamma^2: shrink both by 4
    LaplaceMatrix m4(renormalized_basis(W, D, psi), BathSpec::strict(g1 / 4, 0), BathSpec::strict(g2 / 4, 0));
    double r1 = 0, r4 = 0;
    for (double t = 1; t < 20; t += 0.5) {
        r1 = std::max(r1, (greens_numeric(m, t).g - greens_weak(W, D, psi, g1, g2, t).g).cwiseAbs().maxCoeff());
        r4 = std::max(r4,
                      (greens_numeric(m4, t).g - greens_weak(W, D, psi, g1 / 4, g2 / 4, t).g).cwiseAbs().maxCoeff());
    }
    CHECK(r4 < r1 / 8);
}

TEST_CASE("stability: poles in the closed left half plane for gamma >= 0") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> g(0, 1.5), d(-0.9, 0.9), p(0, pi);
    for (int i = 0; i < 40; ++i) {
        LaplaceMatrix m(renormalized_basis(1.0, d(rng), p(rng)), BathSpec::strict(g(rng), 0),
                        BathSpec::drude(g(rng), 5 + 10 * g(rng)));
        CHECK_NOTHROW(check_stability(m));
        for (cplx z : m.poles()) CHECK(z.real() <= 1e-12);
    }
    LaplaceMatrix sh(renormalized_basis(1.0, 0.3, 0.5), BathSpec::sharp(0.1, 20), BathSpec::sharp(0.04, 20));
    auto ps = sh.poles();
    CHECK(ps.size() >= 4);
    for (cplx z : ps) {
        CHECK(z.real() < 0);
        CHECK(std::abs(sh.inverse(z).determinant()) < 1e-10);
    }
}

TEST_CASE("slowest decay rate") {
    LaplaceMatrix m(renormalized_basis(1.0, 0.0, 0.4), BathSpec::strict(0.1, 0), BathSpec::strict(0.03, 0));
    CHECK(slowest_decay_rate(m) == doctest::Approx(0.015).epsilon(1e-10));
    LaplaceMatrix u(renormalized_basis(1.0, 0.0, 0.4), BathSpec::strict(0.1, 0), BathSpec::strict(0.0, 0));
    CHECK(slowest_decay_rate(u) < 1e-12);
}

TEST_CASE("sharp band: axis inversion, bath-basis decoupling at Delta = 0") {
    const double W = 1.0, psi = 0.5;
    auto b1 = BathSpec::sharp(0.1, 20), b2 = BathSpec::sharp(0.03, 20);
    LaplaceMatrix m(renormalized_basis(W, 0, psi), b1, b2);
    FiniteBandMode f1(W, b1), f2(W, b2);
    CHECK(f1.sum_rule() == doctest::Approx(1.0).epsilon(1e-6));
    const Mat2 V = rotation_matrix(psi);
    for (double t : {0.5, 3.0, 25.0}) {
        double g1, d1, g2, d2;
        f1.evaluate(t, g1, d1);
        f2.evaluate(t, g2, d2);
        const Mat2 ref = V * Eigen::Vector2d(g1, g2).asDiagonal() * V.transpose();
        CHECK((greens_numeric(m, t).g - ref).norm() < 1e-7);
    }
    // close to strict Ohmic for a wide band, up to O(gamma W^2/Lambda) frequency shifts
    auto wide = BathSpec::sharp(0.1, 2000);
    FiniteBandMode fw(W, wide);
    double g, d, gs, ds;
    fw.evaluate(4.0, g, d);
    damped_mode(W, 0.1, 4.0, gs, ds);
    CHECK(std::abs(g - gs) < 1e-3);
    LaplaceMatrix one(renormalized_basis(W, 0, psi), b1, BathSpec::sharp(0, 20));
    CHECK_THROWS_AS(greens_numeric(one, 1.0), DomainError);
}

TEST_CASE("kernel regimes dispatch and validate") {
    auto nb0 = renormalized_basis(1.0, 0.0, pi / 4);
    auto nb1 = renormalized_basis(1.0, 0.25, pi / 4);
    auto s1 = BathSpec::strict(0.1, 0), s2 = BathSpec::strict(0.03, 0), z = BathSpec::strict(0, 0);
    CHECK_THROWS_AS(GreensKernel(GreensRegime::StrongDelta0, nb1, s1, s2), DomainError);
    CHECK_THROWS_AS(GreensKernel(GreensRegime::OneBath, nb0, s1, s2), DomainError);
    GreensKernel k(GreensRegime::OneBath, nb0, s1, z);
    CHECK((k(3.0).g - greens_one_bath(1.0, pi / 4, 0.1, 3.0).g).norm() == 0.0);
    GreensKernel n(GreensRegime::NumericBromwich, nb0, s1, s2);
    CHECK((n(3.0).g - greens_strong_delta0(1.0, pi / 4, 0.1, 0.03, 3.0).g).norm() < 1e-8);
}
