#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "duet/errors.hpp"
#include "duet/model.hpp"

using namespace duet;
constexpr double pi = std::numbers::pi;

TEST_CASE("diagonalize: decoupled identical oscillators") {
    auto nb = diagonalize({1.0, 1.0, 0.0, 0.0});
    CHECK(nb.omega_plus == doctest::Approx(1.0));
    CHECK(nb.omega_minus == doctest::Approx(1.0));
    CHECK(nb.lambda_angle == 0.0);
}

TEST_CASE("diagonalize: symmetric pair gives lambda = pi/4") {
    auto nb = diagonalize({1.0, 1.0, 1.0, 0.0});
    CHECK(nb.lambda_angle == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK(nb.omega_plus * nb.omega_plus == doctest::Approx(3.0));
    CHECK(nb.omega_minus * nb.omega_minus == doctest::Approx(1.0));
}

TEST_CASE("diagonalize: agrees with a dense eigensolver") {
    SystemParams p{2.0, 1.0, 1.0, 0.3};
    auto nb = diagonalize(p);
    Eigen::SelfAdjointEigenSolver<Mat2> es(frequency_matrix(p));
    CHECK(nb.omega_minus * nb.omega_minus == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-13));
    CHECK(nb.omega_plus * nb.omega_plus == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-13));
    // eigenvector of Omega_+^2 is the first row of V
    Eigen::Vector2d v = nb.rotation.row(0).transpose();
    CHECK(std::abs(std::abs(v.dot(es.eigenvectors().col(1))) - 1.0) < 1e-12);
    CHECK(nb.psi_angle == nb.lambda_angle + p.theta);
}

TEST_CASE("diagonalize: rotation, trace and determinant invariants on random params") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.1, 3.0), th(0.0, 2 * pi);
    for (int i = 0; i < 200; ++i) {
        SystemParams p{u(rng), u(rng), u(rng) - 0.1, th(rng)};
        auto nb = diagonalize(p);
        const Mat2 O2 = frequency_matrix(p);
        const Mat2 D = nb.rotation * O2 * nb.rotation.transpose();
        CHECK(std::abs(D(0, 1)) < 1e-10);
        CHECK(D(0, 0) == doctest::Approx(nb.omega_plus * nb.omega_plus).epsilon(1e-10));
        CHECK(D(1, 1) == doctest::Approx(nb.omega_minus * nb.omega_minus).epsilon(1e-10));
        CHECK((nb.rotation.transpose() * nb.rotation - Mat2::Identity()).norm() < 1e-12);
        const double a2 = p.omega_a * p.omega_a, b2 = p.omega_b * p.omega_b, o2 = p.omega_c * p.omega_c;
        CHECK(std::abs(nb.omega_plus * nb.omega_plus + nb.omega_minus * nb.omega_minus - (a2 + b2 + 2 * o2)) <
              1e-12 * (a2 + b2 + 2 * o2));
        CHECK(std::abs(nb.omega_plus * nb.omega_plus * nb.omega_minus * nb.omega_minus -
                       ((a2 + o2) * (b2 + o2) - o2 * o2)) < 1e-10);
        CHECK(nb.lambda_angle >= 0.0);
        CHECK(nb.lambda_angle <= pi / 2);
        CHECK(nb.omega_plus >= nb.omega_minus);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(diagonalize({-1.0, 1.0, 0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(diagonalize({1.0, 1.0, 0.0, 7.0}), ConfigError);
    CHECK_THROWS_AS(renormalized_basis(1.0, 2.5, 0.0), StabilityError);
    BathSpec b = BathSpec::sharp(0.1, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("renormalized basis") {
    auto nb = renormalized_basis(1.0, 0.25, pi / 4);
    CHECK(nb.omega_plus == doctest::Approx(0.875));
    CHECK(nb.omega_minus == doctest::Approx(1.125));
    CHECK(nb.psi_angle == pi / 4);
}

TEST_CASE("counterterms: examples") {
    auto same = counterterms(BathSpec::sharp(0.1, 100), BathSpec::sharp(0.1, 100), 0.7);
    CHECK(std::abs(same.d_pm) < 1e-15);
    CHECK(same.d_pp == doctest::Approx(20.0 / pi));
    CHECK(same.d_mm == doctest::Approx(20.0 / pi));

    auto b1 = BathSpec::sharp(0.1, 100), b2 = BathSpec::sharp(0.01, 100);
    auto z = counterterms(b1, b2, 0.0);
    CHECK(z.d_pp == doctest::Approx(20.0 / pi));
    CHECK(z.d_mm == doctest::Approx(2.0 / pi));
    CHECK(z.d_pm == 0.0);

    auto q = counterterms(b1, b2, pi / 4);
    CHECK(q.d_pm == doctest::Approx(9.0 / pi).epsilon(1e-14));
    CHECK(q.d_pp == doctest::Approx(11.0 / pi).epsilon(1e-14));

    // equal gamma*Lambda products cancel the cross term
    auto e = counterterms(BathSpec::sharp(0.2, 50), BathSpec::sharp(0.1, 100), 1.1);
    CHECK(std::abs(e.d_pm) < 1e-14);
    CHECK((q.matrix() - q.matrix().transpose()).norm() == 0.0);
}

TEST_CASE("counterterms: linear and pi-periodic in psi") {
    auto b1 = BathSpec::drude(0.3, 40), b2 = BathSpec::sharp(0.05, 80);
    for (double psi : {0.1, 0.8, 2.0}) {
        auto a = counterterms(b1, b2, psi), b = counterterms(b1, b2, psi + pi);
        CHECK((a.matrix() - b.matrix()).norm() < 1e-12);
        auto b1x2 = b1, b2x2 = b2;
        b1x2.gamma *= 2;
        b2x2.gamma *= 2;
        CHECK((counterterms(b1x2, b2x2, psi).matrix() - 2 * a.matrix()).norm() < 1e-12);
    }
}

TEST_CASE("bath directions are the columns of V(psi)") {
    const Mat2 V = rotation_matrix(0.4);
    CHECK((bath_direction(1, 0.4) - V.col(0)).norm() < 1e-15);
    CHECK((bath_direction(2, 0.4) - V.col(1)).norm() < 1e-15);
}
