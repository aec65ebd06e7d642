#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duet/entanglement.hpp"
#include "duet/errors.hpp"
#include "duet/oracle.hpp"

using namespace duet;
constexpr double pi = std::numbers::pi;

namespace {

struct Setup {
    DiscretizedBath d1, d2;
    NormalModeBasis nb;
    QuadraticForm H;
    CovarianceState st;
};

Setup make(double W, double D, double psi, const BathSpec& b1, const BathSpec& b2, int n, double wmax,
           bool counterterms = true) {
    Setup s;
    s.d1 = discretize(b1, n, wmax);
    s.d2 = discretize(b2, n, wmax);
    s.nb = renormalized_basis(W, D, psi);
    const CountertermMatrix ct = counterterms ? discrete_counterterms(s.d1, s.d2, psi) : CountertermMatrix{};
    s.H = build_hamiltonian(s.nb, ct, s.d1, s.d2, psi);
    s.st = initial_state(s.nb, s.d1, s.d2, b1.temperature, b2.temperature);
    return s;
}

}  // namespace

TEST_CASE("discretize: couplings, spectral reconstruction, counterterm sum") {
    const DiscretizedBath z = discretize(BathSpec::sharp(0.0, 20.0), 50, 20.0);
    CHECK(std::all_of(z.couplings.begin(), z.couplings.end(), [](double c) { return c == 0.0; }));

    const BathSpec b = BathSpec::sharp(0.1, 20.0);
    const DiscretizedBath d = discretize(b, 400, 20.0);
    CHECK(d.count() == 400);
    CHECK(d.recurrence_time() == doctest::Approx(2 * pi / 0.05));
    // binned (pi/2) sum C_k^2 / W_k vs int sigma over each bin
    const double bin = 1.0;
    double err = 0.0, norm = 0.0;
    for (int k = 0; k < 20; ++k) {
        double rec = 0.0;
        for (int i = 0; i < d.count(); ++i)
            if (d.frequencies[i] >= k * bin && d.frequencies[i] < (k + 1) * bin)
                rec += 0.5 * pi * d.couplings[i] * d.couplings[i] / d.frequencies[i];
        const double target = 0.1 * 0.5 * ((k + 1) * (k + 1) - k * k) * bin * bin;
        err += std::abs(rec - target);
        norm += target;
    }
    CHECK(err / norm < 0.01);
    CHECK(d.static_susceptibility() == doctest::Approx(2 * 0.1 * 20.0 / pi).epsilon(1e-12));
    CHECK_THROWS_AS(discretize(b, 1, 20.0), DomainError);
    CHECK_THROWS_AS(discretize(b, 10, 30.0), DomainError);
}

TEST_CASE("quadratic form: decoupled spectrum and coupling pattern") {
    const Setup s = make(1.0, 0.4, 0.3, BathSpec::sharp(0.0, 5.0), BathSpec::sharp(0.0, 5.0), 8, 5.0);
    Propagator P(s.H);
    std::vector<double> want{s.nb.omega_plus, s.nb.omega_minus};
    for (double w : s.d1.frequencies) want.push_back(w);
    for (double w : s.d2.frequencies) want.push_back(w);
    std::sort(want.begin(), want.end());
    for (int i = 0; i < P.frequencies().size(); ++i) CHECK(P.frequencies()(i) == doctest::Approx(want[i]).epsilon(1e-12));

    const Setup z = make(1.0, 0.0, 0.0, BathSpec::sharp(0.1, 5.0), BathSpec::sharp(0.2, 5.0), 6, 5.0);
    for (int k = 0; k < 6; ++k) {
        CHECK(z.H.K(1, 2 + k) == 0.0);  // q_- blind to bath 1
        CHECK(z.H.K(0, 8 + k) == doctest::Approx(0.0));  // q_+ blind to bath 2
        CHECK(z.H.K(0, 2 + k) < 0.0);
    }
}

TEST_CASE("counterterm restores the renormalized system frequency") {
    const double g = 0.01, L = 5.0;
    auto system_like = [](const QuadraticForm& H) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.K);
        int best = 0;
        for (int i = 0; i < H.size(); ++i)
            if (std::abs(es.eigenvectors()(0, i)) > std::abs(es.eigenvectors()(0, best))) best = i;
        return std::sqrt(es.eigenvalues()(best));
    };
    const Setup on = make(1.0, 0.6, 0.0, BathSpec::sharp(g, L), BathSpec::sharp(0.0, L), 400, L, true);
    const Setup off = make(1.0, 0.6, 0.0, BathSpec::sharp(g, L), BathSpec::sharp(0.0, L), 400, L, false);
    const double shift = system_like(on.H) - system_like(off.H);
    const double first_order = 2 * g * L / pi / (2 * on.nb.omega_plus);
    CHECK(shift == doctest::Approx(first_order).epsilon(0.05));
    CHECK(system_like(on.H) == doctest::Approx(on.nb.omega_plus).epsilon(2e-3));
}

TEST_CASE("initial state moments") {
    const Setup s = make(1.0, 0.2, 0.5, BathSpec::sharp(0.1, 5.0, 0.0), BathSpec::sharp(0.1, 5.0, 500.0), 10, 5.0);
    const int M = s.H.size();
    for (int k = 2; k < 12; ++k) CHECK(s.st.cov(k, k) * s.st.cov(M + k, M + k) == doctest::Approx(0.25));
    for (int k = 12; k < M; ++k) {
        const double w = s.d2.frequencies[k - 12];
        CHECK(s.st.cov(k, k) == doctest::Approx(500.0 / (w * w)).epsilon(1e-3));
    }
    CHECK(extract(s.st, OracleQuantity::QQ_pm) == 0.0);
    CHECK(extract(s.st, OracleQuantity::QQ_pp) == doctest::Approx(0.5 / s.nb.omega_plus));
    CHECK(extract(s.st, OracleQuantity::PP_mm) == doctest::Approx(0.5 * s.nb.omega_minus));
}

TEST_CASE("propagator: symplectic, commutators, fast paths equal full evolution") {
    const Setup s = make(1.0, 0.3, 0.7, BathSpec::sharp(0.2, 6.0, 0.4), BathSpec::sharp(0.05, 6.0, 0.1), 30, 6.0);
    Propagator P(s.H, s.d1.recurrence_time());
    P.prepare(s.st);
    const int M = s.H.size();
    const Eigen::MatrixXd J = symplectic_form(M);
    for (double t : {0.5, 7.0, 50.0}) {
        const Eigen::MatrixXd S = P.S(t);
        CHECK(symplectic_defect(S) < 1e-10);
        CHECK((S * J * S.transpose())(0, M) == doctest::Approx(1.0).epsilon(1e-12));
        const CovarianceState e = P.evolve(s.st, t);
        const Eigen::Matrix4d fast = P.system_covariance(t);
        const int idx[4] = {0, 1, M, M + 1};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(fast(i, j) == doctest::Approx(e.cov(idx[i], idx[j])).epsilon(1e-10));
        CHECK(uncertainty_margin(e.cov) > -1e-8);
        // two-time from the full propagator
        const double tau = 1.3;
        const Eigen::MatrixXcd full =
            P.S(tau).cast<cplx>() * (e.cov.cast<cplx>() + cplx(0, 0.5) * J.cast<cplx>());
        const Eigen::Matrix2cd two = P.system_two_time(t, tau);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) CHECK(std::abs(two(a, b) - full(a, b)) < 1e-10);
    }
    CHECK_FALSE(P.evolve(s.st, 10.0).recurrence_exceeded);
    CHECK(P.evolve(s.st, 1.01 * s.d1.recurrence_time()).recurrence_exceeded);
}

TEST_CASE("decoupled vacuum is stationary; pure states stay pure") {
    const Setup s = make(1.0, 0.5, 0.4, BathSpec::sharp(0.0, 5.0), BathSpec::sharp(0.0, 5.0), 5, 5.0);
    Propagator P(s.H);
    P.prepare(s.st);
    const Eigen::Matrix4d c0 = P.system_covariance(0.0);
    CHECK((P.system_covariance(17.3) - c0).norm() < 1e-12);

    const Setup g = make(1.0, 0.0, 0.4, BathSpec::sharp(0.3, 8.0), BathSpec::sharp(0.1, 8.0), 60, 8.0);
    Propagator Q(g.H);
    const CovarianceState e = Q.evolve(g.st, 12.0);
    CHECK(purity(g.st.cov) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(purity(e.cov) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("logarithmic negativity") {
    Eigen::Matrix4d vac = 0.5 * Eigen::Matrix4d::Identity();
    CHECK(log_negativity(vac) == doctest::Approx(0.0));
    for (double r : {0.1, 0.5, 1.2}) {
        // (q1, q2, p1, p2): <q1 q1> = cosh 2r / 2, <q1 q2> = sinh 2r / 2, <p1 p2> = -sinh 2r / 2
        Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
        const double ch = 0.5 * std::cosh(2 * r), sh = 0.5 * std::sinh(2 * r);
        v(0, 0) = v(1, 1) = v(2, 2) = v(3, 3) = ch;
        v(0, 1) = v(1, 0) = sh;
        v(2, 3) = v(3, 2) = -sh;
        CHECK(log_negativity(v) == doctest::Approx(2 * r).epsilon(1e-10));
    }
    CHECK_THROWS_AS(log_negativity(Eigen::Matrix4d(0.1 * Eigen::Matrix4d::Identity())), DomainError);
}

TEST_CASE("oracle vs second-order coherence at early times") {
    const double L = 50.0;
    const BathSpec b1 = BathSpec::sharp(0.1, L), b2 = BathSpec::sharp(0.02, L);
    const Setup s = make(1.0, 0.2, pi / 4, b1, b2, 400, L);
    Propagator P(s.H);
    P.prepare(s.st);
    SecondOrderOptions o;
    o.include_counterterm = true;
    for (double t : {0.02, 0.05, 0.1}) {
        const double orc = P.system_covariance(t)(0, 1);
        const double so = second_order_coherence(s.nb, b1, b2, t, o).real();
        CAPTURE(t);
        CHECK(std::abs(orc - so) < 0.1 * std::abs(orc));
    }
}

TEST_CASE("one bath: initial-condition memory survives") {
    const double psi = pi / 4;
    const Setup s = make(1.0, 0.0, psi, BathSpec::sharp(0.1, 20.0), BathSpec::sharp(0.0, 20.0), 700, 20.0);
    Propagator P(s.H, s.d1.recurrence_time());
    // linear split: propagate the system block alone
    CovarianceState sys = s.st;
    const int M = s.H.size();
    for (int k = 2; k < M; ++k) sys.cov(k, k) = sys.cov(M + k, M + k) = 0.0;
    P.prepare(sys);
    CHECK_FALSE(P.beyond_recurrence(200.0));
    CHECK(P.system_covariance(200.0)(0, 1) == doctest::Approx(-std::sin(2 * psi) / 4.0).epsilon(0.03));
}

TEST_CASE("identical baths: no coherence, no entanglement") {
    const BathSpec b = BathSpec::sharp(0.2, 10.0, 0.5);
    const Setup s = make(1.0, 0.0, 0.6, b, b, 300, 10.0);
    Propagator P(s.H, s.d1.recurrence_time());
    P.prepare(s.st);
    for (double t : {3.0, 20.0, 60.0}) {
        const Eigen::Matrix4d c = P.system_covariance(t);
        CHECK(std::abs(c(0, 1)) < 1e-10);
        CHECK(log_negativity(c) == 0.0);
    }
}

TEST_CASE("high-temperature stationary coherence and N convergence") {
    const double psi = pi / 4, T1 = 60.0, T2 = 20.0;
    const BathSpec b1 = BathSpec::sharp(0.3, 20.0, T1), b2 = BathSpec::sharp(0.2, 20.0, T2);
    double prev = 0.0;
    for (int n : {400, 800}) {
        const Setup s = make(1.0, 0.0, psi, b1, b2, n, 20.0);
        Propagator P(s.H, s.d1.recurrence_time());
        P.prepare(s.st);
        CHECK_FALSE(P.beyond_recurrence(100.0));
        const double c = P.system_covariance(100.0)(0, 1);
        CHECK(c == doctest::Approx(std::sin(2 * psi) * (T1 - T2) / 2.0).epsilon(0.05));
        if (n == 800) CHECK(c == doctest::Approx(prev).epsilon(0.005));
        prev = c;
    }
}
