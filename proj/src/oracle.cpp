#include "duet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duet/errors.hpp"
#include "duet/spectral.hpp"

namespace duet {

namespace {
constexpr double pi = std::numbers::pi;
}

double DiscretizedBath::recurrence_time() const { return spacing > 0.0 ? 2.0 * pi / spacing : 0.0; }

double DiscretizedBath::static_susceptibility() const {
    double s = 0.0;
    for (int k = 0; k < count(); ++k) s += couplings[k] * couplings[k] / (frequencies[k] * frequencies[k]);
    return s;
}

DiscretizedBath discretize(const BathSpec& bath, int n, double omega_max) {
    bath.validate();
    if (n < 2) throw DomainError("discretize needs at least two modes");
    if (!(omega_max > 0.0)) throw DomainError("omega_max must be positive");
    if (!bath.strict_ohmic && bath.family == CutoffFamily::SharpCutoff && omega_max > bath.lambda_cut * (1 + 1e-12))
        throw DomainError("omega_max exceeds the sharp cutoff");
    DiscretizedBath d;
    d.spacing = omega_max / n;
    for (int k = 1; k <= n; ++k) {
        const double w = (k - 0.5) * d.spacing;
        d.frequencies.push_back(w);
        d.couplings.push_back(std::sqrt(2.0 * w * spectral_density(bath, w) * d.spacing / pi));
    }
    return d;
}

double default_omega_max(const BathSpec& bath, double W) {
    if (!bath.strict_ohmic && bath.family == CutoffFamily::SharpCutoff) return bath.lambda_cut;
    const double w = 20.0 * std::max(W, bath.lambda_cut);
    return bath.strict_ohmic ? 20.0 * W : std::min(w, spectral_support(bath));
}

CountertermMatrix discrete_counterterms(const DiscretizedBath& b1, const DiscretizedBath& b2, double psi) {
    const double d1 = b1.static_susceptibility(), d2 = b2.static_susceptibility();
    const double c = std::cos(psi), s = std::sin(psi);
    return {c * c * d1 + s * s * d2, s * s * d1 + c * c * d2, c * s * (d1 - d2)};
}

QuadraticForm build_hamiltonian(const NormalModeBasis& nb, const CountertermMatrix& ct, const DiscretizedBath& b1,
                                const DiscretizedBath& b2, double psi) {
    QuadraticForm H;
    H.n1 = b1.count();
    H.n2 = b2.count();
    const int M = 2 + H.n1 + H.n2;
    H.K = Eigen::MatrixXd::Zero(M, M);
    H.K.topLeftCorner<2, 2>() = nb.frequency_sq() + ct.matrix();
    const double c = std::cos(psi), s = std::sin(psi);
    // -B_1 (c q_+ + s q_-) - B_2 (-s q_+ + c q_-)
    for (int k = 0; k < H.n1; ++k) {
        const int i = 2 + k;
        H.K(i, i) = b1.frequencies[k] * b1.frequencies[k];
        H.K(0, i) = H.K(i, 0) = -b1.couplings[k] * c;
        H.K(1, i) = H.K(i, 1) = -b1.couplings[k] * s;
    }
    for (int k = 0; k < H.n2; ++k) {
        const int i = 2 + H.n1 + k;
        H.K(i, i) = b2.frequencies[k] * b2.frequencies[k];
        H.K(0, i) = H.K(i, 0) = b2.couplings[k] * s;
        H.K(1, i) = H.K(i, 1) = -b2.couplings[k] * c;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(H.K);
    if (llt.info() != Eigen::Success) throw StabilityError("unstable discretization: quadratic form is not positive definite");
    return H;
}

CovarianceState initial_state(const NormalModeBasis& nb, const DiscretizedBath& b1, const DiscretizedBath& b2,
                              double T1, double T2) {
    const int M = 2 + b1.count() + b2.count();
    CovarianceState st;
    st.mean = Eigen::VectorXd::Zero(2 * M);
    st.cov = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    const double om[2] = {nb.omega_plus, nb.omega_minus};
    for (int a = 0; a < 2; ++a) {
        st.cov(a, a) = 0.5 / om[a];
        st.cov(M + a, M + a) = 0.5 * om[a];
    }
    auto fill = [&](const DiscretizedBath& b, double T, int offset) {
        for (int k = 0; k < b.count(); ++k) {
            const double w = b.frequencies[k];
            const double h = occupation(T, w) + 0.5;
            st.cov(offset + k, offset + k) = h / w;
            st.cov(M + offset + k, M + offset + k) = h * w;
        }
    };
    fill(b1, T1, 2);
    fill(b2, T2, 2 + b1.count());
    return st;
}

Eigen::MatrixXd symplectic_form(int m) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    J.topRightCorner(m, m).setIdentity();
    J.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    return J;
}

Propagator::Propagator(const QuadraticForm& H, double recurrence_time) : m_(H.size()), recurrence_(recurrence_time) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.K);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of the quadratic form failed", 0.0);
    if (es.eigenvalues().minCoeff() <= 0.0) throw StabilityError("quadratic form has a non-positive eigenvalue");
    U_ = es.eigenvectors();
    omega_ = es.eigenvalues().cwiseSqrt();
}

Eigen::MatrixXd Propagator::S(double t) const {
    const Eigen::ArrayXd c = (omega_.array() * t).cos(), s = (omega_.array() * t).sin();
    Eigen::MatrixXd out(2 * m_, 2 * m_);
    out.topLeftCorner(m_, m_) = U_ * c.matrix().asDiagonal() * U_.transpose();
    out.topRightCorner(m_, m_) = U_ * (s / omega_.array()).matrix().asDiagonal() * U_.transpose();
    out.bottomLeftCorner(m_, m_) = -U_ * (s * omega_.array()).matrix().asDiagonal() * U_.transpose();
    out.bottomRightCorner(m_, m_) = out.topLeftCorner(m_, m_);
    return out;
}

CovarianceState Propagator::evolve(const CovarianceState& st, double t) const {
    const Eigen::MatrixXd s = S(t);
    CovarianceState out;
    out.mean = s * st.mean;
    out.cov = s * st.cov * s.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    out.time = st.time + t;
    out.recurrence_exceeded = st.recurrence_exceeded || beyond_recurrence(out.time);
    return out;
}

void Propagator::prepare(const CovarianceState& init) {
    cov0_modes_.resize(2 * m_, 2 * m_);
    const auto& C = init.cov;
    cov0_modes_.topLeftCorner(m_, m_) = U_.transpose() * C.topLeftCorner(m_, m_) * U_;
    cov0_modes_.topRightCorner(m_, m_) = U_.transpose() * C.topRightCorner(m_, m_) * U_;
    cov0_modes_.bottomLeftCorner(m_, m_) = cov0_modes_.topRightCorner(m_, m_).transpose();
    cov0_modes_.bottomRightCorner(m_, m_) = U_.transpose() * C.bottomRightCorner(m_, m_) * U_;
    prepared_ = true;
}

Eigen::MatrixXd Propagator::mode_covariance(double t) const {
    if (!prepared_) throw DomainError("Propagator::prepare must be called before the fast paths");
    const Eigen::ArrayXd c = (omega_.array() * t).cos(), s = (omega_.array() * t).sin();
    const Eigen::ArrayXd a = c, b = s / omega_.array(), g = -s * omega_.array();
    auto outer = [](const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) { return (x.matrix() * y.matrix().transpose()).array(); };
    const Eigen::ArrayXXd Qq = cov0_modes_.topLeftCorner(m_, m_).array();
    const Eigen::ArrayXXd Qp = cov0_modes_.topRightCorner(m_, m_).array();
    const Eigen::ArrayXXd Pq = cov0_modes_.bottomLeftCorner(m_, m_).array();
    const Eigen::ArrayXXd Pp = cov0_modes_.bottomRightCorner(m_, m_).array();
    // q' -> a q' + b p', p' -> g q' + a p'
    Eigen::MatrixXd out(2 * m_, 2 * m_);
    out.topLeftCorner(m_, m_) = (outer(a, a) * Qq + outer(a, b) * Qp + outer(b, a) * Pq + outer(b, b) * Pp).matrix();
    out.topRightCorner(m_, m_) = (outer(a, g) * Qq + outer(a, a) * Qp + outer(b, g) * Pq + outer(b, a) * Pp).matrix();
    out.bottomLeftCorner(m_, m_) = out.topRightCorner(m_, m_).transpose();
    out.bottomRightCorner(m_, m_) = (outer(g, g) * Qq + outer(g, a) * Qp + outer(a, g) * Pq + outer(a, a) * Pp).matrix();
    return out;
}

Eigen::Matrix4d Propagator::system_covariance(double t) const {
    const Eigen::MatrixXd C = mode_covariance(t);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(4, 2 * m_);
    P.block(0, 0, 2, m_) = U_.topRows(2);
    P.block(2, m_, 2, m_) = U_.topRows(2);
    return P * C * P.transpose();
}

Eigen::Matrix2cd Propagator::system_two_time(double t, double tau) const {
    const Eigen::MatrixXd C = mode_covariance(t);
    const Eigen::ArrayXd c = (omega_.array() * tau).cos(), s = (omega_.array() * tau).sin();
    // rows of P_q S'(tau) in mode coordinates
    Eigen::MatrixXd A(2, 2 * m_);
    A.leftCols(m_) = U_.topRows(2) * c.matrix().asDiagonal();
    A.rightCols(m_) = U_.topRows(2) * (s / omega_.array()).matrix().asDiagonal();
    Eigen::MatrixXd Pq = Eigen::MatrixXd::Zero(2, 2 * m_);
    Pq.leftCols(m_) = U_.topRows(2);
    const Eigen::Matrix2d re = A * C * Pq.transpose();
    // (i/2) A J Pq^T: J maps the q-columns of Pq^T to -p rows
    const Eigen::Matrix2d im = -0.5 * A.rightCols(m_) * U_.topRows(2).transpose();
    return re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
}

double extract(const CovarianceState& st, OracleQuantity which) {
    const int M = static_cast<int>(st.cov.rows()) / 2;
    switch (which) {
        case OracleQuantity::QQ_pp: return st.cov(0, 0);
        case OracleQuantity::QQ_mm: return st.cov(1, 1);
        case OracleQuantity::QQ_pm: return st.cov(0, 1);
        case OracleQuantity::PP_pp: return st.cov(M, M);
        case OracleQuantity::PP_mm: return st.cov(M + 1, M + 1);
        case OracleQuantity::PP_pm: return st.cov(M, M + 1);
    }
    return 0.0;
}

double uncertainty_margin(const Eigen::MatrixXd& cov) {
    const int m = static_cast<int>(cov.rows()) / 2;
    const Eigen::MatrixXcd H = cov.cast<cplx>() + cplx(0.0, 0.5) * symplectic_form(m).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double symplectic_defect(const Eigen::MatrixXd& S) {
    const Eigen::MatrixXd J = symplectic_form(static_cast<int>(S.rows()) / 2);
    return (S.transpose() * J * S - J).cwiseAbs().maxCoeff();
}

double purity(const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(2.0 * cov);
    if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return std::exp(-0.5 * logdet);
}

double log_negativity(const Eigen::Matrix4d& cov) {
    if (uncertainty_margin(cov) < -1e-8) throw DomainError("covariance violates the uncertainty bound");
    Eigen::Matrix4d pt = cov;
    pt.row(3) *= -1.0;
    pt.col(3) *= -1.0;
    const Eigen::MatrixXd J = symplectic_form(2);
    const Eigen::VectorXcd ev = (J * pt).eigenvalues();
    double nu = ev.cwiseAbs().minCoeff();
    return std::max(0.0, -std::log(2.0 * nu));
}

double log_negativity(const CovarianceState& st) {
    const int M = static_cast<int>(st.cov.rows()) / 2;
    const int idx[4] = {0, 1, M, M + 1};
    Eigen::Matrix4d c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c(i, j) = st.cov(idx[i], idx[j]);
    return log_negativity(c);
}

}  // namespace duet
