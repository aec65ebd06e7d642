#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "duet/model.hpp"

namespace duet {

using cplx = std::complex<double>;

// Equal-spacing midpoint sampling of one bath on (0, omega_max].
struct DiscretizedBath {
    std::vector<double> frequencies;
    std::vector<double> couplings;
    double spacing = 0.0;

    int count() const { return static_cast<int>(frequencies.size()); }
    // dynamics reproduce the continuum only for t < 2 pi / spacing
    double recurrence_time() const;
    // sum_k C_k^2 / W_k^2, the discrete counterterm
    double static_susceptibility() const;
};

DiscretizedBath discretize(const BathSpec& bath, int n_modes, double omega_max);
// bath Lambda for sharp bands, else 20 max(W, Lambda) capped by the spectral support
double default_omega_max(const BathSpec& bath, double W);

// sum_j chi_j(0) u_j u_j^T with the discrete static susceptibilities
CountertermMatrix discrete_counterterms(const DiscretizedBath& b1, const DiscretizedBath& b2, double psi);

// H = p^T p / 2 + q^T K q / 2 on coordinates (q_+, q_-, Q_{1,k}, Q_{2,k})
struct QuadraticForm {
    Eigen::MatrixXd K;
    int n1 = 0, n2 = 0;
    int size() const { return static_cast<int>(K.rows()); }
};

QuadraticForm build_hamiltonian(const NormalModeBasis& basis, const CountertermMatrix& ct, const DiscretizedBath& b1,
                                const DiscretizedBath& b2, double psi);

// x = (q_1..q_M, p_1..p_M); cov holds symmetrized second moments
struct CovarianceState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double time = 0.0;
    bool recurrence_exceeded = false;
};

CovarianceState initial_state(const NormalModeBasis& basis, const DiscretizedBath& b1, const DiscretizedBath& b2,
                              double T1, double T2);

// J = [[0, I], [-I, 0]]
Eigen::MatrixXd symplectic_form(int modes);

// Exact propagator of a positive-definite quadratic form, from one eigendecomposition.
class Propagator {
public:
    explicit Propagator(const QuadraticForm& H, double recurrence_time = 0.0);

    const Eigen::VectorXd& frequencies() const { return omega_; }
    Eigen::MatrixXd S(double t) const;  // 2M x 2M
    CovarianceState evolve(const CovarianceState& s, double t) const;

    // Fast paths that never form the full 2M x 2M matrices in the physical basis.
    // Initial state is the one passed to prepare().
    void prepare(const CovarianceState& initial);
    Eigen::Matrix4d system_covariance(double t) const;  // (q_+, q_-, p_+, p_-)
    // <q_a(t + tau) q_b(t)> for a, b in {+, -}
    Eigen::Matrix2cd system_two_time(double t, double tau) const;

    bool beyond_recurrence(double t) const { return recurrence_ > 0.0 && t >= recurrence_; }

private:
    Eigen::MatrixXd mode_covariance(double t) const;  // cov in mode coordinates

    int m_;
    Eigen::MatrixXd U_;  // K = U diag(omega^2) U^T
    Eigen::VectorXd omega_;
    double recurrence_;
    Eigen::MatrixXd cov0_modes_;
    bool prepared_ = false;
};

enum class OracleQuantity { QQ_pp, QQ_mm, QQ_pm, PP_pp, PP_mm, PP_pm };
double extract(const CovarianceState& s, OracleQuantity which);

// smallest eigenvalue of cov + iJ/2 (>= 0 for physical states)
double uncertainty_margin(const Eigen::MatrixXd& cov);
// max |S^T J S - J|
double symplectic_defect(const Eigen::MatrixXd& S);
// 1 / sqrt(det(2 cov))
double purity(const Eigen::MatrixXd& cov);

// two-mode covariance in (q_1, q_2, p_1, p_2) order
double log_negativity(const Eigen::Matrix4d& cov);
double log_negativity(const CovarianceState& s);

}  // namespace duet
