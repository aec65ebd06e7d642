#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "duet/model.hpp"
#include "duet/quadrature.hpp"

namespace duet {

using cplx = std::complex<double>;
using CMat2 = Eigen::Matrix2cd;

enum class GreensRegime { NumericBromwich, StrongDelta0, OneBath, WeakCoupling, StrongDetunedPerturbative };

struct LaplaceScalars {
    cplx wp2, wm2;  // W_+^2(s), W_-^2(s) (without s^2)
    cplx m2;        // M^2(s)
    cplx theta2;    // Theta^2(s)
    cplx rho, alpha, beta;
};

// G(s) for the renormalized two-mode system; the counterterm is folded into
// the bath self-energies so Sigma_j(0) + delta_j = 0.
class LaplaceMatrix {
public:
    LaplaceMatrix(const NormalModeBasis& basis, const BathSpec& bath1, const BathSpec& bath2);

    CMat2 inverse(cplx s) const;  // G^{-1}(s) assembled directly
    LaplaceScalars scalars(cplx s) const;
    CMat2 operator()(cplx s) const;  // projector form, direct inversion when rho ~ 0

    // Strict Ohmic and Drude self-energies are rational in s.
    bool meromorphic() const;
    // Poles of G(s): eigenvalues of the linearized first-order system when
    // meromorphic, otherwise Newton on det G^{-1} seeded at +-i Omega_pm.
    std::vector<cplx> poles() const;

    const NormalModeBasis& basis() const { return basis_; }
    const BathSpec& bath(int j) const { return j == 1 ? b1_ : b2_; }

private:
    NormalModeBasis basis_;
    BathSpec b1_, b2_;
    Eigen::Vector2d u1_, u2_;
};

struct GreensPair {
    Mat2 g = Mat2::Zero();     // G(t)
    Mat2 gdot = Mat2::Zero();  // dG/dt
};

// Throws StabilityError if a pole sits in the right half plane.
void check_stability(const LaplaceMatrix& mat);

// Slowest relaxation rate, -max Re(pole); zero signals an undamped mode.
double slowest_decay_rate(const LaplaceMatrix& mat);

// R(omega) = G(s = -i omega + 0) from the real-axis self-energies.
CMat2 retarded_response(const LaplaceMatrix& mat, double omega);

GreensPair greens_numeric(const LaplaceMatrix& mat, double t, const quad::Options& opt = {});

GreensPair greens_strong_delta0(double W, double psi, double gamma1, double gamma2, double t);
GreensPair greens_one_bath(double W, double psi, double gamma1, double t);
// Leading order in gamma/|Delta|, gamma/W; derivative also taken at leading order.
GreensPair greens_weak(double W, double Delta, double psi, double gamma1, double gamma2, double t);

// Damped single-mode propagator e^{-g t/2} sin(W_g t)/W_g with its derivative;
// sinh continuation above critical damping.
void damped_mode(double W, double gamma, double t, double& g, double& gdot);

struct WeakModes {
    double omega_plus, omega_minus;  // W -+ Delta/2
    double gamma_plus, gamma_minus;  // Gamma_pm
};
WeakModes weak_modes(double W, double Delta, double psi, double gamma1, double gamma2);

class GreensKernel {
public:
    GreensKernel(GreensRegime regime, const NormalModeBasis& basis, const BathSpec& bath1, const BathSpec& bath2);

    GreensPair operator()(double t) const;
    GreensRegime regime() const { return regime_; }
    double W() const { return W_; }
    double Delta() const { return Delta_; }
    double psi() const { return psi_; }
    double gamma1() const { return g1_; }
    double gamma2() const { return g2_; }

private:
    GreensRegime regime_;
    double W_, Delta_, psi_, g1_, g2_;
    LaplaceMatrix mat_;
};

// Single damped mode coupled to one sharp finite band (counterterm included):
// G(t) from the spectral function on [0, Lambda], sum-rule checked.
class FiniteBandMode {
public:
    FiniteBandMode(double W, const BathSpec& bath);
    // Im of 1/(W^2 - w^2 + K(-i w + 0)) on the band
    double spectral(double w) const;
    void evaluate(double t, double& g, double& gdot, const quad::Options& opt = {}) const;
    double sum_rule(const quad::Options& opt = {}) const;

private:
    double W_;
    BathSpec bath_;
};

}  // namespace duet
