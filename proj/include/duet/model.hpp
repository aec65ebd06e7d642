#pragma once

#include <Eigen/Dense>

namespace duet {

using Mat2 = Eigen::Matrix2d;

struct SystemParams {
    double omega_a = 1.0;
    double omega_b = 1.0;
    double omega_c = 0.0;  // inter-oscillator coupling Omega
    double theta = 0.0;

    void validate() const;
};

enum class CutoffFamily { SharpCutoff, Drude, Exponential };

// strict_ohmic marks the infinite-bandwidth limit taken after the counterterm
// subtraction; lambda_cut then only sets the size of the (cancelled) shift.
struct BathSpec {
    double gamma = 0.0;
    double lambda_cut = 100.0;
    double temperature = 0.0;
    CutoffFamily family = CutoffFamily::SharpCutoff;
    bool strict_ohmic = false;

    static BathSpec strict(double gamma, double temperature, double lambda_cut = 1e4);
    static BathSpec sharp(double gamma, double lambda_cut, double temperature = 0.0);
    static BathSpec drude(double gamma, double lambda_cut, double temperature = 0.0);

    void validate() const;
};

struct NormalModeBasis {
    double omega_plus = 1.0;   // renormalized Omega_R+ = W - Delta/2
    double omega_minus = 1.0;  // renormalized Omega_R- = W + Delta/2
    double w_mean = 1.0;
    double detuning = 0.0;
    double lambda_angle = 0.0;
    double psi_angle = 0.0;
    Mat2 rotation = Mat2::Identity();  // V(lambda)

    Mat2 frequency_sq() const;  // diag(Omega_R+^2, Omega_R-^2)
};

struct CountertermMatrix {
    double d_pp = 0.0;
    double d_mm = 0.0;
    double d_pm = 0.0;

    Mat2 matrix() const;
};

// V(angle) = [[cos, -sin], [sin, cos]]
Mat2 rotation_matrix(double angle);

// Bare oscillator frequency matrix Omega^2 in the (q_a, q_b) basis.
Mat2 frequency_matrix(const SystemParams& params);

NormalModeBasis diagonalize(const SystemParams& params);

// Direct entry in the renormalized parameterization; lambda = 0 so psi = theta.
NormalModeBasis renormalized_basis(double w_mean, double detuning, double psi);

// delta Omega_j = -Re chi_j(0).
double counterterm_shift(const BathSpec& bath);

CountertermMatrix counterterms(const BathSpec& bath1, const BathSpec& bath2, double psi);

// Coupling directions of bath 1 and bath 2 in the (q+, q-) plane.
Eigen::Vector2d bath_direction(int j, double psi);

}  // namespace duet
