#include "duet/model.hpp"

#include <cmath>
#include <numbers>

#include "duet/errors.hpp"

namespace duet {

void SystemParams::validate() const {
    if (!(omega_a > 0.0) || !(omega_b > 0.0))
        throw ConfigError("oscillator frequencies must be positive");
    if (!(omega_c >= 0.0))
        throw ConfigError("inter-oscillator coupling must be non-negative");
    if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi))
        throw ConfigError("theta must lie in [0, 2pi)");
}

BathSpec BathSpec::strict(double gamma, double temperature, double lambda_cut) {
    BathSpec b;
    b.gamma = gamma;
    b.temperature = temperature;
    b.lambda_cut = lambda_cut;
    b.strict_ohmic = true;
    return b;
}

BathSpec BathSpec::sharp(double gamma, double lambda_cut, double temperature) {
    BathSpec b;
    b.gamma = gamma;
    b.lambda_cut = lambda_cut;
    b.temperature = temperature;
    return b;
}

BathSpec BathSpec::drude(double gamma, double lambda_cut, double temperature) {
    BathSpec b = sharp(gamma, lambda_cut, temperature);
    b.family = CutoffFamily::Drude;
    return b;
}

void BathSpec::validate() const {
    if (!(gamma >= 0.0)) throw ConfigError("bath gamma must be >= 0");
    if (!(lambda_cut > 0.0) || !std::isfinite(lambda_cut))
        throw ConfigError("bath lambda_cut must be finite and > 0 (use strict_ohmic for the infinite-bandwidth limit)");
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw ConfigError("bath temperature must be finite and >= 0");
}

Mat2 NormalModeBasis::frequency_sq() const {
    Mat2 m = Mat2::Zero();
    m(0, 0) = omega_plus * omega_plus;
    m(1, 1) = omega_minus * omega_minus;
    return m;
}

Mat2 CountertermMatrix::matrix() const {
    Mat2 m;
    m << d_pp, d_pm, d_pm, d_mm;
    return m;
}

Mat2 rotation_matrix(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat2 v;
    v << c, -s, s, c;
    return v;
}

Mat2 frequency_matrix(const SystemParams& p) {
    const double o2 = p.omega_c * p.omega_c;
    Mat2 m;
    m << p.omega_a * p.omega_a + o2, -o2, -o2, p.omega_b * p.omega_b + o2;
    return m;
}

NormalModeBasis diagonalize(const SystemParams& p) {
    p.validate();
    const double a2 = p.omega_a * p.omega_a, b2 = p.omega_b * p.omega_b;
    const double o2 = p.omega_c * p.omega_c;
    const double r = std::sqrt((a2 - b2) * (a2 - b2) + 4.0 * o2 * o2);
    const double mean = 0.5 * (a2 + b2 + 2.0 * o2);
    const double wp2 = mean + 0.5 * r;
    const double wm2 = mean - 0.5 * r;
    if (!(wm2 > 0.0)) throw StabilityError("normal-mode frequency squared is not positive");

    double lambda = 0.0;
    if (r > 0.0) {
        // 2 lambda = atan2(sin 2l, cos 2l) with sin 2l >= 0, hence in [0, pi]
        lambda = 0.5 * std::atan2(2.0 * o2 / r, (a2 - b2) / r);
    }

    NormalModeBasis nb;
    nb.omega_plus = std::sqrt(wp2);
    nb.omega_minus = std::sqrt(wm2);
    nb.w_mean = 0.5 * (nb.omega_plus + nb.omega_minus);
    nb.detuning = nb.omega_minus - nb.omega_plus;
    nb.lambda_angle = lambda;
    nb.psi_angle = lambda + p.theta;
    nb.rotation = rotation_matrix(lambda);
    return nb;
}

NormalModeBasis renormalized_basis(double w_mean, double detuning, double psi) {
    if (!(w_mean > 0.0)) throw ConfigError("W must be positive");
    NormalModeBasis nb;
    nb.w_mean = w_mean;
    nb.detuning = detuning;
    nb.omega_plus = w_mean - 0.5 * detuning;
    nb.omega_minus = w_mean + 0.5 * detuning;
    if (!(nb.omega_plus > 0.0) || !(nb.omega_minus > 0.0))
        throw StabilityError("renormalized normal-mode frequency W -+ Delta/2 is not positive");
    nb.lambda_angle = 0.0;
    nb.psi_angle = psi;
    nb.rotation = Mat2::Identity();
    return nb;
}

double counterterm_shift(const BathSpec& bath) {
    const double g = bath.gamma, L = bath.lambda_cut;
    if (bath.strict_ohmic) return 2.0 * g * L / std::numbers::pi;
    switch (bath.family) {
        case CutoffFamily::SharpCutoff: return 2.0 * g * L / std::numbers::pi;
        case CutoffFamily::Drude: return g * L;
        case CutoffFamily::Exponential: return 2.0 * g * L / std::numbers::pi;
    }
    return 0.0;
}

CountertermMatrix counterterms(const BathSpec& bath1, const BathSpec& bath2, double psi) {
    const double d1 = counterterm_shift(bath1), d2 = counterterm_shift(bath2);
    const double c = std::cos(psi), s = std::sin(psi);
    CountertermMatrix ct;
    ct.d_pp = c * c * d1 + s * s * d2;
    ct.d_mm = s * s * d1 + c * c * d2;
    ct.d_pm = c * s * (d1 - d2);
    return ct;
}

Eigen::Vector2d bath_direction(int j, double psi) {
    const double c = std::cos(psi), s = std::sin(psi);
    if (j == 1) return {c, s};
    return {-s, c};
}

}  // namespace duet
