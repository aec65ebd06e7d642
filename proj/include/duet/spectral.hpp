#pragma once

#include <complex>

#include "duet/model.hpp"
#include "duet/quadrature.hpp"

namespace duet {

using cplx = std::complex<double>;

struct SelfEnergy {
    double re = 0.0;
    double im = 0.0;
};

// sigma_j(omega) = Im chi_j(omega); odd in omega.
double spectral_density(const BathSpec& bath, double omega);

// chi_j(omega) on the real axis. Sharp cutoff requires |omega| < Lambda.
SelfEnergy self_energy(const BathSpec& bath, double omega);

// Re chi_j(omega) from the subtracted Kramers-Kronig integral
// -(2/pi) int_0^inf [sigma(w') w' - sigma(omega) omega] / (w'^2 - omega^2) dw'.
double self_energy_real_quadrature(const BathSpec& bath, double omega, const quad::Options& opt = {});

// Bose factor 1/(e^{omega/T} - 1); at T = 0 returns -Theta(-omega).
double occupation(double temperature, double omega);

// Laplace-domain self-energy with the counterterm added, Sigma_j(s) + delta_j,
// analytic for Re s > 0. Strict Ohmic: gamma s.
cplx laplace_self_energy(const BathSpec& bath, cplx s);

// (1/pi) int sigma(w) n(w) e^{i w dt} dw over the bath support.
cplx noise_kernel(const BathSpec& bath, double dt, const quad::Options& opt = {});

// Upper end of the spectral support used for quadratures.
double spectral_support(const BathSpec& bath);

}  // namespace duet
