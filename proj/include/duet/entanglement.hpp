#pragma once

#include <complex>
#include <vector>

#include "duet/model.hpp"
#include "duet/quadrature.hpp"

namespace duet {

using cplx = std::complex<double>;

// <b_+(t1) b_-(t2)> in the joint bath vacuum, dt = t1 - t2:
// sin(psi) cos(psi) (1/pi) int_0^inf [sigma_1 - sigma_2](w) e^{-i w dt} dw.
cplx bath_difference_kernel(const BathSpec& bath1, const BathSpec& bath2, double psi, double dt,
                            const quad::Options& opt = {});

struct SecondOrderOptions {
    // add the off-diagonal counterterm -delta_{+-} q_+ q_- to the perturbation
    bool include_counterterm = false;
    quad::Options quad{1e-14, 1e-10, 20000, false};
};

// <q_+(t) q_-(t)> to second order in the system-bath coupling, both baths at T = 0,
// system and baths starting in their vacua.
cplx second_order_coherence(const NormalModeBasis& basis, const BathSpec& bath1, const BathSpec& bath2, double t,
                            const SecondOrderOptions& opt = {});

struct PerturbativeCoherence {
    std::vector<double> t;
    std::vector<cplx> values;
    double growth_exponent = 0.0;  // slope of ln|value| vs ln t
    double amplitude = 0.0;        // |value| ~ amplitude * t^growth_exponent
};

PerturbativeCoherence second_order_series(const NormalModeBasis& basis, const BathSpec& bath1,
                                          const BathSpec& bath2, const std::vector<double>& times,
                                          const SecondOrderOptions& opt = {});

// Least-squares power law y = a x^p on positive data; returns {p, a}.
std::pair<double, double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// exp[z0, ..., z_{n-1}] for n = 2 or 3 nodes
cplx exp_divided_difference(const std::vector<cplx>& nodes);

}  // namespace duet
