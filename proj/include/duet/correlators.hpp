#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "duet/greens.hpp"
#include "duet/model.hpp"
#include "duet/quadrature.hpp"

namespace duet {

enum class CorrelatorKind { QQ_pp, QQ_mm, QQ_pm, PP_pp, PP_mm, PP_pm };
enum class SeriesSource { InitialCondition, Noise, Total };

struct CorrelationSeries {
    std::vector<double> tau;
    std::vector<cplx> values;
    CorrelatorKind kind = CorrelatorKind::QQ_pm;
    SeriesSource source = SeriesSource::Noise;
};

const char* kind_name(CorrelatorKind k);
const char* source_name(SeriesSource s);

// ---- initial-condition (system ground state) contributions ----

// <q_a(t) q_b(t)>_0 for a system prepared in the ground state of diag(Omega_+, Omega_-).
CMat2 initial_moments(const GreensPair& g, double omega_plus, double omega_minus);

// (sin 2psi / 4W)[(G1'^2 + W^2 G1^2) - (G2'^2 + W^2 G2^2)]; StrongDelta0 or OneBath kernels.
double coherence_initial_strong(const GreensKernel& kernel, double t);

// First order in gamma/Delta: beats between the normal modes.
cplx coherence_initial_weak(double W, double Delta, double psi, double gamma1, double gamma2, double t);

// ---- residue engine ----
//
// I_m(tau) = int dw/pi gamma w^{1+m} n(w) e^{i w tau} / (D_a(w) E_b(w)),
// D_a = (w - i G_a/2)^2 - O_a^2 (zeros above the axis), E_b = (w + i G_b/2)^2 - O_b^2.
struct ResonancePair {
    cplx omega_a;  // may be imaginary (overdamped)
    double gamma_a;
    cplx omega_b;
    double gamma_b;
};

struct SeriesOptions {
    double rel_tol = 1e-13;
    long max_terms = 2000000;
};

cplx resonance_integral(int m, double tau, double gamma, double temperature, const ResonancePair& rp,
                        const SeriesOptions& opt = {});
// Same integral by direct quadrature on the real axis (fallback and cross-check).
cplx resonance_integral_quadrature(int m, double tau, double gamma, double temperature, const ResonancePair& rp,
                                   const quad::Options& opt = {});

cplx F_function(const BathSpec& bath, double W, double tau);
cplx H_function(const BathSpec& bath, double W, double tau);
// Zero-temperature coincidence value (gamma/pi) ln(Lambda/W) - ..., valid to O(W^2/Lambda^2).
double H_zero_T_coincidence(double gamma, double W, double lambda_cut);

enum class Branch { Plus, Minus };
// J^{(j)}_{ab}(tau) with the weak-coupling resonances; m = 2 gives the momentum analogue.
cplx J_function(const BathSpec& bath, Branch a, Branch b, const WeakModes& modes, double tau, int m = 0);

// ---- stationary correlators ----

struct StationaryValues {
    cplx qq_pp, qq_mm, qq_pm;
    cplx pp_pp, pp_mm, pp_pm;
    bool has_momenta = false;
};

StationaryValues stationary_strong(const NormalModeBasis& basis, const BathSpec& bath1, const BathSpec& bath2,
                                   double tau, bool momenta = false);
StationaryValues stationary_weak(const NormalModeBasis& basis, const BathSpec& bath1, const BathSpec& bath2,
                                 double tau, bool momenta = false);
// Exact stationary correlators from the retarded response, by frequency quadrature.
StationaryValues stationary_numeric(const LaplaceMatrix& mat, double tau, bool momenta = false,
                                    const quad::Options& opt = {});

// tau grid -> three series (pp, mm, pm) of the chosen family
std::array<CorrelationSeries, 3> stationary_series(const std::function<StationaryValues(double)>& eval,
                                                   const std::vector<double>& taus, bool momenta);

// ---- high-temperature limits ----

struct Triple {
    double pp, mm, pm;
};
std::pair<double, double> effective_temperatures(double psi, double T1, double T2);
Triple high_t_strong(double W, double psi, double T1, double T2);
Triple high_t_weak(const WeakModes& modes, double W, double Delta, double psi, double gamma1, double gamma2,
                   double T1, double T2);
double equilibrium_coherence_weak(double W, double Delta, double psi, double gamma1, double gamma2, double T);

// ---- finite-time noise contribution ----

struct FiniteTimeOptions {
    double dt = 0.01;
    int n_freq = 8001;  // Simpson nodes per bath band
};

// <q_a(t) q_b(t)>_xi for t in `times` (ascending), given G(u) on [0, max t].
// Needs finite-band baths.
std::vector<CMat2> finite_time_noise(const std::function<Mat2(double)>& green, const BathSpec& bath1,
                                     const BathSpec& bath2, double psi, const std::vector<double>& times,
                                     const FiniteTimeOptions& opt = {});

// Equal-time <q_+(t) q_-(t)> (initial + noise) for Delta = 0 and sharp finite bands:
// each bath-basis mode evolves with its own finite-band response.
std::vector<cplx> finite_band_total_coherence(double W, double psi, const BathSpec& bath1, const BathSpec& bath2,
                                              const std::vector<double>& times, const FiniteTimeOptions& opt = {});

}  // namespace duet
