#include "duet/spectral.hpp"

#include <cmath>
#include <numbers>

#include "duet/errors.hpp"

namespace duet {

namespace {
constexpr double pi = std::numbers::pi;
}

double spectral_density(const BathSpec& b, double w) {
    if (b.strict_ohmic) return b.gamma * w;
    const double L = b.lambda_cut;
    switch (b.family) {
        case CutoffFamily::SharpCutoff: return std::abs(w) < L ? b.gamma * w : 0.0;
        case CutoffFamily::Drude: return b.gamma * w * L * L / (L * L + w * w);
        case CutoffFamily::Exponential: return b.gamma * w * std::exp(-std::abs(w) / L);
    }
    return 0.0;
}

SelfEnergy self_energy(const BathSpec& b, double w) {
    const double g = b.gamma, L = b.lambda_cut;
    if (b.strict_ohmic) return {-2.0 * g * L / pi, g * w};
    switch (b.family) {
        case CutoffFamily::SharpCutoff:
            if (std::abs(w) >= L) throw DomainError("sharp-cutoff self-energy requires |omega| < Lambda");
            return {-2.0 * g * L / pi - (w * g / pi) * std::log(std::abs((L - w) / (L + w))), g * w};
        case CutoffFamily::Drude: return {-g * L * L * L / (L * L + w * w), spectral_density(b, w)};
        case CutoffFamily::Exponential:
            return {self_energy_real_quadrature(b, w), spectral_density(b, w)};
    }
    return {};
}

double self_energy_real_quadrature(const BathSpec& b, double w, const quad::Options& opt) {
    if (b.strict_ohmic) throw DomainError("strict-Ohmic Re chi is the counterterm constant, no integral");
    const double w0 = std::abs(w);
    const double g0 = spectral_density(b, w0) * w0;
    auto f = [&](double x) {
        const double d = x * x - w0 * w0;
        if (std::abs(x - w0) < 1e-9 * (1.0 + w0)) {
            // removable point: derivative of sigma(x) x over 2x
            const double h = 1e-5 * (1.0 + w0);
            const double dg = (spectral_density(b, w0 + h) * (w0 + h) - spectral_density(b, w0 - h) * (w0 - h)) / (2 * h);
            return dg / (2.0 * w0);
        }
        return (spectral_density(b, x) * x - g0) / d;
    };
    std::vector<double> br{w0};
    double acc = 0.0;
    if (b.family == CutoffFamily::SharpCutoff) {
        const double L = b.lambda_cut;
        if (w0 >= L) throw DomainError("sharp-cutoff self-energy requires |omega| < Lambda");
        acc = quad::integrate(f, 0.0, L, opt, br).value;
        // beyond the band only the subtraction survives: -g0 int_L^inf dx/(x^2 - w0^2)
        if (w0 > 0.0) acc += g0 / (2.0 * w0) * std::log((L - w0) / (L + w0));
    } else {
        acc = quad::integrate_to_infinity(f, 0.0, opt, br).value;
    }
    return -2.0 / pi * acc;
}

double occupation(double T, double w) {
    if (w == 0.0) throw DomainError("Bose occupation has a pole at omega = 0");
    if (T == 0.0) return w < 0.0 ? -1.0 : 0.0;
    return 1.0 / std::expm1(w / T);
}

cplx laplace_self_energy(const BathSpec& b, cplx s) {
    const double g = b.gamma, L = b.lambda_cut;
    if (b.strict_ohmic) return g * s;
    switch (b.family) {
        case CutoffFamily::SharpCutoff: return g * s - (2.0 * g / pi) * s * std::atan(s / L);
        case CutoffFamily::Drude: return g * L * s / (L + s);
        case CutoffFamily::Exponential: {
            auto fr = [&](double w) { return cplx(std::exp(-w / L)) / (w * w + s * s); };
            quad::Options o;
            o.abs_tol = 1e-14;
            o.rel_tol = 1e-11;
            const cplx I = quad::integrate_to_infinity(fr, 0.0, o, {std::abs(s.imag()), L}).value;
            return (2.0 * g / pi) * s * s * I;
        }
    }
    return 0.0;
}

double spectral_support(const BathSpec& b) {
    if (b.strict_ohmic) throw DomainError("strict-Ohmic bath has unbounded spectral support");
    switch (b.family) {
        case CutoffFamily::SharpCutoff: return b.lambda_cut;
        case CutoffFamily::Drude: return 2000.0 * b.lambda_cut;
        case CutoffFamily::Exponential: return 45.0 * b.lambda_cut;
    }
    return b.lambda_cut;
}

cplx noise_kernel(const BathSpec& b, double dt, const quad::Options& opt) {
    if (b.gamma == 0.0) return 0.0;
    if (b.strict_ohmic) throw DomainError("noise kernel needs a finite bandwidth");
    const double T = b.temperature;
    const double top = spectral_support(b);
    // sharp band: closed interval, so the endpoint sample is not cut to zero
    auto sigma = [&](double w) {
        return b.family == CutoffFamily::SharpCutoff ? b.gamma * w : spectral_density(b, w);
    };
    // fold omega < 0 onto omega > 0: sigma(-w) n(-w) = sigma(w) (1 + n(w))
    auto amp_pos = [&](double w) {
        if (T == 0.0) return 0.0;
        if (w == 0.0) return b.gamma * T;
        return sigma(w) / std::expm1(w / T);
    };
    auto amp_neg = [&](double w) {
        if (w == 0.0) return T > 0.0 ? b.gamma * T : 0.0;
        return sigma(w) * (1.0 + (T > 0.0 ? 1.0 / std::expm1(w / T) : 0.0));
    };
    const double lam_eff = b.family == CutoffFamily::SharpCutoff ? b.lambda_cut : top;
    cplx val;
    if (std::abs(dt) * b.lambda_cut > 50.0) {
        auto fp = [&](double w) { return cplx(amp_pos(w)); };
        auto fn = [&](double w) { return cplx(amp_neg(w)); };
        val = quad::filon(fp, 0.0, lam_eff, dt, opt).value + quad::filon(fn, 0.0, lam_eff, -dt, opt).value;
    } else {
        auto f = [&](double w) {
            return amp_pos(w) * std::exp(cplx(0.0, w * dt)) + amp_neg(w) * std::exp(cplx(0.0, -w * dt));
        };
        std::vector<double> br;
        if (T > 0.0) br.push_back(std::min(T, lam_eff / 2));
        if (b.family != CutoffFamily::SharpCutoff) br.push_back(b.lambda_cut);
        val = quad::integrate(f, 0.0, lam_eff, opt, br).value;
    }
    return val / pi;
}

}  // namespace duet
