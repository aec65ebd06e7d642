#include "duet/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duet/errors.hpp"
#include "duet/spectral.hpp"

namespace duet {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I1(0.0, 1.0);

// (e^z - 1)/z
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-3) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return (std::exp(z) - 1.0) / z;
}

// exp[a, b]
cplx dd2(cplx a, cplx b) { return std::exp(a) * phi1(b - a); }

// t^{-2} int_0^t ds int_0^s ds' e^{A s + B s'} = exp[0, A t, (A + B) t]
cplx exponent_dd(cplx x, cplx y) { return exp_divided_difference({0.0, x, y}); }

void check_inputs(const BathSpec& b1, const BathSpec& b2) {
    for (const BathSpec* b : {&b1, &b2}) {
        b->validate();
        if (b->temperature != 0.0) throw DomainError("perturbative coherence is defined for zero-temperature baths");
        if (b->strict_ohmic) throw DomainError("perturbative coherence needs finite-band baths");
    }
}

double band_sigma(const BathSpec& b, double w) {
    if (b.gamma == 0.0) return 0.0;
    if (b.family == CutoffFamily::SharpCutoff) return w <= b.lambda_cut ? b.gamma * w : 0.0;
    return spectral_density(b, w);
}

std::vector<double> band_breaks(const BathSpec& b1, const BathSpec& b2, double top) {
    std::vector<double> br;
    for (const BathSpec* b : {&b1, &b2})
        if (b->gamma > 0.0 && b->lambda_cut < top) br.push_back(b->lambda_cut);
    return br;
}

double band_top(const BathSpec& b1, const BathSpec& b2) {
    double top = 0.0;
    for (const BathSpec* b : {&b1, &b2})
        if (b->gamma > 0.0) top = std::max(top, spectral_support(*b));
    return top;
}
}  // namespace

cplx exp_divided_difference(const std::vector<cplx>& z) {
    if (z.size() == 2) return dd2(z[0], z[1]);
    if (z.size() != 3) throw DomainError("exp_divided_difference supports 2 or 3 nodes");
    // divide by the widest pair to keep the cancellation mild
    int i0 = 0, i2 = 1;
    double best = -1.0;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (std::abs(z[a] - z[b]) > best) {
                best = std::abs(z[a] - z[b]);
                i0 = a;
                i2 = b;
            }
    const int i1 = 3 - i0 - i2;
    if (best < 1e-2) {
        const cplx m = (z[0] + z[1] + z[2]) / 3.0;
        const cplx d0 = z[0] - m, d1 = z[1] - m, d2 = z[2] - m;
        // e^m * sum_k h_k(d) / (k + 2)!, complete homogeneous polynomials
        const cplx h1 = d0 + d1 + d2;
        const cplx h2 = d0 * d0 + d1 * d1 + d2 * d2 + d0 * d1 + d0 * d2 + d1 * d2;
        cplx h3 = 0.0;
        const cplx d[3] = {d0, d1, d2};
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                for (int c = b; c < 3; ++c) h3 += d[a] * d[b] * d[c];
        return std::exp(m) * (0.5 + h1 / 6.0 + h2 / 24.0 + h3 / 120.0);
    }
    return (dd2(z[i1], z[i2]) - dd2(z[i0], z[i1])) / (z[i2] - z[i0]);
}

cplx bath_difference_kernel(const BathSpec& b1, const BathSpec& b2, double psi, double dt, const quad::Options& opt) {
    check_inputs(b1, b2);
    const double pref = std::sin(psi) * std::cos(psi) / pi;
    if (pref == 0.0 || (b1.gamma == 0.0 && b2.gamma == 0.0)) return 0.0;
    const double top = band_top(b1, b2);
    auto f = [&](double w) { return (band_sigma(b1, w) - band_sigma(b2, w)) * std::exp(-I1 * w * dt); };
    auto r = quad::integrate(f, 0.0, top, opt, band_breaks(b1, b2, top));
    if (!r.converged && opt.throw_on_failure) throw NumericalError("bath_difference_kernel quadrature failed", r.error);
    return pref * r.value;
}

cplx second_order_coherence(const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, double t,
                            const SecondOrderOptions& opt) {
    check_inputs(b1, b2);
    if (t < 0.0) throw DomainError("second_order_coherence expects t >= 0");
    const double cs = std::sin(nb.psi_angle) * std::cos(nb.psi_angle);
    if (t == 0.0 || cs == 0.0 || (b1.gamma == 0.0 && b2.gamma == 0.0)) return 0.0;
    const double Op = nb.omega_plus, Om = nb.omega_minus;
    const double sg[2] = {1.0, -1.0};

    // bath-correlation term: int ds1 ds2 g_+(t-s1) g_-(t-s2) <b_+(s1) b_-(s2)>
    auto corr = [&](double w) {
        cplx X = 0.0, Y = 0.0;
        for (double s : sg) {
            X += s / (2.0 * I1 * Op) * std::exp(I1 * s * Op * t) * t * dd2(0.0, -I1 * (s * Op + w) * t);
            Y += s / (2.0 * I1 * Om) * std::exp(I1 * s * Om * t) * t * dd2(0.0, -I1 * (s * Om - w) * t);
        }
        return X * Y / pi;
    };
    // response terms: <q_+^0 q_-^(2)> + <q_+^(2) q_-^0>, with chi_{+-}(u) = cs (2/pi) int dsigma sin(w u)
    auto resp = [&](double w) {
        cplx z2 = 0.0, z3 = 0.0;
        for (double s : sg)
            for (double r : sg) {
                z2 += s * r / (-4.0 * Om) * std::exp(I1 * s * Om * t) * t * t *
                      exponent_dd(I1 * (r * w - s * Om) * t, I1 * (Op - s * Om) * t);
                z3 += s * r / (-4.0 * Op) * std::exp(I1 * s * Op * t) * t * t *
                      exponent_dd(I1 * (r * w - s * Op) * t, I1 * (-Om - s * Op) * t);
            }
        return 2.0 / pi * (std::exp(-I1 * Op * t) / (2.0 * Op) * z2 + std::exp(I1 * Om * t) / (2.0 * Om) * z3);
    };
    const double top = band_top(b1, b2);
    auto f = [&](double w) {
        const double ds = band_sigma(b1, w) - band_sigma(b2, w);
        if (ds == 0.0) return cplx(0.0);
        return ds * (corr(w) + resp(w));
    };
    std::vector<double> br = band_breaks(b1, b2, top);
    br.push_back(Op);
    br.push_back(Om);
    auto r = quad::integrate(f, 0.0, top, opt.quad, br);
    cplx total = r.value;

    if (opt.include_counterterm) {
        // delta_{+-} = cs (2/pi) int dsigma / w
        auto g = [&](double w) { return w > 0.0 ? (band_sigma(b1, w) - band_sigma(b2, w)) / w : b1.gamma - b2.gamma; };
        const double delta = 2.0 / pi * quad::integrate(g, 0.0, top, opt.quad, band_breaks(b1, b2, top)).value;
        cplx a = 0.0, b = 0.0;
        for (double s : sg) {
            a += s / (2.0 * I1 * Om) * t * dd2(0.0, I1 * (s * Om - Op) * t);
            b += s / (2.0 * I1 * Op) * t * dd2(0.0, I1 * (s * Op + Om) * t);
        }
        total -= delta * (a / (2.0 * Op) + b / (2.0 * Om));
    }
    return cs * total;
}

PerturbativeCoherence second_order_series(const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2,
                                          const std::vector<double>& times, const SecondOrderOptions& opt) {
    PerturbativeCoherence pc;
    pc.t = times;
    std::vector<double> x, y;
    for (double t : times) {
        const cplx v = second_order_coherence(nb, b1, b2, t, opt);
        pc.values.push_back(v);
        if (t > 0.0 && std::abs(v) > 0.0) {
            x.push_back(t);
            y.push_back(std::abs(v));
        }
    }
    if (x.size() >= 2) std::tie(pc.growth_exponent, pc.amplitude) = fit_power_law(x, y);
    return pc;
}

std::pair<double, double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_power_law needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) throw DomainError("fit_power_law needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {p, std::exp((sy - p * sx) / n)};
}

}  // namespace duet
