#include "duet/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "duet/errors.hpp"
#include "duet/spectral.hpp"

namespace duet {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I1(0.0, 1.0);

cplx bose(cplx z, double T) {
    const cplx x = z / T;
    if (x.real() > 700.0) return std::exp(-x);
    if (x.real() < -700.0) return -1.0;
    if (std::abs(x) < 1e-5) return 1.0 / x - 0.5 + x / 12.0;
    return 1.0 / (std::exp(x) - 1.0);
}

// w n(w), finite at w = 0
double wn(double w, double T) {
    if (T == 0.0) return w < 0.0 ? -w : 0.0;
    if (w == 0.0) return T;
    return w / std::expm1(w / T);
}

cplx ipow(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

struct Denoms {
    const ResonancePair& rp;
    cplx D(cplx w) const {
        const cplx d = w - 0.5 * I1 * rp.gamma_a;
        return d * d - rp.omega_a * rp.omega_a;
    }
    cplx E(cplx w) const {
        const cplx e = w + 0.5 * I1 * rp.gamma_b;
        return e * e - rp.omega_b * rp.omega_b;
    }
};

double ohmic_denominator(double w, double W, double g) {
    const double d = w * w - W * W;
    return d * d + g * g * w * w;
}

}  // namespace

const char* kind_name(CorrelatorKind k) {
    switch (k) {
        case CorrelatorKind::QQ_pp: return "qq_pp";
        case CorrelatorKind::QQ_mm: return "qq_mm";
        case CorrelatorKind::QQ_pm: return "qq_pm";
        case CorrelatorKind::PP_pp: return "pp_pp";
        case CorrelatorKind::PP_mm: return "pp_mm";
        case CorrelatorKind::PP_pm: return "pp_pm";
    }
    return "?";
}

const char* source_name(SeriesSource s) {
    switch (s) {
        case SeriesSource::InitialCondition: return "initial";
        case SeriesSource::Noise: return "noise";
        case SeriesSource::Total: return "total";
    }
    return "?";
}

CMat2 initial_moments(const GreensPair& g, double omega_plus, double omega_minus) {
    const Eigen::Vector2d om(omega_plus, omega_minus);
    const Mat2 Q = (0.5 * om.cwiseInverse()).asDiagonal();
    const Mat2 P = (0.5 * om).asDiagonal();
    const Mat2 re = g.gdot * Q * g.gdot.transpose() + g.g * P * g.g.transpose();
    const Mat2 im = 0.5 * (g.gdot * g.g.transpose() - g.g * g.gdot.transpose());
    return re.cast<cplx>() + I1 * im.cast<cplx>();
}

double coherence_initial_strong(const GreensKernel& k, double t) {
    if (k.regime() != GreensRegime::StrongDelta0 && k.regime() != GreensRegime::OneBath)
        throw DomainError("strong-coupling coherence needs a StrongDelta0 or OneBath kernel");
    const double W = k.W();
    double g1, d1, g2, d2;
    damped_mode(W, k.gamma1(), t, g1, d1);
    damped_mode(W, k.gamma2(), t, g2, d2);
    return std::sin(2.0 * k.psi()) / (4.0 * W) * ((d1 * d1 + W * W * g1 * g1) - (d2 * d2 + W * W * g2 * g2));
}

cplx coherence_initial_weak(double W, double Delta, double psi, double gamma1, double gamma2, double t) {
    if (Delta == 0.0) throw DomainError("weak-coupling coherence needs a nonzero detuning");
    const WeakModes m = weak_modes(W, Delta, psi, gamma1, gamma2);
    const double Op = m.omega_plus, Om = m.omega_minus;
    const cplx pref = I1 * (gamma2 - gamma1) * std::sin(2.0 * psi) / (8.0 * W * Delta);
    const cplx a = std::exp(-I1 * Op * t) * (std::cos(Om * t) + I1 * (Om / Op) * std::sin(Om * t));
    const cplx b = std::exp(I1 * Om * t) * (std::cos(Op * t) - I1 * (Op / Om) * std::sin(Op * t));
    return pref * (std::exp(-m.gamma_plus * t) + std::exp(-m.gamma_minus * t) -
                   std::exp(-0.5 * (m.gamma_plus + m.gamma_minus) * t) * (a + b));
}

cplx resonance_integral_quadrature(int m, double tau, double gamma, double T, const ResonancePair& rp,
                                   const quad::Options& opt) {
    if (gamma == 0.0) return 0.0;
    if (m == 2 && tau == 0.0) throw DomainError("momentum integral diverges at tau = 0 without a cutoff");
    const Denoms dn{rp};
    auto gfun = [&](double w, double sgn) {
        const double x = sgn * w;
        return gamma * std::pow(x, m) * wn(x, T) / (dn.D(x) * dn.E(x));
    };
    const double scale = std::max({std::abs(rp.omega_a), std::abs(rp.omega_b), rp.gamma_a, rp.gamma_b, 1e-3});
    std::vector<double> br{std::abs(rp.omega_a.real()), std::abs(rp.omega_b.real())};
    if (T > 0.0) br.push_back(T);
    if (tau == 0.0) {
        auto f = [&](double w) { return gfun(w, 1.0) + gfun(w, -1.0); };
        return quad::integrate_to_infinity(f, 0.0, opt, br).value / pi;
    }
    const double X = std::max({200.0 * scale, 60.0 * T, 50.0 / tau});
    auto f = [&](double w) {
        return gfun(w, 1.0) * std::exp(I1 * w * tau) + gfun(w, -1.0) * std::exp(-I1 * w * tau);
    };
    cplx acc = quad::integrate(f, 0.0, X, opt, br).value;
    // tail by repeated integration by parts
    const double h = 1e-3 * X;
    for (double sgn : {1.0, -1.0}) {
        const cplx ik = I1 * (sgn * tau);
        auto g = [&](double w) { return gfun(w, sgn); };
        const cplx g0 = g(X);
        const cplx g1 = (g(X + h) - g(X - h)) / (2.0 * h);
        const cplx g2 = (g(X + h) - 2.0 * g0 + g(X - h)) / (h * h);
        acc += std::exp(ik * X) * (-g0 / ik + g1 / (ik * ik) - g2 / (ik * ik * ik));
    }
    return acc / pi;
}

cplx resonance_integral(int m, double tau, double gamma, double T, const ResonancePair& rp,
                        const SeriesOptions& opt) {
    if (gamma == 0.0) return 0.0;
    if (tau < 0.0) throw DomainError("resonance_integral expects tau >= 0");
    if (m == 2 && tau == 0.0) throw DomainError("momentum integral diverges at tau = 0 without a cutoff");
    const Denoms dn{rp};
    const double scale = std::abs(rp.omega_a) + rp.gamma_a;
    const bool degenerate = std::abs(rp.omega_a) < 1e-7 * (1.0 + scale);
    const bool overdamped = std::abs(rp.omega_a.real()) < 1e-12 * std::abs(rp.omega_a);
    if (degenerate || (T == 0.0 && overdamped)) {
        quad::Options q;
        q.abs_tol = 1e-14;
        q.rel_tol = 1e-11;
        return resonance_integral_quadrature(m, tau, gamma, T, rp, q);
    }
    const cplx a1 = rp.omega_a + 0.5 * I1 * rp.gamma_a;
    const cplx a2 = -rp.omega_a + 0.5 * I1 * rp.gamma_a;
    auto res = [&](cplx a, cplx na) {
        const cplx dprime = 2.0 * (a - 0.5 * I1 * rp.gamma_a);
        return ipow(a, 1 + m) * na * std::exp(I1 * a * tau) / (dprime * dn.E(a));
    };
    auto fi = [&](double nu) {
        const cplx z = I1 * nu;
        return ipow(z, 1 + m) * std::exp(-nu * tau) / (dn.D(z) * dn.E(z));
    };

    cplx total = 0.0;
    if (T == 0.0) {
        for (cplx a : {a1, a2})
            if (a.real() < 0.0) total += res(a, -1.0);
        quad::Options q;
        q.abs_tol = 1e-15;
        q.rel_tol = 1e-12;
        std::vector<double> br{std::abs(rp.omega_a), std::abs(rp.omega_b)};
        if (tau > 0.0) br.push_back(1.0 / tau);
        total += quad::integrate_to_infinity(fi, 0.0, q, br).value / (2.0 * pi);
        return 2.0 * I1 * gamma * total;
    }

    total = res(a1, bose(a1, T)) + res(a2, bose(a2, T));
    const double nu1 = 2.0 * pi * T;
    const double r = std::exp(-nu1 * tau);
    cplx sum = 0.0;
    long l = 1;
    for (;; ++l) {
        const double nu = nu1 * static_cast<double>(l);
        const cplx term = T * fi(nu);
        sum += term;
        if (tau == 0.0) {
            // remaining terms follow T (i nu)^{m-3}; m = 0 here
            const cplx asym = T * ipow(I1 * nu, 0) / ((I1 * nu) * (I1 * nu) * (I1 * nu));
            if (l > 10 && std::abs(term - asym) * static_cast<double>(l) < opt.rel_tol * std::abs(sum + total)) break;
        } else if (static_cast<double>(l) > 2.0 + nu1 * tau) {
            const double tail = std::abs(term) / (1.0 - r);
            if (tail < opt.rel_tol * std::abs(sum + total) || term == 0.0) break;
        }
        if (l >= opt.max_terms)
            throw NumericalError("Matsubara series did not converge (partial sum " + std::to_string(std::abs(sum)) + ")",
                                 std::abs(term) / (1.0 - std::min(r, 1.0 - 1e-16)));
    }
    if (tau == 0.0) {
        // sum_{k >= N} k^{-3} by Euler-Maclaurin
        const double N = static_cast<double>(l + 1);
        const double z3 = 0.5 / (N * N) + 0.5 / (N * N * N) + 0.25 / std::pow(N, 4) - 1.0 / (12.0 * std::pow(N, 6));
        sum += T * I1 * z3 / (nu1 * nu1 * nu1);
    }
    total += sum;
    return 2.0 * I1 * gamma * total;
}

cplx F_function(const BathSpec& bath, double W, double tau) {
    if (tau < 0.0) return std::conj(F_function(bath, W, -tau));
    const double g = bath.gamma;
    const cplx Wj = std::sqrt(cplx(W * W - 0.25 * g * g));
    return resonance_integral(0, tau, g, bath.temperature, {Wj, g, Wj, g});
}

double H_zero_T_coincidence(double gamma, double W, double L) {
    if (gamma == 0.0) return 0.0;
    double x = gamma / W;
    if (std::abs(x - 2.0) < 1e-7) x = 2.0 + 1e-7;  // removable point at critical damping
    const cplx r = std::sqrt(cplx(x * x - 4.0));
    const cplx zp = 0.5 * (2.0 - x * x + x * r);
    const cplx zm = 0.5 * (2.0 - x * x - x * r);
    const cplx br = zp * std::log(-zp) - zm * std::log(-zm);
    return gamma / pi * std::log(L / W) - (W / (2.0 * pi * r) * br).real();
}

cplx H_function(const BathSpec& bath, double W, double tau) {
    if (tau < 0.0) return std::conj(H_function(bath, W, -tau));
    const double g = bath.gamma, T = bath.temperature;
    if (g == 0.0) return 0.0;
    if (tau == 0.0) {
        if (bath.strict_ohmic)
            throw DomainError("H(0) diverges for a strict-Ohmic bath: give the bath a finite bandwidth or use tau >= 1/Lambda");
        const double L = bath.lambda_cut;
        double val = H_zero_T_coincidence(g, W, L);
        if (T > 0.0) {
            auto f = [&](double w) { return w * w * wn(w, T) / ohmic_denominator(w, W, g); };
            quad::Options q;
            q.abs_tol = 1e-13;
            q.rel_tol = 1e-11;
            val += 2.0 * g / pi * quad::integrate(f, 0.0, L, q, {W, std::min(T, L)}).value;
        }
        return val;
    }
    const cplx Wj = std::sqrt(cplx(W * W - 0.25 * g * g));
    return resonance_integral(2, tau, g, T, {Wj, g, Wj, g});
}

cplx J_function(const BathSpec& bath, Branch a, Branch b, const WeakModes& modes, double tau, int m) {
    if (tau < 0.0) return std::conj(J_function(bath, b, a, modes, -tau, m));
    auto om = [&](Branch x) { return x == Branch::Plus ? modes.omega_plus : modes.omega_minus; };
    auto ga = [&](Branch x) { return x == Branch::Plus ? modes.gamma_plus : modes.gamma_minus; };
    return resonance_integral(m, tau, bath.gamma, bath.temperature, {om(a), ga(a), om(b), ga(b)});
}

StationaryValues stationary_strong(const NormalModeBasis& basis, const BathSpec& b1, const BathSpec& b2, double tau,
                                   bool momenta) {
    if (basis.detuning != 0.0) throw DomainError("strong-coupling stationary correlators need Delta = 0");
    const double W = basis.w_mean, c = std::cos(basis.psi_angle), s = std::sin(basis.psi_angle);
    StationaryValues v;
    const cplx F1 = F_function(b1, W, tau), F2 = F_function(b2, W, tau);
    v.qq_pp = c * c * F1 + s * s * F2;
    v.qq_mm = s * s * F1 + c * c * F2;
    v.qq_pm = c * s * (F1 - F2);
    if (momenta) {
        const cplx H1 = H_function(b1, W, tau), H2 = H_function(b2, W, tau);
        v.pp_pp = c * c * H1 + s * s * H2;
        v.pp_mm = s * s * H1 + c * c * H2;
        v.pp_pm = c * s * (H1 - H2);
        v.has_momenta = true;
    }
    return v;
}

StationaryValues stationary_weak(const NormalModeBasis& basis, const BathSpec& b1, const BathSpec& b2, double tau,
                                 bool momenta) {
    if (basis.detuning == 0.0) throw DomainError("weak-coupling stationary correlators need Delta != 0");
    const double c = std::cos(basis.psi_angle), s = std::sin(basis.psi_angle);
    const WeakModes md = weak_modes(basis.w_mean, basis.detuning, basis.psi_angle, b1.gamma, b2.gamma);
    const Branch P = Branch::Plus, M = Branch::Minus;
    StationaryValues v;
    auto fill = [&](int m, cplx& pp, cplx& mm, cplx& pm) {
        pp = c * c * J_function(b1, P, P, md, tau, m) + s * s * J_function(b2, P, P, md, tau, m);
        mm = s * s * J_function(b1, M, M, md, tau, m) + c * c * J_function(b2, M, M, md, tau, m);
        pm = c * s * (J_function(b1, P, M, md, tau, m) - J_function(b2, P, M, md, tau, m));
    };
    fill(0, v.qq_pp, v.qq_mm, v.qq_pm);
    if (momenta) {
        fill(2, v.pp_pp, v.pp_mm, v.pp_pm);
        v.has_momenta = true;
    }
    return v;
}

StationaryValues stationary_numeric(const LaplaceMatrix& mat, double tau, bool momenta, const quad::Options& opt) {
    const NormalModeBasis& nb = mat.basis();
    CMat2 qq = CMat2::Zero(), pp = CMat2::Zero();
    for (int j = 1; j <= 2; ++j) {
        const BathSpec& b = mat.bath(j);
        if (b.gamma == 0.0) continue;
        const Eigen::Vector2d u = bath_direction(j, nb.psi_angle);
        const Mat2 P = u * u.transpose();
        const double T = b.temperature;
        // sigma(w) n(w) and sigma(w)(1 + n(w)) for w > 0, as (sigma/w) * w n
        auto sig_over_w = [&](double w) {
            if (b.strict_ohmic || b.family == CutoffFamily::SharpCutoff) return b.gamma;
            return spectral_density(b, w) / w;
        };
        auto integrand = [&](double w, int power) {
            const CMat2 R = retarded_response(mat, w);
            const CMat2 Rc = R.conjugate();
            const double so = sig_over_w(w);
            const double a_pos = so * wn(w, T);          // sigma n
            const double a_neg = so * wn(-w, T);         // sigma (1 + n)
            const CMat2 pos = Rc * P.cast<cplx>() * R;  // from w > 0
            const CMat2 neg = R * P.cast<cplx>() * Rc;  // from w < 0 folded
            const double wp = power == 0 ? 1.0 : w * w;
            return CMat2((a_pos * std::exp(I1 * w * tau) * pos + a_neg * std::exp(-I1 * w * tau) * neg) * (wp / pi));
        };
        std::vector<double> br{nb.omega_plus, nb.omega_minus};
        if (T > 0.0) br.push_back(T);
        if (b.strict_ohmic) {
            if (momenta) throw DomainError("numeric momentum correlators need a finite-band bath");
            qq += quad::integrate_to_infinity([&](double w) { return integrand(w, 0); }, 0.0, opt, br).value;
        } else {
            const double top = spectral_support(b);
            br.push_back(b.lambda_cut);
            qq += quad::integrate([&](double w) { return integrand(w, 0); }, 0.0, top, opt, br).value;
            if (momenta) pp += quad::integrate([&](double w) { return integrand(w, 2); }, 0.0, top, opt, br).value;
        }
    }
    StationaryValues v;
    v.qq_pp = qq(0, 0);
    v.qq_mm = qq(1, 1);
    v.qq_pm = qq(0, 1);
    if (momenta) {
        v.pp_pp = pp(0, 0);
        v.pp_mm = pp(1, 1);
        v.pp_pm = pp(0, 1);
        v.has_momenta = true;
    }
    return v;
}

std::array<CorrelationSeries, 3> stationary_series(const std::function<StationaryValues(double)>& eval,
                                                   const std::vector<double>& taus, bool momenta) {
    std::array<CorrelationSeries, 3> out;
    const CorrelatorKind kinds[2][3] = {{CorrelatorKind::QQ_pp, CorrelatorKind::QQ_mm, CorrelatorKind::QQ_pm},
                                        {CorrelatorKind::PP_pp, CorrelatorKind::PP_mm, CorrelatorKind::PP_pm}};
    for (int i = 0; i < 3; ++i) {
        out[i].kind = kinds[momenta ? 1 : 0][i];
        out[i].source = SeriesSource::Noise;
        out[i].tau = taus;
    }
    for (double t : taus) {
        const StationaryValues v = eval(t);
        out[0].values.push_back(momenta ? v.pp_pp : v.qq_pp);
        out[1].values.push_back(momenta ? v.pp_mm : v.qq_mm);
        out[2].values.push_back(momenta ? v.pp_pm : v.qq_pm);
    }
    return out;
}

std::pair<double, double> effective_temperatures(double psi, double T1, double T2) {
    const double c2 = std::cos(psi) * std::cos(psi), s2 = std::sin(psi) * std::sin(psi);
    return {c2 * T1 + s2 * T2, s2 * T1 + c2 * T2};
}

Triple high_t_strong(double W, double psi, double T1, double T2) {
    const auto [tp, tm] = effective_temperatures(psi, T1, T2);
    return {tp / (W * W), tm / (W * W), std::sin(2.0 * psi) * (T1 - T2) / (2.0 * W * W)};
}

Triple high_t_weak(const WeakModes& md, double W, double Delta, double psi, double g1, double g2, double T1,
                   double T2) {
    const double c = std::cos(psi), s = std::sin(psi);
    Triple r;
    r.pp = (c * c * T1 * g1 + s * s * T2 * g2) / (md.omega_plus * md.omega_plus * md.gamma_plus);
    r.mm = (s * s * T1 * g1 + c * c * T2 * g2) / (md.omega_minus * md.omega_minus * md.gamma_minus);
    const double wd = W * Delta;
    r.pm = c * s * (g1 + g2) / (2.0 * wd * wd) * (T1 * g1 - T2 * g2);
    return r;
}

double equilibrium_coherence_weak(double W, double Delta, double psi, double g1, double g2, double T) {
    return std::cos(psi) * std::sin(psi) * (T / (W * W)) * (g1 * g1 - g2 * g2) / (2.0 * Delta * Delta);
}

std::vector<CMat2> finite_time_noise(const std::function<Mat2(double)>& green, const BathSpec& b1,
                                     const BathSpec& b2, double psi, const std::vector<double>& times,
                                     const FiniteTimeOptions& opt) {
    std::vector<CMat2> out(times.size(), CMat2::Zero());
    if (times.empty()) return out;
    if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
        throw DomainError("finite_time_noise expects ascending non-negative times");

    // grid: uniform steps of at most dt, with every output time a node
    std::vector<double> nodes{0.0};
    std::vector<size_t> out_node(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double start = nodes.back();
        if (t > start) {
            const int n = std::max(1, static_cast<int>(std::ceil((t - start) / opt.dt - 1e-9)));
            for (int k = 1; k <= n; ++k) nodes.push_back(k == n ? t : start + (t - start) * k / n);
        }
        out_node[i] = nodes.size() - 1;
    }
    std::vector<Mat2> G(nodes.size());
    for (size_t k = 0; k < nodes.size(); ++k) G[k] = green(nodes[k]);

    const int nf = opt.n_freq % 2 == 1 ? opt.n_freq : opt.n_freq + 1;
    for (int j = 1; j <= 2; ++j) {
        const BathSpec& b = j == 1 ? b1 : b2;
        if (b.gamma == 0.0) continue;
        if (b.strict_ohmic) throw DomainError("finite-time noise needs finite-band baths");
        const double top = spectral_support(b);
        const Eigen::Vector2d u = bath_direction(j, psi);
        std::vector<Eigen::Vector2d> gu(nodes.size());
        for (size_t k = 0; k < nodes.size(); ++k) gu[k] = G[k] * u;
        const double dnu = top / (nf - 1);
        for (int i = 0; i < nf; ++i) {
            const double nu = i * dnu;
            const double wsimp = (i == 0 || i == nf - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            const double so = (b.family == CutoffFamily::SharpCutoff) ? b.gamma : (nu > 0 ? spectral_density(b, nu) / nu : b.gamma);
            const double a_pos = so * wn(nu, b.temperature) / pi;   // sigma n / pi
            const double a_neg = so * wn(-nu, b.temperature) / pi;  // sigma (1 + n) / pi
            const double w = wsimp * dnu / 3.0;
            if (a_pos == 0.0 && a_neg == 0.0) continue;
            Eigen::Vector2cd x = Eigen::Vector2cd::Zero();
            size_t next = 0;
            while (next < times.size() && out_node[next] == 0) ++next;
            for (size_t k = 0; k + 1 < nodes.size(); ++k) {
                const double h = nodes[k + 1] - nodes[k];
                const double ps = nu * h;
                cplx I0, Ia;
                if (ps < 1e-3) {
                    I0 = h * cplx(1.0 - ps * ps / 6.0, -ps / 2.0);
                    Ia = h * cplx(0.5 - ps * ps / 8.0, -ps / 3.0);
                } else {
                    const cplx e = std::exp(-I1 * ps), ip = I1 * ps;
                    I0 = h * (1.0 - e) / ip;
                    Ia = h * (1.0 - e * (1.0 + ip)) / (ip * ip);
                }
                const cplx ph = std::polar(1.0, -nu * nodes[k]);
                x += ph * ((I0 - Ia) * gu[k].cast<cplx>() + Ia * gu[k + 1].cast<cplx>());
                while (next < times.size() && out_node[next] == k + 1) {
                    const CMat2 m = a_pos * (x * x.adjoint()) + a_neg * (x.conjugate() * x.transpose());
                    out[next] += w * m;
                    ++next;
                }
            }
        }
    }
    return out;
}

std::vector<cplx> finite_band_total_coherence(double W, double psi, const BathSpec& b1, const BathSpec& b2,
                                              const std::vector<double>& times, const FiniteTimeOptions& opt) {
    const FiniteBandMode m1(W, b1), m2(W, b2);
    const Mat2 V = rotation_matrix(psi);
    auto pair_at = [&](double t) {
        double g1, d1, g2, d2;
        if (t == 0.0) {
            g1 = g2 = 0.0;
            d1 = d2 = 1.0;
        } else {
            m1.evaluate(t, g1, d1);
            m2.evaluate(t, g2, d2);
        }
        GreensPair gp;
        gp.g = V * Eigen::Vector2d(g1, g2).asDiagonal() * V.transpose();
        gp.gdot = V * Eigen::Vector2d(d1, d2).asDiagonal() * V.transpose();
        return gp;
    };
    const auto noise = finite_time_noise([&](double u) { return pair_at(u).g; }, b1, b2, psi, times, opt);
    std::vector<cplx> out;
    for (size_t i = 0; i < times.size(); ++i)
        out.push_back((initial_moments(pair_at(times[i]), W, W) + noise[i])(0, 1));
    return out;
}

}  // namespace duet
