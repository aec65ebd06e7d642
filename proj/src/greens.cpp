#include "duet/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "duet/errors.hpp"
#include "duet/spectral.hpp"

namespace duet {

namespace {
constexpr double pi = std::numbers::pi;

bool is_meromorphic(const BathSpec& b) {
    return b.gamma == 0.0 || b.strict_ohmic || b.family == CutoffFamily::Drude;
}
}  // namespace

LaplaceMatrix::LaplaceMatrix(const NormalModeBasis& basis, const BathSpec& bath1, const BathSpec& bath2)
    : basis_(basis), b1_(bath1), b2_(bath2) {
    b1_.validate();
    b2_.validate();
    u1_ = bath_direction(1, basis.psi_angle);
    u2_ = bath_direction(2, basis.psi_angle);
}

CMat2 LaplaceMatrix::inverse(cplx s) const {
    CMat2 m = CMat2::Zero();
    m(0, 0) = s * s + basis_.omega_plus * basis_.omega_plus;
    m(1, 1) = s * s + basis_.omega_minus * basis_.omega_minus;
    m += laplace_self_energy(b1_, s) * (u1_ * u1_.transpose()).cast<cplx>();
    m += laplace_self_energy(b2_, s) * (u2_ * u2_.transpose()).cast<cplx>();
    return m;
}

LaplaceScalars LaplaceMatrix::scalars(cplx s) const {
    const CMat2 m = inverse(s);
    LaplaceScalars r;
    r.wp2 = m(0, 0) - s * s;
    r.wm2 = m(1, 1) - s * s;
    r.theta2 = m(0, 1);
    r.m2 = s * s + 0.5 * (r.wp2 + r.wm2);
    r.rho = std::sqrt((r.wp2 - r.wm2) * (r.wp2 - r.wm2) + 4.0 * r.theta2 * r.theta2);
    if (std::abs(r.rho) > 0.0) {
        r.alpha = (r.wm2 - r.wp2) / r.rho;
        r.beta = 2.0 * r.theta2 / r.rho;
    }
    return r;
}

CMat2 LaplaceMatrix::operator()(cplx s) const {
    const LaplaceScalars k = scalars(s);
    const double scale = std::abs(k.m2) + std::abs(k.wp2) + std::abs(k.wm2);
    if (std::abs(k.rho) < 1e-8 * scale) return inverse(s).inverse();
    CMat2 R;
    R << k.alpha, -k.beta, -k.beta, -k.alpha;
    const CMat2 one = CMat2::Identity();
    return 0.5 * (one + R) / (k.m2 - 0.5 * k.rho) + 0.5 * (one - R) / (k.m2 + 0.5 * k.rho);
}

bool LaplaceMatrix::meromorphic() const { return is_meromorphic(b1_) && is_meromorphic(b2_); }

std::vector<cplx> LaplaceMatrix::poles() const {
    std::vector<cplx> out;
    if (meromorphic()) {
        // state (q, p, z_drude...): z_j obeys dz/dt = -Lambda z + gamma Lambda u_j.p
        const BathSpec* bs[2] = {&b1_, &b2_};
        const Eigen::Vector2d* us[2] = {&u1_, &u2_};
        int nz = 0;
        for (auto* b : bs)
            if (b->gamma > 0.0 && !b->strict_ohmic) ++nz;
        const int n = 4 + nz;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        A.block(0, 2, 2, 2) = Mat2::Identity();
        A(2, 0) = -basis_.omega_plus * basis_.omega_plus;
        A(3, 1) = -basis_.omega_minus * basis_.omega_minus;
        int iz = 4;
        for (int j = 0; j < 2; ++j) {
            const BathSpec& b = *bs[j];
            const Eigen::Vector2d& u = *us[j];
            if (b.gamma == 0.0) continue;
            if (b.strict_ohmic) {
                A.block(2, 2, 2, 2) -= b.gamma * u * u.transpose();
            } else {
                const double L = b.lambda_cut;
                A.block(2, iz, 2, 1) = -u;
                A.block(iz, 2, 1, 2) = b.gamma * L * u.transpose();
                A(iz, iz) = -L;
                ++iz;
            }
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
        for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
        return out;
    }
    bool exponential = false;
    for (auto* b : {&b1_, &b2_})
        if (b->gamma > 0.0 && !b->strict_ohmic && b->family == CutoffFamily::Exponential) exponential = true;
    if (exponential) throw DomainError("pole scan unavailable for the exponential cutoff (no continuation below the axis)");

    // sharp band: Newton on det G^{-1} from the undamped/weakly damped guesses
    const WeakModes wm = weak_modes(basis_.w_mean, basis_.detuning, basis_.psi_angle, b1_.gamma, b2_.gamma);
    std::vector<cplx> seeds{cplx(-0.5 * wm.gamma_plus, basis_.omega_plus), cplx(-0.5 * wm.gamma_minus, basis_.omega_minus),
                            cplx(-0.5 * b1_.gamma, basis_.w_mean), cplx(-0.5 * b2_.gamma, basis_.w_mean)};
    auto det = [&](cplx s) { return inverse(s).determinant(); };
    for (cplx s : seeds) {
        bool ok = false;
        for (int it = 0; it < 200; ++it) {
            const double h = 1e-7 * (1.0 + std::abs(s));
            const cplx f = det(s);
            const cplx df = (det(s + h) - det(s - h)) / (2.0 * h);
            if (df == 0.0) break;
            const cplx step = f / df;
            s -= step;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(s))) {
                ok = true;
                break;
            }
        }
        if (!ok) continue;
        bool dup = false;
        for (cplx p : out) dup = dup || std::abs(p - s) < 1e-8 * (1.0 + std::abs(s));
        if (!dup) {
            out.push_back(s);
            out.push_back(std::conj(s));
        }
    }
    return out;
}

void check_stability(const LaplaceMatrix& mat) {
    const NormalModeBasis& b = mat.basis();
    if (!(b.omega_plus > 0.0 && b.omega_minus > 0.0)) throw StabilityError("static stiffness not positive definite");
    bool exponential = false;
    for (int j = 1; j <= 2; ++j) {
        const BathSpec& bs = mat.bath(j);
        exponential = exponential || (bs.gamma > 0.0 && !bs.strict_ohmic && bs.family == CutoffFamily::Exponential);
    }
    if (exponential) return;
    const double scale = b.omega_plus + b.omega_minus;
    for (cplx p : mat.poles())
        if (p.real() > 1e-9 * scale)
            throw StabilityError("pole of G(s) in the right half plane at s = " + std::to_string(p.real()) + " + " +
                                 std::to_string(p.imag()) + "i");
}

double slowest_decay_rate(const LaplaceMatrix& mat) {
    double r = -1e300;
    for (cplx p : mat.poles()) r = std::max(r, p.real());
    return std::max(0.0, -r);
}

namespace {

using CMat42 = Eigen::Matrix<cplx, 4, 2>;

GreensPair numeric_parabola(const LaplaceMatrix& mat, double t, const quad::Options& opt) {
    double Y = std::max(mat.basis().omega_plus, mat.basis().omega_minus);
    std::vector<double> br;
    for (cplx p : mat.poles()) {
        Y = std::max(Y, std::abs(p.imag()));
        if (p.imag() > 0.0) br.push_back(p.imag());
    }
    const double eps = 1.0 / t;
    const double c = eps / (2.0 * Y * Y);
    const double umax = 9.5 * Y;
    auto f = [&](double u) {
        const cplx s(eps - c * u * u, u);
        const cplx ds(-2.0 * c * u, 1.0);
        const CMat2 g = mat(s);
        const cplx w = std::exp(s * t) * ds;
        CMat42 out;
        out.topRows<2>() = g * w;
        out.bottomRows<2>() = g * (s * w);
        return out;
    };
    auto res = quad::integrate(f, 0.0, umax, opt, br);
    GreensPair gp;
    gp.g = res.value.topRows<2>().imag() / pi;
    gp.gdot = res.value.bottomRows<2>().imag() / pi;
    return gp;
}

GreensPair numeric_axis(const LaplaceMatrix& mat, double t, const quad::Options& opt) {
    double top = 0.0;
    for (int j = 1; j <= 2; ++j) {
        const BathSpec& bs = mat.bath(j);
        if (bs.gamma == 0.0) throw DomainError("axis inversion needs every mode damped (gamma_j > 0)");
        top = std::max(top, spectral_support(bs));
    }
    const NormalModeBasis& b = mat.basis();
    std::vector<double> br{b.omega_plus, b.omega_minus};
    for (int j = 1; j <= 2; ++j) br.push_back(mat.bath(j).lambda_cut);
    auto f = [&](double w) {
        const CMat2 r = retarded_response(mat, w);
        const Mat2 a = r.imag();
        CMat42 out;
        out.topRows<2>() = (a * std::sin(w * t)).cast<cplx>();
        out.bottomRows<2>() = (a * (w * std::cos(w * t))).cast<cplx>();
        return out;
    };
    auto res = quad::integrate(f, 0.0, top, opt, br);
    GreensPair gp;
    gp.g = res.value.topRows<2>().real() * (2.0 / pi);
    gp.gdot = res.value.bottomRows<2>().real() * (2.0 / pi);
    return gp;
}

}  // namespace

CMat2 retarded_response(const LaplaceMatrix& mat, double w) {
    const NormalModeBasis& b = mat.basis();
    CMat2 m = CMat2::Zero();
    m(0, 0) = b.omega_plus * b.omega_plus - w * w;
    m(1, 1) = b.omega_minus * b.omega_minus - w * w;
    for (int j = 1; j <= 2; ++j) {
        const BathSpec& bs = mat.bath(j);
        if (bs.gamma == 0.0) continue;
        const Eigen::Vector2d u = bath_direction(j, b.psi_angle);
        cplx k;
        if (!bs.strict_ohmic && bs.family == CutoffFamily::SharpCutoff && std::abs(w) >= bs.lambda_cut) {
            const double L = bs.lambda_cut;
            k = (bs.gamma * w / pi) * std::log((w + L) / (w - L));
        } else {
            const SelfEnergy se = self_energy(bs, w);
            k = cplx(se.re + counterterm_shift(bs), -se.im);
        }
        m += k * (u * u.transpose()).cast<cplx>();
    }
    return m.inverse();
}

GreensPair greens_numeric(const LaplaceMatrix& mat, double t, const quad::Options& opt) {
    if (t < 0.0) throw DomainError("Green's function requested at negative time");
    if (t == 0.0) return {Mat2::Zero(), Mat2::Identity()};
    return mat.meromorphic() ? numeric_parabola(mat, t, opt) : numeric_axis(mat, t, opt);
}

void damped_mode(double W, double gamma, double t, double& g, double& gdot) {
    const double disc = W * W - 0.25 * gamma * gamma;
    const double env = std::exp(-0.5 * gamma * t);
    if (disc > 0.0) {
        const double w = std::sqrt(disc);
        g = env * std::sin(w * t) / w;
        gdot = env * (std::cos(w * t) - 0.5 * gamma * std::sin(w * t) / w);
    } else if (disc < 0.0) {
        const double k = std::sqrt(-disc);
        g = env * std::sinh(k * t) / k;
        gdot = env * (std::cosh(k * t) - 0.5 * gamma * std::sinh(k * t) / k);
    } else {
        g = env * t;
        gdot = env * (1.0 - 0.5 * gamma * t);
    }
}

GreensPair greens_strong_delta0(double W, double psi, double gamma1, double gamma2, double t) {
    double g1, d1, g2, d2;
    damped_mode(W, gamma1, t, g1, d1);
    damped_mode(W, gamma2, t, g2, d2);
    const Mat2 V = rotation_matrix(psi);
    GreensPair gp;
    gp.g = V * Eigen::Vector2d(g1, g2).asDiagonal() * V.transpose();
    gp.gdot = V * Eigen::Vector2d(d1, d2).asDiagonal() * V.transpose();
    return gp;
}

GreensPair greens_one_bath(double W, double psi, double gamma1, double t) {
    return greens_strong_delta0(W, psi, gamma1, 0.0, t);
}

WeakModes weak_modes(double W, double Delta, double psi, double gamma1, double gamma2) {
    const double c = std::cos(psi), s = std::sin(psi);
    return {W - 0.5 * Delta, W + 0.5 * Delta, gamma1 * c * c + gamma2 * s * s, gamma2 * c * c + gamma1 * s * s};
}

GreensPair greens_weak(double W, double Delta, double psi, double gamma1, double gamma2, double t) {
    if (Delta == 0.0) throw DomainError("weak-coupling kernel needs a nonzero detuning");
    const WeakModes m = weak_modes(W, Delta, psi, gamma1, gamma2);
    const double ep = std::exp(-0.5 * m.gamma_plus * t), em = std::exp(-0.5 * m.gamma_minus * t);
    const double sp = std::sin(m.omega_plus * t), cp = std::cos(m.omega_plus * t);
    const double sm = std::sin(m.omega_minus * t), cm = std::cos(m.omega_minus * t);
    const double kappa = (gamma2 - gamma1) * std::sin(2.0 * psi) / (4.0 * W * Delta);
    GreensPair gp;
    gp.g(0, 0) = ep * sp / m.omega_plus;
    gp.g(1, 1) = em * sm / m.omega_minus;
    gp.g(0, 1) = gp.g(1, 0) = kappa * (ep * cp - em * cm);
    gp.gdot(0, 0) = ep * (cp - 0.5 * m.gamma_plus * sp / m.omega_plus);
    gp.gdot(1, 1) = em * (cm - 0.5 * m.gamma_minus * sm / m.omega_minus);
    // envelope derivative is O(gamma^2) here and dropped
    gp.gdot(0, 1) = gp.gdot(1, 0) = kappa * (-m.omega_plus * ep * sp + m.omega_minus * em * sm);
    return gp;
}

GreensKernel::GreensKernel(GreensRegime regime, const NormalModeBasis& basis, const BathSpec& bath1,
                           const BathSpec& bath2)
    : regime_(regime),
      W_(basis.w_mean),
      Delta_(basis.detuning),
      psi_(basis.psi_angle),
      g1_(bath1.gamma),
      g2_(bath2.gamma),
      mat_(basis, bath1, bath2) {
    switch (regime) {
        case GreensRegime::StrongDelta0:
            if (Delta_ != 0.0) throw DomainError("StrongDelta0 regime requires Delta = 0");
            break;
        case GreensRegime::OneBath:
            if (Delta_ != 0.0 || g2_ != 0.0) throw DomainError("OneBath regime requires Delta = 0 and gamma2 = 0");
            break;
        case GreensRegime::WeakCoupling:
            if (Delta_ == 0.0) throw DomainError("WeakCoupling regime requires Delta != 0");
            break;
        default: check_stability(mat_);
    }
}

GreensPair GreensKernel::operator()(double t) const {
    switch (regime_) {
        case GreensRegime::StrongDelta0: return greens_strong_delta0(W_, psi_, g1_, g2_, t);
        case GreensRegime::OneBath: return greens_one_bath(W_, psi_, g1_, t);
        case GreensRegime::WeakCoupling: return greens_weak(W_, Delta_, psi_, g1_, g2_, t);
        case GreensRegime::NumericBromwich:
        case GreensRegime::StrongDetunedPerturbative: {
            quad::Options o;
            o.abs_tol = 1e-12;
            o.rel_tol = 1e-10;
            return greens_numeric(mat_, t, o);
        }
    }
    return {};
}

FiniteBandMode::FiniteBandMode(double W, const BathSpec& bath) : W_(W), bath_(bath) {
    bath_.validate();
    if (bath_.strict_ohmic) throw DomainError("finite-band mode needs a finite bandwidth");
    if (bath_.gamma <= 0.0) throw DomainError("finite-band mode needs gamma > 0");
}

double FiniteBandMode::spectral(double w) const {
    if (bath_.family == CutoffFamily::SharpCutoff && std::abs(w) >= bath_.lambda_cut) return 0.0;
    const SelfEnergy se = self_energy(bath_, w);
    const double re = W_ * W_ - w * w + se.re + counterterm_shift(bath_);
    return se.im / (re * re + se.im * se.im);
}

void FiniteBandMode::evaluate(double t, double& g, double& gdot, const quad::Options& opt) const {
    const double top = spectral_support(bath_);
    std::vector<double> br{W_, bath_.lambda_cut};
    auto f = [&](double w) {
        const double a = spectral(w);
        return Eigen::Vector2d(a * std::sin(w * t), a * w * std::cos(w * t));
    };
    const Eigen::Vector2d r = quad::integrate(f, 0.0, top, opt, br).value * (2.0 / pi);
    g = r(0);
    gdot = r(1);
}

double FiniteBandMode::sum_rule(const quad::Options& opt) const {
    const double top = spectral_support(bath_);
    return 2.0 / pi * quad::integrate([&](double w) { return w * spectral(w); }, 0.0, top, opt, {W_}).value;
}

}  // namespace duet
