#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "duet/errors.hpp"

namespace duet::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 20000;
    bool throw_on_failure = false;
};

template <class T>
struct Result {
    T value;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
    return m.norm();
}

namespace detail {

// QUADPACK qk21 abscissae (positive half) and weights.
inline constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525598370, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
auto gk21(F& f, double a, double b) {
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T resk = fc * wgk[10];
    T resg = fc * 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = h * xgk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        resk = resk + (f1 + f2) * wgk[j];
        if (j % 2 == 1) resg = resg + (f1 + f2) * wg[j / 2];
    }
    resk = resk * h;
    resg = resg * h;
    const double err = magnitude(T(resk - resg));
    return Panel<T>{a, b, resk, err};
}

}  // namespace detail

// Adaptive Gauss-Kronrod (21 point) on [a, b], splitting first at `breaks`.
// T may be double, std::complex<double> or a fixed-size Eigen matrix.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {},
               std::vector<double> breaks = {}) {
    using T = std::decay_t<decltype(f(a))>;
    Result<T> res;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks)
        if (x > a && x < b && x - pts.back() > 1e-14 * (1.0 + std::abs(x))) pts.push_back(x);
    pts.push_back(b);

    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    bool first = true;
    double total_err = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        auto p = detail::gk21(f, pts[i], pts[i + 1]);
        res.evaluations += 21;
        total = first ? p.value : T(total + p.value);
        first = false;
        total_err += p.error;
        heap.push(p);
    }
    int n = static_cast<int>(heap.size());
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * magnitude(total))) {
        if (n >= opt.max_subdivisions) {
            res.converged = false;
            break;
        }
        auto p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            res.converged = false;
            heap.push(p);
            break;
        }
        auto l = detail::gk21(f, p.a, m);
        auto r = detail::gk21(f, m, p.b);
        res.evaluations += 42;
        total = total + (l.value + r.value - p.value);
        total_err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++n;
    }
    // Resum to avoid drift from the running updates.
    T sum = heap.top().value * 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        sum = sum + heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    res.value = sum * sign;
    res.error = err;
    if (!res.converged && opt.throw_on_failure) throw NumericalError("adaptive quadrature did not converge", err);
    return res;
}

// Integral over [a, inf) via w = a + x/(1-x).
template <class F>
auto integrate_to_infinity(F&& f, double a, const Options& opt = {}, std::vector<double> breaks = {}) {
    using T = std::decay_t<decltype(f(a))>;
    auto g = [&](double x) -> T {
        const double u = 1.0 - x;
        const double w = a + x / u;
        return f(w) * (1.0 / (u * u));
    };
    std::vector<double> mapped;
    for (double w : breaks)
        if (w > a) mapped.push_back((w - a) / (1.0 + w - a));
    return integrate(g, 0.0, 1.0, opt, mapped);
}

namespace detail {

inline void filon_coefficients(double th, double& al, double& be, double& ga) {
    if (std::abs(th) < 0.1) {
        const double t2 = th * th, t3 = t2 * th, t4 = t2 * t2, t5 = t4 * th, t6 = t4 * t2, t7 = t6 * th;
        al = 2.0 * t3 / 45.0 - 2.0 * t5 / 315.0 + 2.0 * t7 / 4725.0;
        be = 2.0 / 3.0 + 2.0 * t2 / 15.0 - 4.0 * t4 / 105.0 + 2.0 * t6 / 567.0;
        ga = 4.0 / 3.0 - 2.0 * t2 / 15.0 + t4 / 210.0 - t6 / 11340.0;
        return;
    }
    const double s = std::sin(th), c = std::cos(th), t3 = th * th * th;
    al = (th * th + th * s * c - 2.0 * s * s) / t3;
    be = 2.0 * (th * (1.0 + c * c) - 2.0 * s * c) / t3;
    ga = 4.0 * (s - th * c) / t3;
}

template <class F>
std::complex<double> filon_fixed(F& f, double a, double b, double k, int panels) {
    const int n = 2 * panels;
    const double h = (b - a) / n;
    double al, be, ga;
    filon_coefficients(k * h, al, be, ga);
    std::complex<double> ce = 0, co = 0, se = 0, so = 0, f0, fn;
    for (int i = 0; i <= n; ++i) {
        const double x = a + i * h;
        const std::complex<double> fx = f(x);
        const double cx = std::cos(k * x), sx = std::sin(k * x);
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        if (i % 2 == 0) {
            ce += w * fx * cx;
            se += w * fx * sx;
        } else {
            co += fx * cx;
            so += fx * sx;
        }
        if (i == 0) f0 = fx;
        if (i == n) fn = fx;
    }
    const std::complex<double> C =
        h * (al * (fn * std::sin(k * b) - f0 * std::sin(k * a)) + be * ce + ga * co);
    const std::complex<double> S =
        h * (al * (f0 * std::cos(k * a) - fn * std::cos(k * b)) + be * se + ga * so);
    return C + std::complex<double>(0.0, 1.0) * S;
}

}  // namespace detail

// Composite Filon-Simpson rule for int_a^b f(x) exp(i k x) dx, f smooth and
// slowly varying; panels doubled until successive estimates agree.
template <class F>
Result<std::complex<double>> filon(F&& f, double a, double b, double k, const Options& opt = {}) {
    Result<std::complex<double>> res;
    int panels = std::max(8, static_cast<int>(std::ceil(std::abs(k) * (b - a) / 8.0)));
    std::complex<double> prev = detail::filon_fixed(f, a, b, k, panels);
    res.evaluations = 2 * panels + 1;
    for (int it = 0; it < 14; ++it) {
        panels *= 2;
        const std::complex<double> cur = detail::filon_fixed(f, a, b, k, panels);
        res.evaluations += 2 * panels + 1;
        // Simpson-type error scales as h^4: Richardson estimate of the remainder.
        const double err = std::abs(cur - prev) / 15.0;
        prev = cur;
        res.value = cur;
        res.error = err;
        if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur))) return res;
    }
    res.converged = false;
    if (opt.throw_on_failure) throw NumericalError("Filon quadrature did not converge", res.error);
    return res;
}

}  // namespace duet::quad
