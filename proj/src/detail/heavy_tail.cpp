#include "detail/heavy_tail.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/quadrature.hpp"
#include "stablewalk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace stablewalk::detail {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int em_terms = 30;
constexpr int derivs = 2 * em_terms + 2;
// Past this value of u = theta x the oscillatory tail is summed asymptotically.
constexpr double asymptotic_start = 200.0;

// B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}, k = 1..em_terms (index k-1).
const std::array<double, em_terms>& bernoulli_ratios()
{
    static const std::array<double, em_terms> table = [] {
        std::array<double, em_terms> b{};
        double scale = 1.0 / (two_pi * two_pi);
        for (int k = 1; k <= em_terms; ++k) {
            b[k - 1] = (k % 2 == 1 ? 2.0 : -2.0) * specfun::zeta(2.0 * k) * scale;
            scale /= two_pi * two_pi;
        }
        return b;
    }();
    return table;
}

} // namespace

double reduce_angle(double theta)
{
    double t = std::abs(theta);
    if (t > pi) {
        t = std::fmod(t, two_pi);
        if (t > pi)
            t = two_pi - t;
    }
    return t;
}

HeavyTail::HeavyTail(Shape shape, double alpha)
    : shape_(shape), alpha_(alpha), c_(shape == Shape::LongRange ? 0.5 / specfun::zeta(1.0 + alpha) : 1.0)
{
    head_.assign(cut, 0.0);
    for (int x = 1; x < cut; ++x)
        head_[x] = profile(x);
}

double HeavyTail::profile(double x) const
{
    if (shape_ == Shape::LongRange)
        return c_ * std::pow(x, -1.0 - alpha_);
    // (x^{-a} - (x+1)^{-a})/2 without cancellation for large x.
    return -0.5 * std::pow(x, -alpha_) * std::expm1(-alpha_ * std::log1p(1.0 / x));
}

void HeavyTail::derivative_magnitudes(double x, int count, double* magnitudes) const
{
    if (shape_ == Shape::LongRange) {
        double d = c_ * std::pow(x, -1.0 - alpha_);
        for (int m = 0; m < count; ++m) {
            magnitudes[m] = d;
            d *= (1.0 + alpha_ + m) / x;
        }
        return;
    }
    const double log_ratio = std::log1p(1.0 / x);
    double lead = 0.5 * std::pow(x, -alpha_); // (alpha)_m x^{-alpha-m} / 2
    for (int m = 0; m < count; ++m) {
        magnitudes[m] = -lead * std::expm1(-(alpha_ + m) * log_ratio);
        lead *= (alpha_ + m) / x;
    }
}

double HeavyTail::tail_integral(double x) const
{
    if (shape_ == Shape::LongRange)
        return c_ * std::pow(x, -alpha_) / alpha_;
    // Half the integral of u^{-alpha} over [x, x+1].
    const double l = std::log1p(1.0 / x);
    if (std::abs(alpha_ - 1.0) < 1e-14)
        return 0.5 * l;
    return 0.5 * std::pow(x, 1.0 - alpha_) * std::expm1((1.0 - alpha_) * l) / (1.0 - alpha_);
}

double HeavyTail::tail_mass(long long r) const
{
    if (r < 0)
        return 1.0;
    if (shape_ == Shape::LongRange)
        return 2.0 * c_ * specfun::zeta_tail(1.0 + alpha_, r + 1);
    return std::pow(static_cast<double>(r + 1), -alpha_);
}

double HeavyTail::complement(double theta, double* error) const
{
    const double t = reduce_angle(theta);
    if (t == 0.0) {
        if (error)
            *error = 0.0;
        return 0.0;
    }

    double head = 0.0;
    for (int x = cut - 1; x >= 1; --x) {
        const double s = std::sin(0.5 * t * x);
        head += 4.0 * head_[x] * s * s;
    }

    // Euler-Maclaurin for sum_{x >= N} g(x), g = 2 f (1 - cos t x).
    const double n = cut;
    std::array<double, derivs> d{};
    derivative_magnitudes(n, derivs, d.data());
    auto f_deriv = [&](int k) { return (k % 2 == 0 ? 1.0 : -1.0) * d[k]; };
    const double sn = std::sin(0.5 * t * n);
    const double one_minus_cos = 2.0 * sn * sn;
    const double cos_n = std::cos(t * n);
    const double sin_n = std::sin(t * n);
    const std::array<double, 4> shifted_cos = {cos_n, -sin_n, -cos_n, sin_n};

    auto g_deriv = [&](int m) {
        double sum = f_deriv(m) * one_minus_cos;
        double binom = 1.0;
        double tj = 1.0;
        for (int j = 1; j <= m; ++j) {
            binom = binom * (m - j + 1) / j;
            tj *= t;
            sum -= binom * f_deriv(m - j) * tj * shifted_cos[j % 4];
        }
        return 2.0 * sum;
    };

    double em = d[0] * one_minus_cos; // g(N)/2
    const auto& bern = bernoulli_ratios();
    for (int k = 1; k <= em_terms; ++k)
        em -= bern[k - 1] * g_deriv(2 * k - 1);
    // |R_p| <= 2 zeta(2p)/(2 pi)^{2p} int_N^inf |g^{(2p)}|, with int |f^{(k)}| = |f^{(k-1)}(N)|.
    const int p2 = 2 * em_terms;
    double bound_integral = 2.0 * d[p2 - 1];
    {
        double binom = 1.0;
        double tj = 1.0;
        for (int j = 1; j < p2; ++j) {
            binom = binom * (p2 - j + 1) / j;
            tj *= t;
            bound_integral += binom * tj * d[p2 - j - 1];
        }
        tj *= t;
        bound_integral += tj * tail_integral(n);
    }
    const double em_bound = 2.0 * specfun::zeta(p2) * std::pow(two_pi, -p2) * 2.0 * bound_integral;

    // int_N^inf g in u = t x space: adaptive quadrature up to U0, asymptotic series beyond.
    const double u_lo = t * n;
    double quad = 0.0;
    double quad_err = 0.0;
    double x0 = n;
    double u0 = u_lo;
    if (u_lo < asymptotic_start) {
        u0 = two_pi * std::ceil((std::max(u_lo, 1.0) + asymptotic_start) / two_pi);
        std::vector<double> pts{u_lo};
        for (double u = 2.0 * u_lo; u < 1.0; u *= 2.0)
            pts.push_back(u);
        const double start = std::max(u_lo, 1.0);
        pts.push_back(start);
        for (double u = pi * std::ceil(start / pi); u < u0; u += pi)
            if (u > start)
                pts.push_back(u);
        pts.push_back(u0);
        QuadratureSpec spec;
        spec.abs_tol = 1e-300;
        spec.rel_tol = 1e-15;
        spec.max_panels = 100000;
        const auto r = integrate_panels(
            [&](double u) {
                const double s = std::sin(0.5 * u);
                return 4.0 * profile(u / t) * s * s;
            },
            pts, spec);
        quad = r.value / t;
        quad_err = r.abs_error / t;
        x0 = u0 / t;
    }

    // int_X^inf f e^{itx} dx = -e^{itX} sum_k (-1)^k f^{(k)}(X) / (it)^{k+1}
    std::array<double, derivs> dx{};
    const double* dd = d.data();
    if (x0 != n) {
        derivative_magnitudes(x0, derivs, dx.data());
        dd = dx.data();
    }
    std::complex<double> series = 0.0;
    const std::complex<double> inv_it = 1.0 / std::complex<double>(0.0, t);
    std::complex<double> power = inv_it;
    double asym_err = 0.0;
    double last = INFINITY;
    for (int k = 0; k < derivs; ++k) {
        const std::complex<double> term = dd[k] * power;
        const double mag = std::abs(term);
        if (mag > last) {
            asym_err = last;
            break;
        }
        series += term;
        last = mag;
        if (mag <= 1e-18 * std::abs(series)) {
            asym_err = mag;
            break;
        }
        power *= inv_it;
        if (k == derivs - 1)
            asym_err = mag;
    }
    const double oscillatory = (-std::exp(std::complex<double>(0.0, u0)) * series).real();
    const double asym = 2.0 * tail_integral(x0) - 2.0 * oscillatory;

    const double total_error = em_bound + quad_err + 2.0 * asym_err;
    if (error)
        *error = total_error;
    if (total_error > 1e-12)
        throw NonConvergenceError("heavy-tail complement: certified error " + std::to_string(total_error) +
                                  " at theta = " + std::to_string(theta));
    return head + em + quad + asym;
}

ComplementTable::ComplementTable(const std::function<double(double)>& exact, double alpha)
    : alpha_(alpha), floor_theta_(std::ldexp(pi, -panels)), coef_(panels)
{
    constexpr int m = degree + 1;
    for (int k = 0; k < panels; ++k) {
        const double a = std::ldexp(pi, -k - 1);
        const double b = std::ldexp(pi, -k);
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        std::array<double, m> f{};
        for (int j = 0; j < m; ++j)
            f[j] = exact(mid + half * std::cos(pi * (j + 0.5) / m));
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j)
                s += f[j] * std::cos(pi * i * (j + 0.5) / m);
            coef_[k][i] = (i == 0 ? 1.0 : 2.0) * s / m;
        }
    }
    floor_value_ = eval_panel(panels - 1, floor_theta_);
}

double ComplementTable::eval_panel(int k, double theta) const
{
    const double a = std::ldexp(pi, -k - 1);
    const double b = std::ldexp(pi, -k);
    const double s = (2.0 * theta - a - b) / (b - a);
    // Clenshaw recurrence.
    double b1 = 0.0;
    double b2 = 0.0;
    for (int i = degree; i >= 1; --i) {
        const double b0 = 2.0 * s * b1 - b2 + coef_[k][i];
        b2 = b1;
        b1 = b0;
    }
    return s * b1 - b2 + coef_[k][0];
}

double ComplementTable::operator()(double t) const
{
    if (t <= 0.0)
        return 0.0;
    if (t < floor_theta_)
        return floor_value_ * std::pow(t / floor_theta_, alpha_);
    int e = 0;
    std::frexp(t / pi, &e);
    const int k = std::clamp(-e, 0, panels - 1);
    return eval_panel(k, t);
}

} // namespace stablewalk::detail
