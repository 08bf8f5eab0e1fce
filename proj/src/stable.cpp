#include "stablewalk/stable.hpp"

#include "stablewalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace stablewalk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double cut_exponent = 40.0;
// Ray integrals stop once the integrand modulus is below e^{-ray_exponent} of its scale.
constexpr double ray_exponent = 46.0;

// Ray angle: exp(-kappa z^alpha) and exp(-kappa2 z^2) must still decay along it.
double ray_angle(const StableLaw& law)
{
    double angle = pi / (4.0 * law.alpha);
    if (law.gauss_kappa2 > 0.0)
        angle = std::min(angle, pi / 8.0);
    return angle;
}

double ray_transform(const StableLaw& law, long long n, double j, double x, const QuadratureSpec& spec)
{
    const double angle = ray_angle(law);
    const std::complex<double> dir = std::polar(1.0, angle);
    const std::complex<double> dir_alpha = std::polar(1.0, law.alpha * angle);
    const std::complex<double> dir_sq = dir * dir;
    const double nk = static_cast<double>(n) * law.kappa_alpha;
    const double ng = static_cast<double>(n) * law.gauss_kappa2;
    const double ax = std::abs(x);

    const auto decay = [&](double r) {
        return nk * dir_alpha.real() * std::pow(r, law.alpha) + ng * dir_sq.real() * r * r +
               ax * dir.imag() * r - j * std::log(std::max(r, 1.0));
    };
    double hi = std::pow(1.0 / nk, 1.0 / law.alpha);
    while (decay(hi) < ray_exponent)
        hi *= 1.25;

    // z = r e^{i angle}; the cosine transform is Re of the Fourier integral along the ray.
    const auto integrand = [&](double r) {
        if (r == 0.0)
            return 0.0;
        const std::complex<double> z = r * dir;
        const std::complex<double> log_value = j * std::log(z) - nk * std::pow(r, law.alpha) * dir_alpha -
                                               ng * r * r * dir_sq + std::complex<double>(0.0, ax) * z;
        return (std::exp(log_value) * dir).real();
    };
    return integrate(integrand, 0.0, hi, spec).value / pi;
}

double real_axis_transform(const StableLaw& law, long long n, double j, double x, const QuadratureSpec& spec)
{
    const double hi = law.cutoff(n);
    const auto envelope = [&](double t) {
        return t == 0.0 ? (j == 0.0 ? 1.0 : 0.0) : std::pow(t, j) * std::exp(-law.log_decay(n, t));
    };
    return oscillatory_integral(envelope, std::abs(x), {0.0, hi}, spec).value / pi;
}

} // namespace

void StableLaw::validate() const
{
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("StableLaw: alpha must lie in (0, 2)");
    if (!(kappa_alpha > 0.0) || !std::isfinite(kappa_alpha))
        throw DomainError("StableLaw: kappa_alpha must be positive");
    if (!(gauss_kappa2 >= 0.0) || !std::isfinite(gauss_kappa2))
        throw DomainError("StableLaw: gauss_kappa2 must be nonnegative");
}

double StableLaw::log_decay(long long n, double theta) const
{
    const double t = std::abs(theta);
    return static_cast<double>(n) * (kappa_alpha * std::pow(t, alpha) + gauss_kappa2 * t * t);
}

double StableLaw::char_fn(double theta) const { return std::exp(-log_decay(1, theta)); }

double StableLaw::cutoff(long long n) const
{
    const double nd = static_cast<double>(n);
    double hi = std::pow(cut_exponent / (nd * kappa_alpha), 1.0 / alpha);
    if (gauss_kappa2 > 0.0)
        hi = std::min(hi, std::sqrt(cut_exponent / (nd * gauss_kappa2)));
    return hi;
}

double stable_moment_transform(const StableLaw& law, long long n, double j, double x, const QuadratureSpec& spec,
                               StableMethod method)
{
    law.validate();
    if (n < 1)
        throw DomainError("stable transform: n must be positive");
    if (!(j >= 0.0))
        throw DomainError("stable transform: moment order must be nonnegative");
    return method == StableMethod::Ray ? ray_transform(law, n, j, x, spec) : real_axis_transform(law, n, j, x, spec);
}

double stable_nstep_density(const StableLaw& law, long long n, double x, const QuadratureSpec& spec,
                            StableMethod method)
{
    return stable_moment_transform(law, n, 0.0, x, spec, method);
}

double u_profile(double alpha, double kappa_alpha, double j, double x, const QuadratureSpec& spec,
                 StableMethod method)
{
    if (!(j > 0.0))
        throw DomainError("u_profile: j must be positive");
    return stable_moment_transform({alpha, kappa_alpha, 0.0}, 1, j, x, spec, method);
}

} // namespace stablewalk
