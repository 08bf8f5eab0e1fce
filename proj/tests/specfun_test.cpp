#include "stablewalk/errors.hpp"
#include "stablewalk/quadrature.hpp"
#include "stablewalk/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

using namespace stablewalk;
using namespace stablewalk::specfun;

namespace {

constexpr double pi = std::numbers::pi;

bool close_rel(double got, double want, double rel)
{
    return std::abs(got - want) <= rel * std::abs(want);
}

// Reference values computed with 30-digit arithmetic.
const std::vector<std::pair<double, double>> zeta_reference = {
    {1.05, 20.58084430203698483}, {1.1, 10.584448464950800951}, {1.3, 3.9319492118095437366},
    {1.5, 2.6123753486854883433}, {1.7, 2.054288756837751327},  {2, 1.6449340668482264365},
    {2.3, 1.4324177993153238105}, {2.5, 1.3414872572509171798}, {3, 1.2020569031595942854},
    {3.5, 1.1267338673170566464}, {4, 1.0823232337111381915},   {5, 1.0369277551433699263},
    {6.5, 1.0120058998885247961}, {8, 1.0040773561979443394},   {10, 1.0009945751278180853},
    {12.5, 1.0001737517336431782}, {15, 1.0000305882363070205}, {20, 1.0000009539620338728},
    {30, 1.0000000009313274324},  {50, 1.0000000000000008882},
};

const std::vector<std::pair<double, double>> gamma_reference = {
    {0.1, 9.5135076986687312858},    {0.5, 1.7724538509055160273},   {1, 1.0},
    {1.5, 0.88622692545275801365},   {2.5, 1.3293403881791370205},   {3.7, 4.1706517837966040301},
    {5, 24.0},                       {7.25, 1155.3810139199896872},  {10.5, 1133278.3889487855673},
    {20, 121645100408832000.0},      {33.3, 7.4875775965226323274e+35}, {49.9, 4.1180110342530352191e+62},
    {-0.5, -3.5449077018110320546},  {-1.5, 2.3632718012073547031},  {-2.25, -1.7428148657282526509},
    {-3.9, 0.49190581737781732877},  {-7.5, 0.00022384932885968949716}, {-10.1, -2.2134165830856185893e-6},
    {0.01, 99.432585119150601632},   {-0.01, -100.58719796441077711},
};

// Direct quadrature of int_0^inf (1 - cos z)/z^{1+a} dz: adaptive on [0, T] with T a
// multiple of 2 pi, then the exact tail of z^{-1-a} minus an integration-by-parts series
// for the cosine part.
double frac_cos_by_quadrature(double a)
{
    const double T = 2.0 * pi * 100.0;
    QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-13;
    const auto head = oscillatory_integral(
        [a](double z) {
            const double s = std::sin(0.5 * z);
            return 2.0 * s * s * std::pow(z, -1.0 - a);
        },
        0.0, {0.0, T}, spec);
    // int_T^inf z^{-1-a} e^{iz} dz = -e^{iT} sum_k (-1)^k f^{(k)}(T) / i^{k+1}.
    std::complex<double> series = 0.0;
    std::complex<double> ipow = {0.0, 1.0};
    double deriv = std::pow(T, -1.0 - a);
    for (int k = 0; k < 30; ++k) {
        series += std::pow(-1.0, k) * deriv / ipow;
        deriv *= -(1.0 + a + k) / T;
        ipow *= std::complex<double>(0.0, 1.0);
    }
    const double cos_tail = (-std::exp(std::complex<double>(0.0, T)) * series).real();
    return head.value + std::pow(T, -a) / a - cos_tail;
}

} // namespace

TEST_CASE("gamma_real matches reference values to 12 digits")
{
    for (auto [x, want] : gamma_reference)
        CHECK_MESSAGE(close_rel(gamma_real(x), want, 1e-12), "x = " << x);
    CHECK(gamma_real(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
    CHECK(gamma_real(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(gamma_real(-0.5) == doctest::Approx(-2.0 * std::sqrt(pi)).epsilon(1e-14));
}

TEST_CASE("gamma_real rejects poles")
{
    for (double x : {0.0, -1.0, -2.0, -17.0})
        CHECK_THROWS_AS(gamma_real(x), PoleError);
}

TEST_CASE("zeta matches reference values to 12 digits")
{
    for (auto [s, want] : zeta_reference)
        CHECK_MESSAGE(close_rel(zeta(s), want, 1e-12), "s = " << s);
    CHECK(zeta(2.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-14));
    CHECK(zeta(4.0) == doctest::Approx(std::pow(pi, 4) / 90.0).epsilon(1e-14));
}

TEST_CASE("zeta(2.5) agrees with a long direct partial sum")
{
    // 10^7 terms plus the integral tail N^{1-s}/(s-1) and half the first omitted term.
    const long n = 10'000'000;
    double direct = 0.0;
    for (long k = n; k >= 1; --k)
        direct += std::pow(static_cast<double>(k), -2.5);
    const double nn = static_cast<double>(n) + 1.0;
    direct += std::pow(nn, -1.5) / 1.5 + 0.5 * std::pow(nn, -2.5);
    CHECK(zeta(2.5) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("zeta_minus_one keeps relative accuracy for large s")
{
    CHECK(close_rel(zeta_minus_one(50.0), 8.8817842109308159031e-16, 1e-12));
    CHECK(close_rel(zeta_minus_one(3.0), 0.2020569031595942854, 1e-13));
}

TEST_CASE("zeta rejects s <= 1")
{
    CHECK_THROWS_AS(zeta(1.0), DomainError);
    CHECK_THROWS_AS(zeta(0.5), DomainError);
}

TEST_CASE("cin against series, reference values and quadrature")
{
    CHECK(cin(0.0) == 0.0);
    const std::vector<std::pair<double, double>> reference = {
        {0.5, 0.061852563148200452525}, {1.0, 0.23981174200056472594},
        {3.9, 2.0616915672449487074},   {4.1, 2.1443680304399159536},
        {10.0, 2.9252571909000339173},  {50.0, 4.4948670566537952247},
        {pi, 1.6482776387045075488},
    };
    for (auto [z, want] : reference)
        CHECK_MESSAGE(close_rel(cin(z), want, 1e-13), "z = " << z);

    double series = 0.0;
    double fact = 1.0;
    for (int k = 1; k < 20; ++k) {
        fact *= (2.0 * k - 1.0) * (2.0 * k);
        series += (k % 2 == 1 ? 1.0 : -1.0) / (2.0 * k * fact);
    }
    CHECK(cin(1.0) == doctest::Approx(series).epsilon(1e-15));

    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    const auto q = integrate([](double t) { return t == 0.0 ? 0.0 : (1.0 - std::cos(t)) / t; }, 0.0, 1.0, spec);
    CHECK(cin(1.0) == doctest::Approx(q.value).epsilon(1e-14));
}

TEST_CASE("cin approaches log z + gamma like 1/z")
{
    CHECK(std::abs(cin(1e4) - std::log(1e4) - euler_gamma) < 1e-3);
    double worst = 0.0;
    for (double z = 10.0; z <= 1e4; z *= 1.2)
        worst = std::max(worst, std::abs(cin(z) - std::log(z) - euler_gamma) * z);
    CHECK(worst <= 1.0);
}

TEST_CASE("frac_cos_integral closed form")
{
    CHECK(frac_cos_integral(0.5) == doctest::Approx(std::sqrt(2.0 * pi)).epsilon(1e-14));
    CHECK(frac_cos_integral(1.0 - 1e-7) == doctest::Approx(pi / 2.0).epsilon(1e-6));
    CHECK(frac_cos_integral(1.0 + 1e-7) == doctest::Approx(pi / 2.0).epsilon(1e-6));
    const std::vector<std::pair<double, double>> reference = {
        {0.3, 3.8552525671549204179}, {0.5, 2.5066282746310005024},
        {1.2, 1.4990281954058280126}, {1.5, 1.6710855164206670016},
        {1.8, 3.0320498802702039743},
    };
    for (auto [a, want] : reference)
        CHECK(close_rel(frac_cos_integral(a), want, 1e-13));
}

TEST_CASE("frac_cos_integral agrees with direct quadrature to 1e-8")
{
    for (double a : {0.3, 0.5, 1.2, 1.5, 1.8})
        CHECK_MESSAGE(std::abs(frac_cos_integral(a) - frac_cos_by_quadrature(a)) < 1e-8, "a = " << a);
}

TEST_CASE("frac_cos_integral domain")
{
    CHECK_THROWS_AS(frac_cos_integral(1.0), DomainError);
    CHECK_THROWS_AS(frac_cos_integral(0.0), DomainError);
    CHECK_THROWS_AS(frac_cos_integral(2.0), DomainError);
    CHECK_THROWS_AS(frac_cos_integral(-0.3), DomainError);
}
