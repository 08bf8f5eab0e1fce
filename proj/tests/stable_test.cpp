#include "stablewalk/errors.hpp"
#include "stablewalk/stable.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace stablewalk;

namespace {
constexpr double pi = std::numbers::pi;

QuadratureSpec tight()
{
    QuadratureSpec s;
    s.abs_tol = 1e-30;
    s.rel_tol = 1e-13;
    return s;
}
} // namespace

TEST_CASE("Cauchy closed form")
{
    const StableLaw cauchy{1.0, 1.0, 0.0};
    CHECK(stable_nstep_density(cauchy, 1, 0.0, tight()) == doctest::Approx(1.0 / pi).epsilon(1e-14));
    CHECK(stable_nstep_density(cauchy, 1, 1.0, tight()) == doctest::Approx(0.5 / pi).epsilon(1e-14));
    for (double x : {0.3, 4.0, 50.0, 1000.0}) {
        const double exact = 1.0 / (pi * (1.0 + x * x));
        CHECK(stable_nstep_density(cauchy, 1, x, tight()) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(stable_nstep_density(cauchy, 1, x, tight(), StableMethod::RealAxis) ==
              doctest::Approx(exact).epsilon(x > 100 ? 1e-7 : 1e-10));
    }
}

TEST_CASE("Gamma-integral values at the origin")
{
    CHECK(stable_nstep_density({1.5, 1.0, 0.0}, 1, 0.0, tight()) ==
          doctest::Approx(std::tgamma(5.0 / 3.0) / pi).epsilon(1e-13));
    CHECK(u_profile(1.0, 1.0, 2.0, 0.0, tight()) == doctest::Approx(2.0 / pi).epsilon(1e-13));
    for (double a : {0.7, 1.3, 1.8})
        for (double j : {1.0, 2.0, 3.5}) {
            const double k = 1.7;
            const double exact = std::tgamma((j + 1.0) / a) / (a * std::pow(k, (j + 1.0) / a) * pi);
            CHECK(u_profile(a, k, j, 0.0, tight()) == doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("u_2 for alpha = 1 is minus the second derivative of the Cauchy density")
{
    for (double x : {0.5, 1.0, 10.0, 100.0, 1000.0}) {
        const std::complex<double> z(1.0, -x);
        const double exact = std::real(2.0 / (z * z * z)) / pi;
        CHECK(u_profile(1.0, 1.0, 2.0, x, tight()) == doctest::Approx(exact).epsilon(1e-11));
    }
    // -d^2/dx^2 of 1/(pi(1+x^2)) at x = 1 is -1/(2 pi).
    CHECK(u_profile(1.0, 1.0, 2.0, 1.0, tight()) == doctest::Approx(-0.5 / pi).epsilon(1e-13));
}

TEST_CASE("ray and real-axis paths agree")
{
    const StableLaw laws[] = {{1.5, 1.0, 0.0}, {0.8, 0.6, 0.0}, {1.5, 1.2, 0.3}, {1.9, 2.0, 0.0}};
    for (const auto& law : laws)
        for (long long n : {1, 7, 64})
            for (double x : {0.0, 2.0, 17.0, 150.0}) {
                const double ray = stable_nstep_density(law, n, x, tight());
                const double axis = stable_nstep_density(law, n, x, tight(), StableMethod::RealAxis);
                CHECK(std::abs(ray - axis) < 1e-12);
            }
}

TEST_CASE("Gaussian limit")
{
    const StableLaw nearly_gauss{1.5, 1e-13, 1.0};
    for (double x : {0.0, 1.0, 3.0})
        CHECK(stable_nstep_density(nearly_gauss, 1, x, tight()) ==
              doctest::Approx(std::exp(-x * x / 4.0) / std::sqrt(4.0 * pi)).epsilon(1e-9));
}

TEST_CASE("self-similarity of the pure stable law")
{
    for (double a : {1.0, 1.5, 1.8}) {
        const StableLaw law{a, 1.3, 0.0};
        for (long long n : {2, 16, 256, 1024})
            for (double x : {0.0, 1.0, 5.0, 40.0, 300.0}) {
                const double scale = std::pow(static_cast<double>(n), -1.0 / a);
                const double lhs = stable_nstep_density(law, n, x, tight());
                const double rhs = scale * stable_nstep_density(law, 1, x * scale, tight());
                CHECK(std::abs(lhs - rhs) < 1e-9);
            }
    }
}

TEST_CASE("normalization, positivity, evenness and unimodality")
{
    const StableLaw law{1.5, 1.0, 0.0};
    const double reach = 2000.0;
    double mass = 0.0;
    double previous = stable_nstep_density(law, 1, 0.0, tight());
    double x = 0.0;
    while (x < reach) {
        const double h = x < 20.0 ? 0.05 : 0.5;
        const double p = stable_nstep_density(law, 1, x + h, tight());
        CHECK(p > 0.0);
        CHECK(p <= previous);
        mass += h * (previous + p); // both signs of x
        previous = p;
        x += h;
    }
    // Tail of the density c x^{-(1+alpha)} with c = kappa Gamma(1+alpha) sin(pi alpha/2)/pi.
    const double c = std::tgamma(2.5) * std::sin(0.75 * pi) / pi;
    const double tail = 2.0 * c * std::pow(reach, -1.5) / 1.5;
    CHECK(std::abs(mass + tail - 1.0) < 1e-4);
    for (double x : {0.4, 9.0, 77.0}) {
        CHECK(stable_nstep_density(law, 3, x, tight()) == stable_nstep_density(law, 3, -x, tight()));
        CHECK(u_profile(1.5, 1.0, 2.0, x, tight()) == u_profile(1.5, 1.0, 2.0, -x, tight()));
    }
}

TEST_CASE("u_j decay")
{
    // |u_j(x)| x^{alpha + j + 1} stays bounded when j is even; odd j carries |theta|^j's own
    // non-smoothness and decays like x^{-(j+1)}.
    for (auto [a, j] : {std::pair{1.0, 2.0}, std::pair{1.5, 2.0}}) {
        double lo = 1e300, hi = 0.0;
        for (double x = 10.0; x <= 1000.0; x *= 1.2) {
            const double v = std::abs(u_profile(a, 1.0, j, x, tight())) * std::pow(x, a + j + 1.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi < 10.0 * lo);
    }
    const double x = 1000.0;
    CHECK(u_profile(1.5, 1.0, 3.0, x, tight()) * std::pow(x, 4.0) == doctest::Approx(6.0 / pi).epsilon(1e-3));
}

TEST_CASE("invalid stable inputs")
{
    CHECK_THROWS_AS(stable_nstep_density({2.0, 1.0, 0.0}, 1, 0.0, tight()), DomainError);
    CHECK_THROWS_AS(stable_nstep_density({1.5, 0.0, 0.0}, 1, 0.0, tight()), DomainError);
    CHECK_THROWS_AS(stable_nstep_density({1.5, 1.0, 0.0}, 0, 0.0, tight()), DomainError);
    CHECK_THROWS_AS(u_profile(1.5, 1.0, 0.0, 1.0, tight()), DomainError);
}
