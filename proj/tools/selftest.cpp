#include "selftest.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/expansion.hpp"
#include "stablewalk/lclt.hpp"
#include "stablewalk/potential.hpp"
#include "stablewalk/specfun.hpp"
#include "stablewalk/stable.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace stablewalk::cli {

namespace {

constexpr double pi = std::numbers::pi;

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

template <typename E, typename F>
bool throws(F f)
{
    try {
        f();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

struct Check {
    std::string name;
    std::function<bool()> run;
};

std::vector<Check> checks()
{
    const QuadratureSpec spec;
    return {
        {"gamma(0.5) = sqrt(pi)", [] { return near(specfun::gamma_real(0.5), std::sqrt(pi), 1e-14); }},
        {"gamma(5) = 24", [] { return near(specfun::gamma_real(5.0), 24.0, 1e-14); }},
        {"gamma(-0.5) = -2 sqrt(pi)", [] { return near(specfun::gamma_real(-0.5), -2.0 * std::sqrt(pi), 1e-14); }},
        {"zeta(2) = pi^2/6", [] { return near(specfun::zeta(2.0), pi * pi / 6.0, 1e-14); }},
        {"zeta(4) = pi^4/90", [] { return near(specfun::zeta(4.0), std::pow(pi, 4) / 90.0, 1e-14); }},
        {"cin(0) = 0", [] { return specfun::cin(0.0) == 0.0; }},
        {"frac_cos_integral(0.5) = sqrt(2 pi)",
         [] { return near(specfun::frac_cos_integral(0.5), std::sqrt(2.0 * pi), 1e-14); }},
        {"cosine over full periods integrates to 0",
         [spec] { return std::abs(oscillatory_integral([](double) { return 1.0; }, 1.0, {0.0, 2.0 * pi}, spec).value) < 1e-12; }},
        {"int exp(-t) = 1",
         [spec] {
             return near(oscillatory_integral([](double t) { return std::exp(-t); }, 0.0,
                                              {0.0, std::numeric_limits<double>::infinity()}, spec).value, 1.0, 1e-10);
         }},
        {"Gaussian Fourier transform",
         [spec] {
             return near(oscillatory_integral([](double t) { return std::exp(-t * t); }, 3.0,
                                              {0.0, std::numeric_limits<double>::infinity()}, spec).value,
                         std::sqrt(pi) / 2.0 * std::exp(-2.25), 1e-10);
         }},
        {"pareto difference: p(1) = 1/4 at alpha 1", [] { return near(make_pareto_diff(1.0).pmf(1), 0.25, 1e-15); }},
        {"pareto difference: p(3) at alpha 1.5",
         [] { return near(make_pareto_diff(1.5).pmf(3), (std::pow(3.0, -1.5) - std::pow(4.0, -1.5)) / 2.0, 1e-15); }},
        {"repairer with kappa2 = 2",
         [] {
             const auto z = make_repairer(2.0);
             return z.masses().size() == 3 && near(z.pmf(2), 0.5, 1e-15) && z.pmf(0) == 0.0;
         }},
        {"repairer variance equals 2 kappa2",
         [] {
             const auto z = make_repairer(0.37);
             double v = 0.0;
             for (std::size_t k = 1; k < z.masses().size(); ++k)
                 v += 2.0 * double(k * k) * z.masses()[k];
             return near(v, 0.74, 1e-14);
         }},
        {"point mass is the convolution identity",
         [] {
             const auto d = make_long_range(1.5);
             const auto c = convolve(d, make_point_mass());
             for (long long x : {0, 1, 2, 7, 30})
                 if (!near(c.pmf(x), d.pmf(x), 1e-12))
                     return false;
             return true;
         }},
        {"convolution multiplies characteristic functions",
         [] {
             const auto a = make_long_range(1.3);
             const auto b = make_finite_support({0.5, 0.2, 0.05});
             return std::abs(convolve(a, b).char_fn(0.3) - a.char_fn(0.3) * b.char_fn(0.3)) < 1e-12;
         }},
        {"mixture is the convex combination and stays symmetric",
         [] {
             const auto a = make_long_range(1.5);
             const auto b = make_finite_support({0.5, 0.25});
             const auto m = mix(a, b, 0.3);
             for (long long x : {0, 1, 2, 5})
                 if (!near(m.pmf(x), 0.3 * a.pmf(x) + 0.7 * b.pmf(x), 1e-14) || m.pmf(x) != m.pmf(-x))
                     return false;
             return near(mix(a, a, 0.4).pmf(3), a.pmf(3), 1e-14);
         }},
        {"phi(0) = 1", [] { return make_long_range(1.5).char_fn(0.0) == 1.0; }},
        {"one-step n-step pmf equals the pmf",
         [spec] {
             const auto d = make_long_range(1.5);
             for (long long x : {0, 1, 4, 9})
                 if (std::abs(nstep_pmf(d, 1, x, spec) - d.pmf(x)) > 1e-10)
                     return false;
             return true;
         }},
        {"two-step repairer enumeration",
         [] {
             const auto z = make_repairer(0.3);
             const auto t = brute_nstep(z, 2, 4);
             const double p0 = z.masses()[0], p1 = z.masses()[1];
             return near(t.at(0), p0 * p0 + 2.0 * p1 * p1, 1e-15);
         }},
        {"kappa_alpha is positive",
         [] {
             for (double a : {0.3, 0.7, 1.3, 1.7})
                 if (!(closed_form_kappa_alpha(a) > 0.0))
                     return false;
             return true;
         }},
        {"R = {2, 2.5} is general admissible",
         [] {
             ExpansionCoefficients c;
             c.alpha = 1.5;
             c.kappa_alpha = 1.0;
             c.kappa = {{2.0, 0.1}, {2.5, 0.1}};
             return classify(c) == RepairClass::GeneralAdmissible;
         }},
        {"repairer alone leads with theta^2",
         [] {
             const auto z = make_repairer(0.4);
             FitOptions o;
             o.alpha_slot = false;
             const auto c = fit_expansion([&z](double t) { return z.complement(t); }, 1.5, {2.0, 4.0}, o);
             return c.diagnostics && c.diagnostics->leading_exponent &&
                    near(*c.diagnostics->leading_exponent, 2.0, 1e-12) &&
                    near(c.diagnostics->leading_coefficient.value_or(0.0), 0.4, 1e-8);
         }},
        {"Cauchy density at 0 and 1",
         [spec] {
             const StableLaw law{1.0, 1.0, 0.0};
             return near(stable_nstep_density(law, 1, 0.0, spec), 1.0 / pi, 1e-10) &&
                    near(stable_nstep_density(law, 1, 1.0, spec), 0.5 / pi, 1e-10);
         }},
        {"exact power laws give exact rates",
         [] {
             std::vector<std::pair<double, double>> a, b;
             for (double n : {8.0, 16.0, 32.0, 64.0}) {
                 a.emplace_back(n, std::pow(n, -2.0));
                 b.emplace_back(n, 3.0 * std::pow(n, -1.5));
             }
             const auto fa = rate_fit(a);
             return near(fa.exponent, 2.0, 1e-12) && near(fa.r2, 1.0, 1e-12) && near(rate_fit(b).exponent, 1.5, 1e-12);
         }},
        {"point mass is not admissible as a walk",
         [] {
             return throws<InputError>([] {
                 sup_error(make_point_mass(), 4, StableLaw{1.5, 1.0, 0.0});
             });
         }},
        {"potential kernel at 0 and its symmetry",
         [spec] {
             const auto d = make_long_range(1.5);
             return potential_kernel(d, 0, spec) == 0.0 &&
                    near(potential_kernel(d, 7, spec), potential_kernel(d, -7, spec), 1e-13);
         }},
        {"partial sums vanish at x = 0", [] { return partial_sum_oracle(make_long_range(1.5), 0, 50).value == 0.0; }},
        {"C_alpha is negative",
         [] {
             for (double a : {1.1, 1.5, 1.9})
                 if (!(const_C_alpha(a, 1.0) < 0.0))
                     return false;
             return true;
         }},
        {"ladder sizes at alpha 1.5 and 1.6",
         [] { return const_ladder(1.5, 1.0, 1.0).m_alpha == 0 && const_ladder(1.6, 1.0, 1.0).m_alpha == 1; }},
        {"critical delta tie rule",
         [] {
             return const_general_delta(1.5, 1.0, 2.0 + 1e-12, 1.0).case_tag == PotentialCase::GeneralDeltaCritical &&
                    const_general_delta(1.5, 1.0, 2.0 - 1e-12, 1.0).case_tag == PotentialCase::GeneralDeltaCritical;
         }},
    };
}

} // namespace

bool run_selftest(std::ostream& out)
{
    int failed = 0;
    for (const auto& c : checks()) {
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception& e) {
            out << "  (" << e.what() << ")\n";
        }
        out << (ok ? "PASS " : "FAIL ") << c.name << '\n';
        failed += ok ? 0 : 1;
    }
    out << (failed == 0 ? "selftest passed" : "selftest failed: " + std::to_string(failed)) << '\n';
    return failed == 0;
}

} // namespace stablewalk::cli
