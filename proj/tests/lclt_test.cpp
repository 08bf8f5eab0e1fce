#include "stablewalk/errors.hpp"
#include "stablewalk/lclt.hpp"

#include <doctest.h>

#include <cmath>

using namespace stablewalk;

namespace {

QuadratureSpec tight()
{
    QuadratureSpec s;
    s.abs_tol = 1e-16;
    s.rel_tol = 1e-12;
    return s;
}

ExpansionCoefficients fitted(const LatticeDistribution& d, double alpha)
{
    return fit_expansion([&d](double t) { return d.complement(t); }, alpha, default_candidates(alpha));
}

} // namespace

TEST_CASE("rate_fit on exact power laws")
{
    auto f = rate_fit({{8, std::pow(8.0, -2.0)}, {16, std::pow(16.0, -2.0)}, {32, std::pow(32.0, -2.0)},
                       {64, std::pow(64.0, -2.0)}});
    CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<std::pair<double, double>> pairs;
    for (double n : {10.0, 20.0, 40.0, 80.0, 160.0})
        pairs.emplace_back(n, 3.0 * std::pow(n, -1.5));
    f = rate_fit(pairs);
    CHECK(f.exponent == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(rate_fit({{8, 1.0}, {8, 0.5}, {8, 0.2}, {8, 0.1}}), DomainError);
    CHECK_THROWS_AS(rate_fit({{8, 1.0}, {16, 0.5}, {32, 0.2}}), DomainError);
    CHECK_THROWS_AS(rate_fit({{8, 1.0}, {16, 0.5}, {32, 0.0}, {64, 0.1}}), DomainError);
}

TEST_CASE("sup_error matches pointwise differences")
{
    const auto d = convolve(make_long_range(1.5), make_repairer(0.5443042790440890));
    const auto c = fitted(d, 1.5);
    const StableLaw law = target_law(c, TargetKind::PureStable);
    const auto s = sup_error(d, 64, law);
    CHECK(s.value > 0.0);
    CHECK(s.tol_budget < 1e-2 * s.value);
    const double at_argmax = nstep_pmf(d, 64, s.argmax_x, tight()) - stable_nstep_density(law, 64, s.argmax_x, tight());
    CHECK(std::abs(std::abs(at_argmax) - s.value) < 1e-10);
    for (long long x : {0, 3, 11, 40}) {
        const double diff = nstep_pmf(d, 64, x, tight()) - stable_nstep_density(law, 64, x, tight());
        CHECK(std::abs(diff) <= s.value + 1e-10);
    }
}

TEST_CASE("degenerate and mismatched targets are rejected")
{
    CHECK_THROWS_AS(sup_error(make_point_mass(), 16, {1.5, 1.0, 0.0}), DomainError);
    const auto d = make_long_range(1.5);
    CHECK_THROWS_AS(sup_error(d, 16, {1.2, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(sup_error(d, 16, {1.5, 2.0, 0.0}), DomainError);
}

TEST_CASE("repaired alpha = 1 walk converges at rate 2")
{
    const auto p = make_long_range(1.0);
    const auto d = convolve(p, make_repairer(fitted(p, 1.0).kappa_at(2.0)));
    const auto c = fitted(d, 1.0);
    CHECK(classify(c) == RepairClass::Repaired);
    const StableLaw law = target_law(c, TargetKind::PureStable);
    const double e64 = sup_error(d, 64, law).value;
    const double e256 = sup_error(d, 256, law).value;
    CHECK(e64 / e256 == doctest::Approx(16.0).epsilon(0.4));
}

TEST_CASE("unrepaired p_1.5 halves its error when n doubles")
{
    const auto d = make_long_range(1.5);
    const StableLaw law = target_law(fitted(d, 1.5), TargetKind::PureStable);
    const double ratio = sup_error(d, 256, law).value / sup_error(d, 128, law).value;
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.4));
}

TEST_CASE("rate experiments follow the predicted exponents")
{
    const auto p = make_long_range(1.5);
    const auto cp = fitted(p, 1.5);
    const auto repaired = convolve(p, make_repairer(cp.kappa_at(2.0)));
    const auto ex_rep = run_rate_experiment(repaired, fitted(repaired, 1.5), TargetKind::PureStable, default_n_list());
    CHECK(ex_rep.theoretical_exponent == doctest::Approx(1.0 + 1.0 / 1.5));
    CHECK(std::abs(ex_rep.fit.exponent - ex_rep.theoretical_exponent) < 0.15);
    CHECK(ex_rep.fit.r2 > 0.98);
    for (std::size_t i = 1; i < ex_rep.rows.size(); ++i)
        CHECK(ex_rep.rows[i].value <= 1.05 * ex_rep.rows[i - 1].value);

    const auto ex_raw = run_rate_experiment(p, cp, TargetKind::PureStable, default_n_list());
    CHECK(ex_raw.theoretical_exponent == doctest::Approx(1.0));
    CHECK(std::abs(ex_raw.fit.exponent - 1.0) < 0.15);

    const auto csv = ex_rep.csv();
    CHECK(csv.rfind("n,sup_error,argmax_x,tol_budget\n", 0) == 0);
    CHECK(ex_rep.summary().at("r2").get<double>() == ex_rep.fit.r2);
    CHECK_THROWS_AS(run_rate_experiment(p, cp, TargetKind::PureStable, {}), DomainError);
}

TEST_CASE("asymptotically repairable mixture")
{
    const auto ex = make_asymptotic_example(1.5);
    CHECK(ex.q == doctest::Approx(0.3));
    CHECK(classify(ex.coeffs) == RepairClass::AsymptoticallyRepairable);
    const auto gauss = run_rate_experiment(ex.distribution, ex.coeffs, TargetKind::StableGauss, default_n_list());
    const auto pure = run_rate_experiment(ex.distribution, ex.coeffs, TargetKind::PureStable, default_n_list());
    CHECK(gauss.fit.exponent > pure.fit.exponent + 0.3);
    // Against the wrong target the error is eventually larger.
    CHECK(pure.rows.back().value > gauss.rows.back().value);
    CHECK_THROWS_AS(target_law(fitted(make_long_range(1.5), 1.5), TargetKind::StableGauss), CaseError);
}

TEST_CASE("correction terms for R = {2}")
{
    const auto c = closed_form_long_range(1.5);
    const auto terms = correction_terms(c);
    REQUIRE(terms.size() == 4);
    CHECK(terms[0].order == 1);
    CHECK(terms[0].exponent == doctest::Approx(2.0));
    CHECK(terms[0].coefficient == doctest::Approx(c.kappa_at(2.0)));
    CHECK(terms[1].exponent == doctest::Approx(3.0));
    CHECK(terms[1].coefficient == doctest::Approx(-0.5 * c.kappa_alpha * c.kappa_alpha));
    CHECK(terms[2].order == 2);
    CHECK(terms[2].coefficient == doctest::Approx(0.5 * c.kappa_at(2.0) * c.kappa_at(2.0)));
    for (const auto& t : terms)
        CHECK(t.n_power > -2.0);
    CHECK(correction_terms(c, {2.0}).size() == 1);

    ExpansionCoefficients general = c;
    general.kappa[2.5] = 0.1;
    CHECK_THROWS_AS(correction_terms(general), UnsupportedRegularityError);
}

TEST_CASE("expansion residual")
{
    const auto p = make_long_range(1.5);
    const auto cp = fitted(p, 1.5);
    const auto repaired = convolve(p, make_repairer(cp.kappa_at(2.0)));
    const auto cr = fitted(repaired, 1.5);

    // n = 1: direct difference minus the single C_{2 alpha} u_{2 alpha} term.
    const StableLaw law{1.5, cr.kappa_alpha, 0.0};
    for (long long x : {0, 2, 7}) {
        const double direct = repaired.pmf(x) - stable_nstep_density(law, 1, static_cast<double>(x), tight()) +
                              0.5 * cr.kappa_alpha * cr.kappa_alpha *
                                  u_profile(1.5, cr.kappa_alpha, 3.0, static_cast<double>(x), tight());
        CHECK(std::abs(expansion_residual(repaired, cr, 1, x, tight()) - direct) < 1e-9);
    }

    // Repaired: residual n^{3/alpha} stays bounded at fixed x / n^{1/alpha}.
    double lo = 1e300, hi = 0.0;
    for (long long n : {16, 32, 64, 128, 256}) {
        const auto x = static_cast<long long>(std::llround(0.5 * std::pow(static_cast<double>(n), 1.0 / 1.5)));
        const auto grid = expansion_residual_grid(repaired, cr, n, x);
        const double single = expansion_residual(repaired, cr, n, x, tight());
        CHECK(std::abs(grid[static_cast<std::size_t>(x)] - single) < 1e-12);
        const double scaled = std::abs(single) * std::pow(static_cast<double>(n), 2.0);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    CHECK(hi < 2.0 * lo);

    // Ablation: the kappa2 u_2 term matters for the unrepaired law.
    for (long long n : {32, 128, 512}) {
        const auto x_max = static_cast<long long>(10.0 * std::pow(static_cast<double>(n), 1.0 / 1.5));
        double with = 0.0, without = 0.0;
        for (double v : expansion_residual_grid(p, cp, n, x_max))
            with = std::max(with, std::abs(v));
        for (double v : expansion_residual_grid(p, cp, n, x_max, {2.0}))
            without = std::max(without, std::abs(v));
        CHECK(with < without);
    }
}
