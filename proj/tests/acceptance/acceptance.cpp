// Acceptance run: one verdict line per criterion, followed by indented diagnostics.
// Usage: acceptance [criterion numbers...]; exits 1 when any selected criterion fails.

#include "stablewalk/expansion.hpp"
#include "stablewalk/format.hpp"
#include "stablewalk/lclt.hpp"
#include "stablewalk/potential.hpp"
#include "stablewalk/specfun.hpp"
#include "stablewalk/stable.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace stablewalk;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string summary;
    std::vector<std::string> notes;
};

std::string fmt(double v) { return format_double(v); }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExpansionCoefficients fitted(const LatticeDistribution& d, double alpha)
{
    return fit_expansion([&d](double t) { return d.complement(t); }, alpha, default_candidates(alpha));
}

LatticeDistribution repaired_p15()
{
    const auto base = make_long_range(1.5);
    return convolve(base, make_repairer(fitted(base, 1.5).kappa_at(2.0)));
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Least-squares slope of log|y| against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < x.size(); ++i)
        pairs.emplace_back(x[i], std::abs(y[i]));
    return -rate_fit(pairs).exponent;
}

Verdict criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = fitted(make_long_range(1.0), 1.0);
    const double s = seconds_since(t0);
    const double k1 = c.kappa_alpha, k2 = c.kappa_at(2.0);
    const double d1 = std::abs(k1 - 3.0 / pi), d2 = std::abs(k2 - 3.0 / (2.0 * pi * pi));
    return {d1 < 1e-3 && d2 < 1e-2 && s < 10.0,
            "kappa1 = " + fmt(k1) + " (off by " + fmt(d1) + "), kappa2 = " + fmt(k2) + " (off by " + fmt(d2) +
                "), " + fmt(s) + " s",
            {}};
}

Verdict criterion2()
{
    Verdict v{true, "", {}};
    for (double a : {1.3, 1.5, 1.7}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto c = fitted(make_long_range(a), a);
        const double ka = closed_form_kappa_alpha(a), k2 = closed_form_kappa2(a);
        const double s = seconds_since(t0);
        const double bound = (a - 1.0) / (2.0 * specfun::zeta(1.0 + a)) / (2.0 - a);
        const double da = std::abs(ka - c.kappa_alpha), d2 = std::abs(k2 - c.kappa_at(2.0));
        const bool ok = da < 1e-4 && d2 < 1e-3 && k2 > bound && s < 60.0;
        v.pass = v.pass && ok;
        v.notes.push_back("alpha " + fmt(a) + ": kappa_alpha " + fmt(ka) + " vs fit (diff " + fmt(da) + "), kappa2 " +
                          fmt(k2) + " vs fit (diff " + fmt(d2) + "), positivity bound " + fmt(bound) + ", " + fmt(s) +
                          " s");
    }
    v.summary = "closed forms match the fits at alpha 1.3, 1.5, 1.7";
    return v;
}

RateExperiment repaired_run()
{
    const auto d = repaired_p15();
    return run_rate_experiment(d, fitted(d, 1.5), TargetKind::PureStable, default_n_list());
}

RateExperiment unrepaired_run()
{
    const auto d = make_long_range(1.5);
    return run_rate_experiment(d, fitted(d, 1.5), TargetKind::PureStable, default_n_list());
}

Verdict criterion3()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto ex = repaired_run();
    const double s = seconds_since(t0);
    Verdict v{ex.fit.exponent >= 1.52 && ex.fit.exponent <= 1.82 && ex.fit.r2 > 0.98 && s < 300.0,
              "exponent " + fmt(ex.fit.exponent) + " (target " + fmt(ex.theoretical_exponent) + "), r2 " +
                  fmt(ex.fit.r2) + ", " + fmt(s) + " s",
              {}};
    for (const auto& r : ex.rows)
        v.notes.push_back("n " + std::to_string(r.n) + ": sup error " + fmt(r.value));
    return v;
}

Verdict criterion4()
{
    const auto plain = unrepaired_run();
    const auto fixed = repaired_run();
    const double gap = fixed.fit.exponent - plain.fit.exponent;
    return {plain.fit.exponent >= 0.85 && plain.fit.exponent <= 1.15 && gap >= 0.4,
            "unrepaired exponent " + fmt(plain.fit.exponent) + " (target " + fmt(plain.theoretical_exponent) +
                "), repaired beats it by " + fmt(gap),
            {}};
}

Verdict criterion5()
{
    const auto ex = make_asymptotic_example(1.5);
    const auto gauss = run_rate_experiment(ex.distribution, ex.coeffs, TargetKind::StableGauss, default_n_list());
    const auto pure = run_rate_experiment(ex.distribution, ex.coeffs, TargetKind::PureStable, default_n_list());
    const double gap = gauss.fit.exponent - pure.fit.exponent;
    return {gap >= 0.3,
            "Gaussian-corrected exponent " + fmt(gauss.fit.exponent) + " vs pure " + fmt(pure.fit.exponent) +
                " (gap " + fmt(gap) + ")",
            {"mixture weight q = " + fmt(ex.q) + ", fitted kappa2 = " + fmt(ex.coeffs.kappa_at(2.0)) +
             ", kappa_alpha = " + fmt(ex.coeffs.kappa_alpha)}};
}

Verdict criterion6()
{
    const auto t0 = std::chrono::steady_clock::now();
    const QuadratureSpec spec;
    const auto d = make_long_range(1.0);
    const double claimed = (specfun::euler_gamma + std::log(pi)) / 3.0;
    const auto e = alpha_one_expansion(d, 3.0 / pi, spec);
    std::map<long long, double> a;
    for (long long x : {100LL, 1000LL, 10000LL})
        a[x] = potential_kernel(d, x, spec);
    const auto claimed_residual = [&](long long x) { return std::abs(a[x] + std::log(double(x)) / 3.0 - claimed); };
    const auto computed_residual = [&](long long x) { return std::abs(a[x] - e.predict(double(x))); };
    const double s = seconds_since(t0);
    const bool monotone = claimed_residual(1000) <= claimed_residual(100) && claimed_residual(10000) <= claimed_residual(1000);
    Verdict v{claimed_residual(1000) <= 1e-2 && claimed_residual(10000) <= 4e-3 && monotone && s < 120.0,
              "with C_0 = (gamma + log pi)/3 = " + fmt(claimed) + " the residual is " + fmt(claimed_residual(1000)) +
                  " at 1e3 and " + fmt(claimed_residual(10000)) + " at 1e4, " + fmt(s) + " s",
              {}};
    v.notes.push_back("a(0,x) for p_1 equals -Cin(2 pi x)/3 exactly; a(0,1e4) = " + fmt(a[10000]) + ", closed form " +
                      fmt(-specfun::cin(2.0 * pi * 1e4) / 3.0));
    v.notes.push_back("Cin(t) = gamma + log t - Ci(t) gives a(0,x) + (1/3) log x -> -(gamma + log 2 pi)/3 = " +
                      fmt(-(specfun::euler_gamma + std::log(2.0 * pi)) / 3.0) + "; computed C_0 = " + fmt(*e.C_0));
    v.notes.push_back("the claimed constant has the wrong sign and log argument, so the residual settles at " +
                      fmt(std::abs(*e.C_0 - claimed)) + " instead of vanishing");
    v.notes.push_back("with the computed C_0 the residual is " + fmt(computed_residual(100)) + ", " +
                      fmt(computed_residual(1000)) + ", " + fmt(computed_residual(10000)) +
                      " at x = 1e2, 1e3, 1e4 (monotone, within both thresholds)");
    return v;
}

Verdict criterion7()
{
    const QuadratureSpec spec;
    const auto d = repaired_p15();
    const auto coeffs = fitted(d, 1.5);
    const auto e = potential_expansion(d, coeffs, spec);
    std::vector<long long> grid;
    for (int k = 0; k <= 6; ++k)
        grid.push_back(50LL << k);
    const auto rows = residual_profile(d, e, grid, spec);
    std::vector<double> scaled, xs, residuals;
    for (const auto& r : rows) {
        scaled.push_back(std::abs(r.residual_scaled));
        xs.push_back(double(r.x));
        residuals.push_back(r.residual);
    }
    const double worst = *std::max_element(scaled.begin(), scaled.end());
    const double med = median(scaled);
    const double a4 = potential_kernel(d, 10000, spec);
    const double ratio = a4 / std::sqrt(1e4) / e.C_alpha;
    const bool bounded_proxy = worst <= 3.0 * med;
    const bool ratio_ok = std::abs(ratio - 1.0) < 0.05;
    Verdict v{bounded_proxy && ratio_ok,
              "max/median of |residual| x^" + fmt(e.residual_scale_exponent()) + " = " + fmt(worst / med) +
                  " (limit 3); a(0,1e4)/(C_alpha 1e2) = " + fmt(ratio) + " (limit 1 +- 0.05)",
              {}};
    for (const auto& r : rows)
        v.notes.push_back("x " + std::to_string(r.x) + ": residual " + fmt(r.residual) + ", scaled " + fmt(r.residual_scaled));
    v.notes.push_back("C_alpha = " + fmt(e.C_alpha) + ", C_0 = " + fmt(*e.C_0) + " (+- " + fmt(e.C_0_error) + ")");
    v.notes.push_back("residual decays like x^" + fmt(log_slope(xs, residuals)) +
                      ", far faster than the claimed x^(-1/6); the scaled residual is bounded by its value at x = 50 "
                      "but falls by more than 3x across the grid, so the max/median proxy fails");
    if (e.stated.contains("C_0")) {
        const double stated = e.stated["C_0"].get<double>();
        std::vector<double> alt;
        for (const auto& r : rows)
            alt.push_back(std::abs(r.a_value - e.C_alpha * std::sqrt(double(r.x)) - stated) *
                          std::pow(double(r.x), e.residual_scale_exponent()));
        v.notes.push_back("the displayed C_0 formula gives " + fmt(stated) + "; its residual tends to the constant " +
                          fmt(*e.C_0 - stated) + ", and its scaled max/median " + fmt(*std::max_element(alt.begin(), alt.end()) / median(alt)) +
                          " is not used for the verdict");
    }
    return v;
}

Verdict criterion8()
{
    const QuadratureSpec spec;
    Verdict v{true, "", {}};
    double worst_pmf = 0.0;
    const std::vector<LatticeDistribution> finite = {make_finite_support({0.5, 0.25}),
                                                     make_finite_support({0.2, 0.3, 0.1}),
                                                     make_repairer(0.8), make_finite_support({0.0, 0.25, 0.0, 0.25})};
    for (const auto& d : finite)
        for (long long n = 1; n <= 6; ++n) {
            const auto table = brute_nstep(d, n, 6 * static_cast<long long>(d.masses().size()) + 2);
            for (long long x = -table.window; x <= table.window; ++x)
                worst_pmf = std::max(worst_pmf, std::abs(nstep_pmf(d, n, x, spec) - table.at(x)));
        }
    v.pass = worst_pmf < 1e-9;
    v.notes.push_back("nstep_pmf vs brute enumeration, 4 finite laws, n <= 6: max difference " + fmt(worst_pmf));
    double worst_excess = -1.0;
    for (double alpha : {1.0, 1.5}) {
        const auto d = make_long_range(alpha);
        for (long long x = -4; x <= 4; ++x) {
            const auto ps = partial_sum_oracle(d, x, 100000);
            const double a = potential_kernel(d, x, spec);
            const double budget = ps.tail_uncertainty + ps.quadrature_error + spec.abs_tol + spec.rel_tol * std::abs(a);
            const double gap = std::abs(ps.value + ps.tail_estimate - a);
            worst_excess = std::max(worst_excess, gap - budget);
            v.pass = v.pass && gap <= budget;
            if (x > 0)
                v.notes.push_back("alpha " + fmt(alpha) + ", x " + std::to_string(x) + ": kernel " + fmt(a) +
                                  ", partial sum " + fmt(ps.value) + " + tail " + fmt(ps.tail_estimate) + ", gap " +
                                  fmt(gap) + " within budget " + fmt(budget));
        }
    }
    v.summary = "brute max difference " + fmt(worst_pmf) + "; partial sums agree with the kernel for |x| <= 4 " +
                "(largest gap minus budget " + fmt(worst_excess) + ")";
    return v;
}

Verdict criterion9()
{
    QuadratureSpec fine_spec;
    fine_spec.abs_tol = 1e-16;
    fine_spec.rel_tol = 1e-12;
    Verdict v{true, "", {}};
    const auto scaled_max = [](double alpha, double j, int points, const QuadratureSpec& spec, double* slope) {
        double worst = 0.0;
        std::vector<double> xs, ys;
        for (int i = 0; i < points; ++i) {
            const double x = 10.0 * std::pow(100.0, double(i) / (points - 1));
            const double u = u_profile(alpha, 1.0, j, x, spec);
            worst = std::max(worst, std::abs(u) * std::pow(x, alpha + j + 1.0));
            xs.push_back(x);
            ys.push_back(u);
        }
        if (slope)
            *slope = log_slope(xs, ys);
        return worst;
    };
    for (const auto& [alpha, j] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {1.5, 2.0}, {1.5, 3.0}}) {
        double slope = 0.0;
        const double coarse = scaled_max(alpha, j, 41, QuadratureSpec{}, &slope);
        const double fine = scaled_max(alpha, j, 161, fine_spec, nullptr);
        const double change = std::abs(fine - coarse) / fine;
        const bool ok = std::isfinite(coarse) && std::isfinite(fine) && change < 0.05;
        v.pass = v.pass && ok;
        v.notes.push_back("alpha " + fmt(alpha) + ", j " + fmt(j) + ": max " + fmt(coarse) + " (41 points) vs " +
                          fmt(fine) + " (161 points, tighter quadrature), relative change " + fmt(change) +
                          "; u_j decays like x^" + fmt(slope));
    }
    v.summary = "scaled maxima finite and stable under grid and quadrature refinement";
    return v;
}

Verdict criterion10()
{
    double worst = 0.0, at = 0.0;
    const int points = 200000;
    for (int i = 0; i < points; ++i) {
        const double z = 10.0 * std::pow(1000.0, double(i) / (points - 1));
        const double s = std::abs(specfun::cin(z) - std::log(z) - specfun::euler_gamma) * z;
        if (s > worst) {
            worst = s;
            at = z;
        }
    }
    return {std::isfinite(worst) && worst <= 1.0 + 2.0 / 10.0,
            "max of |Cin(z) - log z - gamma| z over [10, 1e4] is " + fmt(worst) + " at z = " + fmt(at) +
                " (constant 1.2 suffices)",
            {}};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                            criterion6, criterion7, criterion8, criterion9, criterion10};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::stoi(argv[i]));
    if (selected.empty())
        for (int i = 1; i <= 10; ++i)
            selected.insert(i);
    bool all = true;
    for (int i : selected) {
        if (i < 1 || i > 10) {
            std::cerr << "unknown criterion " << i << '\n';
            return 2;
        }
        Verdict v;
        try {
            v = criteria[static_cast<std::size_t>(i - 1)]();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what(), {}};
        }
        std::cout << "criterion " << i << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.summary << '\n';
        for (const auto& n : v.notes)
            std::cout << "    " << n << '\n';
        std::cout.flush();
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
