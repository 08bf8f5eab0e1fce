#include "stablewalk/lclt.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace stablewalk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double lattice_floor = 1e-18;

// Rejects targets whose leading term does not match the lattice law near theta = 0.
void check_target(const LatticeDistribution& d, const StableLaw& target)
{
    target.validate();
    const double t = 1e-8;
    const double expected = target.kappa_alpha * std::pow(t, target.alpha) + target.gauss_kappa2 * t * t;
    const double ratio = d.complement(t) / expected;
    if (!(std::abs(ratio - 1.0) < 0.05))
        throw DomainError("target does not match the law's leading behaviour (complement ratio " +
                          format_double(ratio) + " at theta = 1e-8)");
}

// Relative accuracy assumed for fast_complement when bounding evaluation error.
constexpr double complement_rel_error = 1e-14;

struct Transform {
    std::vector<double> values;
    double evaluation_bound = 0.0; // propagated complement error, uniform in x
};

// Cosine transform on shared nodes of (1_{theta < pi} phi^n - envelope) for x = 0..x_max.
template <class Envelope>
Transform difference_transform(const LatticeDistribution& d, long long n, double hi, long long x_max, int split,
                               const Envelope& envelope)
{
    const NodeSet rule = cosine_nodes(hi, static_cast<double>(std::max<long long>(x_max, 1)), split, {pi});
    std::vector<double> v(rule.nodes.size());
    Transform out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = rule.nodes[i];
        double lattice = 0.0;
        if (t < pi) {
            const double c = d.fast_complement(t);
            lattice = power_of_char_fn(c, n);
            out.evaluation_bound += rule.weights[i] * std::abs(lattice) * static_cast<double>(n) *
                                    complement_rel_error * c / std::max(std::abs(1.0 - c), 1e-300);
        }
        v[i] = lattice - envelope(t);
    }
    out.values = cosine_sums(rule, v, x_max);
    for (auto& e : out.values)
        e /= pi;
    out.evaluation_bound /= pi;
    return out;
}

double integration_limit(const LatticeDistribution& d, long long n, const StableLaw& law)
{
    return std::max(char_fn_power_cutoff(d, n, lattice_floor), law.cutoff(n));
}

// Correction polynomial sum_k D n^k theta^J multiplying the stable envelope.
double correction_factor(const std::vector<CorrectionTerm>& terms, long long n, double t)
{
    double s = 1.0;
    for (const auto& c : terms)
        s += c.coefficient * std::pow(static_cast<double>(n), c.order) * std::pow(t, c.exponent);
    return s;
}

} // namespace

std::string to_string(TargetKind t) { return t == TargetKind::PureStable ? "pure" : "gauss"; }

StableLaw target_law(const ExpansionCoefficients& coeffs, TargetKind kind)
{
    StableLaw law{coeffs.alpha, coeffs.kappa_alpha, 0.0};
    if (kind == TargetKind::StableGauss) {
        const double k2 = coeffs.kappa_at(2.0);
        if (!(k2 < 0.0))
            throw CaseError("the Gaussian-corrected target needs a negative kappa2");
        law.gauss_kappa2 = -k2;
    }
    return law;
}

SupError sup_error(const LatticeDistribution& d, long long n, const StableLaw& target, const SupErrorOptions& options)
{
    if (n < 1)
        throw DomainError("sup_error: n must be positive");
    check_target(d, target);
    const double scale = std::pow(static_cast<double>(n), 1.0 / target.alpha);
    const double hi = integration_limit(d, n, target);
    const auto envelope = [&](double t) { return std::exp(-target.log_decay(n, t)); };

    for (double w = options.window_factor;; w *= 2.0) {
        const auto x_max = static_cast<long long>(std::ceil(w * scale));
        const auto fine_t = difference_transform(d, n, hi, x_max, 2, envelope);
        const auto& fine = fine_t.values;
        const auto coarse = difference_transform(d, n, hi, x_max, 1, envelope).values;

        SupError out;
        out.n = n;
        out.window = x_max;
        out.window_factor = w;
        double outer = 0.0;
        for (long long x = 0; x <= x_max; ++x) {
            const double v = std::abs(fine[static_cast<std::size_t>(x)]);
            if (v > out.value) {
                out.value = v;
                out.argmax_x = x;
            }
            if (2 * x >= x_max)
                outer = std::max(outer, v);
            out.tol_budget = std::max(out.tol_budget, std::abs(fine[static_cast<std::size_t>(x)] -
                                                               coarse[static_cast<std::size_t>(x)]));
        }
        out.tol_budget += fine_t.evaluation_bound;
        if (outer >= options.outer_fraction * out.value) {
            if (2.0 * w <= options.max_window_factor)
                continue;
            throw WindowTooSmallError("sup_error: difference still " + format_double(outer / out.value) +
                                      " of the sup on the outer half of the widest window");
        }
        if (out.tol_budget > options.max_tolerance_fraction * out.value)
            throw ToleranceDominatedError("sup_error: quadrature estimate " + format_double(out.tol_budget) +
                                          " exceeds " + format_double(options.max_tolerance_fraction) +
                                          " of the sup " + format_double(out.value));
        return out;
    }
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs)
{
    if (pairs.size() < 4)
        throw DomainError("rate_fit: need at least four (n, error) pairs");
    double mx = 0.0, my = 0.0;
    for (const auto& [n, e] : pairs) {
        if (!(n > 0.0) || !(e > 0.0))
            throw DomainError("rate_fit: n and errors must be positive");
        mx += std::log(n);
        my += std::log(e);
    }
    const double m = static_cast<double>(pairs.size());
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, e] : pairs) {
        const double dx = std::log(n) - mx, dy = std::log(e) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw DomainError("rate_fit: degenerate fit, all n are equal");
    const double slope = sxy / sxx;
    RateFit fit;
    fit.exponent = -slope;
    fit.prefactor = std::exp(my - slope * mx);
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

double theoretical_exponent(const ExpansionCoefficients& coeffs, TargetKind target)
{
    const double a = coeffs.alpha;
    if (target == TargetKind::StableGauss)
        return 1.0 + 1.0 / a;
    return (j_set(a, coeffs.regularity_set()).beta1 + 1.0 - a) / a;
}

std::vector<long long> default_n_list() { return {16, 32, 64, 128, 256, 512, 1024}; }

RateExperiment run_rate_experiment(const LatticeDistribution& d, const ExpansionCoefficients& coeffs,
                                   TargetKind target, const std::vector<long long>& n_list,
                                   const SupErrorOptions& options)
{
    if (n_list.empty())
        throw DomainError("rate experiment: empty n list");
    for (std::size_t i = 0; i < n_list.size(); ++i)
        if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1]))
            throw DomainError("rate experiment: n list must be positive and increasing");
    RateExperiment ex;
    ex.distribution = d.to_json();
    ex.target = target;
    ex.law = target_law(coeffs, target);
    ex.n_list = n_list;
    std::vector<std::pair<double, double>> pairs;
    for (long long n : n_list) {
        ex.rows.push_back(sup_error(d, n, ex.law, options));
        pairs.emplace_back(static_cast<double>(n), ex.rows.back().value);
    }
    ex.fit = rate_fit(pairs);
    ex.theoretical_exponent = theoretical_exponent(coeffs, target);
    return ex;
}

std::string RateExperiment::csv() const
{
    std::ostringstream os;
    os << "n,sup_error,argmax_x,tol_budget\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_double(r.value) << ',' << r.argmax_x << ',' << format_double(r.tol_budget) << '\n';
    return os.str();
}

nlohmann::json RateExperiment::summary() const
{
    nlohmann::json j;
    j["exponent"] = fit.exponent;
    j["r2"] = fit.r2;
    j["theoretical_exponent"] = theoretical_exponent;
    j["target"] = to_string(target);
    j["target_law"] = {{"alpha", law.alpha}, {"kappa_alpha", law.kappa_alpha}, {"gauss_kappa2", law.gauss_kappa2}};
    j["distribution"] = distribution;
    j["n_list"] = n_list;
    auto windows = nlohmann::json::array();
    for (const auto& r : rows)
        windows.push_back(r.window_factor);
    j["window_factors"] = windows;
    return j;
}

std::vector<CorrectionTerm> correction_terms(const ExpansionCoefficients& coeffs, const std::vector<double>& omit)
{
    const auto r = coeffs.regularity_set();
    if (!(r.empty() || (r.size() == 1 && std::abs(r[0] - 2.0) <= exponent_snap)))
        throw UnsupportedRegularityError("expansion residual: corrections are reconstructed only for R within {2}");
    const double a = coeffs.alpha;
    ExponentSeries eta = j_set(coeffs).eta;
    for (double e : omit)
        std::erase_if(eta, [e](const auto& kv) { return std::abs(kv.first - e) <= exponent_snap; });

    std::vector<CorrectionTerm> terms;
    if (eta.empty())
        return terms;
    const double floor_power = -3.0 / a;
    const double lowest = eta.begin()->first;
    // Exponents J with k - (1 + J)/alpha > -3/alpha, i.e. J < alpha k + 2.
    ExponentSeries power{{0.0, 1.0}};
    double factorial = 1.0;
    for (int k = 1; k - (1.0 + k * lowest) / a > floor_power + exponent_snap; ++k) {
        power = series_multiply(power, eta, a * k + 2.0);
        factorial *= k;
        for (const auto& [j, c] : power) {
            const double n_power = k - (1.0 + j) / a;
            if (n_power > floor_power + exponent_snap && c != 0.0)
                terms.push_back({k, j, c / factorial, n_power});
        }
    }
    return terms;
}

double expansion_residual(const LatticeDistribution& d, const ExpansionCoefficients& coeffs, long long n,
                          long long x, const QuadratureSpec& spec, const std::vector<double>& omit)
{
    if (n < 1)
        throw DomainError("expansion residual: n must be positive");
    const auto terms = correction_terms(coeffs, omit);
    const StableLaw law{coeffs.alpha, coeffs.kappa_alpha, 0.0};
    const auto corrected = [&](double t) {
        return std::exp(-law.log_decay(n, t)) * correction_factor(terms, n, t);
    };
    const double freq = static_cast<double>(std::llabs(x));
    const double hi = integration_limit(d, n, law);
    double value = oscillatory_integral(
                       [&](double t) { return power_of_char_fn(d.fast_complement(t), n) - corrected(t); }, freq,
                       {0.0, std::min(hi, pi)}, spec)
                       .value;
    if (hi > pi)
        value -= oscillatory_integral(corrected, freq, {pi, hi}, spec).value;
    return value / pi;
}

std::vector<double> expansion_residual_grid(const LatticeDistribution& d, const ExpansionCoefficients& coeffs,
                                            long long n, long long x_max, const std::vector<double>& omit)
{
    if (n < 1 || x_max < 0)
        throw DomainError("expansion residual grid: need n >= 1 and x_max >= 0");
    const auto terms = correction_terms(coeffs, omit);
    const StableLaw law{coeffs.alpha, coeffs.kappa_alpha, 0.0};
    return difference_transform(d, n, integration_limit(d, n, law), x_max, 2, [&](double t) {
               return std::exp(-law.log_decay(n, t)) * correction_factor(terms, n, t);
           }).values;
}

AsymptoticExample make_asymptotic_example(double alpha)
{
    const auto base = make_long_range(alpha);
    const auto plus_minus_one = make_finite_support({0.0, 0.5});
    for (int tenth = 5; tenth >= 1; --tenth) {
        const double q = tenth / 10.0;
        auto d = mix(base, plus_minus_one, q);
        auto coeffs = fit_expansion([&d](double t) { return d.complement(t); }, alpha, default_candidates(alpha));
        if (classify(coeffs) == RepairClass::AsymptoticallyRepairable &&
            std::abs(coeffs.kappa_at(2.0)) >= coeffs.kappa_alpha / 4.0)
            return {std::move(d), std::move(coeffs), q};
    }
    throw MisfitError("make_asymptotic_example: no mixture weight gave a clearly negative kappa2");
}

} // namespace stablewalk
