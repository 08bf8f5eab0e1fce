#include "stablewalk/expansion.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/format.hpp"
#include "stablewalk/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace stablewalk {

namespace {

bool same_exponent(double a, double b) { return std::abs(a - b) <= exponent_snap; }

bool contains_exponent(const std::vector<double>& set, double e)
{
    return std::any_of(set.begin(), set.end(), [e](double v) { return same_exponent(v, e); });
}

void insert_exponent(std::vector<double>& set, double e)
{
    if (!contains_exponent(set, e))
        set.insert(std::upper_bound(set.begin(), set.end(), e), e);
}

// All sums of nonnegative integer multiples of `base` lying in [lo, hi] (snapped).
std::vector<double> combinations_in(const std::vector<double>& base, double lo, double hi)
{
    std::vector<double> out;
    const auto recurse = [&](auto&& self, std::size_t first, double sum) -> void {
        if (sum >= lo - exponent_snap && sum <= hi + exponent_snap)
            insert_exponent(out, sum);
        for (std::size_t i = first; i < base.size(); ++i)
            if (sum + base[i] <= hi + exponent_snap)
                self(self, i, sum + base[i]);
    };
    recurse(recurse, 0, 0.0);
    std::erase_if(out, [lo](double e) { return e < lo - exponent_snap || same_exponent(e, 0.0); });
    return out;
}

} // namespace

void series_add(ExponentSeries& s, double exponent, double value)
{
    auto it = s.lower_bound(exponent - exponent_snap);
    if (it != s.end() && same_exponent(it->first, exponent))
        it->second += value;
    else
        s.emplace(exponent, value);
}

ExponentSeries series_multiply(const ExponentSeries& a, const ExponentSeries& b, double cutoff)
{
    ExponentSeries out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b)
            if (ea + eb < cutoff - exponent_snap)
                series_add(out, ea + eb, ca * cb);
    return out;
}

ExponentSeries series_log1p(const ExponentSeries& t, double cutoff)
{
    if (t.empty())
        return {};
    if (t.begin()->first <= 0.0)
        throw DomainError("series_log1p: exponents must be positive");
    ExponentSeries out;
    ExponentSeries power = t;
    for (int k = 1; !power.empty(); ++k) {
        const double sign = k % 2 == 1 ? 1.0 : -1.0;
        for (const auto& [e, c] : power)
            series_add(out, e, sign * c / k);
        power = series_multiply(power, t, cutoff);
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    return out;
}

std::string to_string(RepairClass c)
{
    switch (c) {
    case RepairClass::Repaired: return "Repaired";
    case RepairClass::LocallyRepairable: return "LocallyRepairable";
    case RepairClass::AsymptoticallyRepairable: return "AsymptoticallyRepairable";
    case RepairClass::GeneralAdmissible: return "GeneralAdmissible";
    }
    return "Unknown";
}

std::vector<double> ExpansionCoefficients::regularity_set() const
{
    std::vector<double> r;
    for (const auto& [e, c] : kappa)
        r.push_back(e);
    return r;
}

double ExpansionCoefficients::kappa_at(double exponent) const
{
    for (const auto& [e, c] : kappa)
        if (same_exponent(e, exponent))
            return c;
    return 0.0;
}

void ExpansionCoefficients::validate() const
{
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("expansion: alpha must lie in (0, 2)");
    if (!(kappa_alpha > 0.0))
        throw DomainError("expansion: kappa_alpha must be positive");
    for (const auto& [e, c] : kappa) {
        if (!(e > alpha && e < 2.0 + alpha))
            throw DomainError("expansion: exponent " + format_double(e) + " outside (alpha, 2 + alpha)");
        if (c == 0.0)
            throw DomainError("expansion: zero coefficient at exponent " + format_double(e));
    }
}

nlohmann::json ExpansionCoefficients::to_json() const
{
    nlohmann::json j;
    j["alpha"] = alpha;
    j["kappa_alpha"] = kappa_alpha;
    j["error_order"] = error_order;
    j["terms"] = nlohmann::json::array();
    for (const auto& [e, c] : kappa)
        j["terms"].push_back({{"exponent", e}, {"kappa", c}});
    if (kappa_alpha > 0.0)
        j["class"] = to_string(classify(*this));
    if (diagnostics) {
        const auto& d = *diagnostics;
        auto as_terms = [](const std::map<double, double>& m) {
            auto arr = nlohmann::json::array();
            for (const auto& [e, c] : m)
                arr.push_back({{"exponent", e}, {"value", c}});
            return arr;
        };
        nlohmann::json dj;
        dj["max_residual"] = d.max_residual;
        dj["refined_max_residual"] = d.refined_max_residual;
        dj["condition_number"] = d.condition_number;
        dj["standard_error"] = as_terms(d.standard_error);
        dj["refinement_shift"] = as_terms(d.refinement_shift);
        dj["pruned"] = as_terms(d.pruned);
        dj["nuisance"] = as_terms(d.nuisance);
        if (d.leading_exponent) {
            dj["leading_exponent"] = *d.leading_exponent;
            dj["leading_coefficient"] = *d.leading_coefficient;
        }
        j["diagnostics"] = dj;
    }
    return j;
}

RepairClass classify(const ExpansionCoefficients& coeffs)
{
    const auto r = coeffs.regularity_set();
    if (r.empty())
        return RepairClass::Repaired;
    if (r.size() == 1 && same_exponent(r[0], 2.0))
        return coeffs.kappa.begin()->second > 0.0 ? RepairClass::LocallyRepairable
                                                   : RepairClass::AsymptoticallyRepairable;
    return RepairClass::GeneralAdmissible;
}

JSetInfo j_set(double alpha, const std::vector<double>& regularity_set)
{
    std::vector<double> base{alpha};
    for (double e : regularity_set) {
        if (!(e > alpha && e < 2.0 + alpha))
            throw DomainError("j_set: exponent outside (alpha, 2 + alpha)");
        insert_exponent(base, e);
    }
    JSetInfo info;
    for (double e : combinations_in(base, alpha, 2.0 + alpha))
        if (!same_exponent(e, alpha) && !same_exponent(e, 2.0 + alpha))
            info.j_set.push_back(e);
    info.j_set_plus = info.j_set;
    info.j_set_plus.push_back(2.0 + alpha);
    info.beta1 = info.j_set_plus[0];
    info.beta2 = info.j_set_plus.size() > 1 ? info.j_set_plus[1] : info.beta1;
    return info;
}

JSetInfo j_set(const ExpansionCoefficients& coeffs)
{
    JSetInfo info = j_set(coeffs.alpha, coeffs.regularity_set());
    const auto r = coeffs.regularity_set();
    if (r.empty() || (r.size() == 1 && same_exponent(r[0], 2.0))) {
        const double cutoff = 2.0 + coeffs.alpha;
        ExponentSeries t{{coeffs.alpha, -coeffs.kappa_alpha}};
        for (const auto& [e, c] : coeffs.kappa)
            series_add(t, e, c);
        info.eta = series_log1p(t, cutoff);
        info.eta.erase(info.eta.begin()); // the leading -kappa_alpha term
    }
    return info;
}

double closed_form_kappa_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("closed_form_kappa_alpha: alpha must lie in (0, 2)");
    if (std::abs(alpha - 1.0) < 1e-12)
        throw DomainError("closed_form_kappa_alpha: alpha = 1 is the special case 3/pi");
    return specfun::frac_cos_integral(alpha) / specfun::zeta(1.0 + alpha);
}

K2Value closed_form_K2(double alpha, int terms)
{
    if (!(alpha > 0.0 && alpha < 2.0) || std::abs(alpha - 1.0) < 1e-12)
        throw DomainError("closed_form_K2: alpha must lie in (0, 2) \\ {1}");
    if (terms < 1)
        throw DomainError("closed_form_K2: need at least one term");

    double series = 0.0;
    for (int m = 1; m <= terms; ++m) {
        const double ratio = std::exp(std::lgamma(m + alpha) - std::lgamma(m + 2.0));
        series += (m % 2 == 1 ? -1.0 : 1.0) * specfun::zeta_minus_one(m + alpha) * m * ratio / (m + 2.0);
    }
    // Envelope of |term m|: zeta(m+a) - 1 <= 5 2^{-(m+a)}, and Gamma(m+a)/Gamma(m+2) by
    // Gautschi's inequality.
    const auto envelope = [alpha](int m) {
        const double gamma_ratio = alpha >= 1.0 ? std::pow(m + 1.0, alpha - 2.0)
                                                : std::pow(static_cast<double>(m), alpha - 1.0) / (m + 1.0);
        return 5.0 * std::pow(2.0, -(m + alpha)) * m * gamma_ratio / (m + 2.0);
    };
    double tail = 0.0;
    constexpr int explicit_envelope_terms = 200;
    for (int m = terms + 1; m <= terms + explicit_envelope_terms; ++m)
        tail += envelope(m);
    tail += 2.0 * envelope(terms + explicit_envelope_terms + 1); // ratio of later terms < 1/2 + 1/m

    const double prefactor = 0.5 * (1.0 - alpha);
    const double scale = 0.5 / std::tgamma(alpha);
    K2Value k;
    k.value = prefactor * ((std::pow(2.0, 2.0 - alpha) - 1.0) / (2.0 - alpha) -
                           3.0 * (std::pow(2.0, 1.0 - alpha) - 1.0) / (2.0 * (1.0 - alpha)) + scale * series);
    k.truncation_bound = std::abs(prefactor) * scale * tail;
    if (k.truncation_bound > 1e-10)
        throw NonConvergenceError("closed_form_K2: truncation bound " + format_double(k.truncation_bound) +
                                  " exceeds 1e-10 at " + std::to_string(terms) + " terms");
    return k;
}

double closed_form_kappa2(double alpha, int terms)
{
    const double c = 0.5 / specfun::zeta(1.0 + alpha);
    return 2.0 * c * (0.5 / (2.0 - alpha) - 0.25 - closed_form_K2(alpha, terms).value);
}

ExpansionCoefficients closed_form_long_range(double alpha)
{
    ExpansionCoefficients e;
    e.alpha = alpha;
    e.error_order = 2.0 + alpha;
    if (std::abs(alpha - 1.0) < 1e-12) {
        e.kappa_alpha = 3.0 / std::numbers::pi;
        e.kappa[2.0] = 1.5 / (std::numbers::pi * std::numbers::pi);
    } else {
        e.kappa_alpha = closed_form_kappa_alpha(alpha);
        e.kappa[2.0] = closed_form_kappa2(alpha);
    }
    return e;
}

std::vector<double> default_candidates(double alpha)
{
    std::vector<double> out;
    for (double e : {1.0 + alpha, 2.0, 2.0 * alpha})
        if (e > alpha + exponent_snap && e < 2.0 + alpha - exponent_snap)
            insert_exponent(out, e);
    return out;
}

namespace {

struct Solve {
    std::vector<double> coef; // coefficients of 1 - phi, in column order
    std::vector<double> se;
    double condition = 0.0;
    double max_residual = 0.0;
};

// Weighted least squares of y = sum_j coef_j theta^{e_j} with rows scaled by theta^{-lead}.
Solve least_squares(const std::vector<double>& theta, const std::vector<double>& y,
                    const std::vector<double>& exponents, double lead, double max_condition)
{
    const auto m = static_cast<Eigen::Index>(theta.size());
    const auto p = static_cast<Eigen::Index>(exponents.size());
    Eigen::MatrixXd a(m, p);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double w = std::pow(theta[i], -lead);
        b(i) = y[i] * w;
        for (Eigen::Index j = 0; j < p; ++j)
            a(i, j) = std::pow(theta[i], exponents[j] - lead);
    }
    Eigen::VectorXd norms = a.colwise().norm();
    for (Eigen::Index j = 0; j < p; ++j)
        a.col(j) /= norms(j);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Solve out;
    out.condition = s(0) / s(p - 1);
    if (!(out.condition <= max_condition))
        throw IllConditionedError("fit_expansion: design condition number " + format_double(out.condition) +
                                  " exceeds " + format_double(max_condition));
    const Eigen::VectorXd x = svd.solve(b);
    const Eigen::VectorXd r = b - a * x;
    const double sigma2 = m > p ? r.squaredNorm() / static_cast<double>(m - p) : 0.0;
    const Eigen::MatrixXd v_scaled = svd.matrixV() * s.cwiseInverse().asDiagonal();
    for (Eigen::Index j = 0; j < p; ++j) {
        out.coef.push_back(x(j) / norms(j));
        out.se.push_back(std::sqrt(sigma2 * v_scaled.row(j).squaredNorm()) / norms(j));
    }
    for (Eigen::Index i = 0; i < m; ++i)
        out.max_residual = std::max(out.max_residual, std::abs(r(i)) * std::pow(theta[i], lead));
    return out;
}

struct Model {
    std::vector<double> exponents; // slot (optional), candidates, then nuisance
    std::size_t kept = 0;          // leading entries that are not nuisance
};

// Nuisance exponents are integer combinations of the model exponents and 2; they fill [error_order, error_order + 1] from below while the grid still
// supplies three points per unknown.
Model build_model(bool alpha_slot, double alpha, const std::vector<double>& candidates, double error_order,
                  std::size_t max_unknowns)
{
    Model model;
    if (alpha_slot)
        model.exponents.push_back(alpha);
    for (double c : candidates)
        model.exponents.push_back(c);
    model.kept = model.exponents.size();
    // Even powers enter every remainder through the smooth part of phi.
    std::vector<double> generators = model.exponents;
    insert_exponent(generators, 2.0);
    for (double e : combinations_in(generators, error_order, error_order + 1.0))
        if (!contains_exponent(model.exponents, e) && model.exponents.size() < max_unknowns)
            model.exponents.push_back(e);
    return model;
}

} // namespace

ExpansionCoefficients fit_expansion(const std::function<double(double)>& complement, double alpha,
                                    const std::vector<double>& candidates, const FitOptions& options)
{
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("fit_expansion: alpha must lie in (0, 2)");
    if (!(options.theta_max > 0.0 && options.theta_max <= 0.3))
        throw DomainError("fit_expansion: grid must lie in (0, 0.3]");
    std::vector<double> cands;
    for (double c : candidates) {
        if (contains_exponent(cands, c))
            throw DomainError("fit_expansion: candidate exponents must be distinct");
        if (options.alpha_slot ? !(c > alpha && c < 2.0 + alpha) : !(c > 0.0))
            throw DomainError("fit_expansion: candidate exponent " + format_double(c) + " out of range");
        insert_exponent(cands, c);
    }
    if (!options.alpha_slot && cands.empty())
        throw DomainError("fit_expansion: no exponents to fit");

    const double lead = options.alpha_slot ? alpha : cands.front();
    const double error_order = 2.0 + lead;

    // One extra dyadic level serves the refined grid.
    std::vector<double> theta(static_cast<std::size_t>(options.points) + 1);
    std::vector<double> y(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        theta[k] = std::ldexp(options.theta_max, -static_cast<int>(k));
        y[k] = complement(theta[k]);
        if (!std::isfinite(y[k]))
            throw NonConvergenceError("fit_expansion: complement is not finite on the grid");
    }
    const std::vector<double> theta_c(theta.begin(), theta.end() - 1), y_c(y.begin(), y.end() - 1);
    const std::vector<double> theta_f(theta.begin() + 1, theta.end()), y_f(y.begin() + 1, y.end());
    double y_scale = 0.0;
    for (double v : y_c)
        y_scale = std::max(y_scale, std::abs(v));

    auto run = [&](const std::vector<double>& kept_candidates) {
        const Model model = build_model(options.alpha_slot, alpha, kept_candidates, error_order,
                                        static_cast<std::size_t>(options.points) / 3);
        if (static_cast<std::size_t>(options.points) < 3 * model.exponents.size())
            throw DomainError("fit_expansion: need at least three grid points per unknown");
        return std::tuple{model,
                          least_squares(theta_c, y_c, model.exponents, lead, options.max_condition),
                          least_squares(theta_f, y_f, model.exponents, lead, options.max_condition)};
    };

    ExpansionCoefficients::Diagnostics diag;
    std::vector<double> kept;
    {
        const auto [model, coarse, fine] = run(cands);
        const std::size_t offset = options.alpha_slot ? 1 : 0;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            const std::size_t j = offset + i;
            const double shift = std::abs(coarse.coef[j] - fine.coef[j]);
            const double scale = std::max(shift, coarse.se[j]);
            if (std::abs(coarse.coef[j]) > options.prune_factor * scale)
                kept.push_back(cands[i]);
            else
                diag.pruned[cands[i]] = -coarse.coef[j];
        }
    }
    if (!options.alpha_slot && kept.empty())
        throw MisfitError("fit_expansion: every candidate was pruned");

    const auto [model, coarse, fine] = run(kept);
    diag.condition_number = coarse.condition;
    diag.max_residual = coarse.max_residual;
    diag.refined_max_residual = fine.max_residual;
    for (std::size_t j = 0; j < model.exponents.size(); ++j) {
        const double e = model.exponents[j];
        diag.standard_error[e] = coarse.se[j];
        diag.refinement_shift[e] = std::abs(coarse.coef[j] - fine.coef[j]);
        if (j >= model.kept)
            diag.nuisance[e] = -coarse.coef[j];
    }

    const double required = coarse.max_residual * std::pow(2.0, -(error_order - 0.1)) + 1e-14 * y_scale;
    if (fine.max_residual > required)
        throw MisfitError("fit_expansion: residual " + format_double(fine.max_residual) +
                          " on the refined grid does not shrink like theta^(" + format_double(error_order - 0.1) +
                          ") (needed <= " + format_double(required) + ")");

    ExpansionCoefficients out;
    out.alpha = alpha;
    out.error_order = error_order;
    std::size_t j = 0;
    if (options.alpha_slot) {
        out.kappa_alpha = coarse.coef[j++];
        if (!(out.kappa_alpha > 0.0))
            throw MisfitError("fit_expansion: fitted kappa_alpha is not positive");
    }
    for (double e : kept)
        out.kappa[e] = -coarse.coef[j++];
    if (!options.alpha_slot) {
        diag.leading_exponent = kept.front();
        diag.leading_coefficient = -out.kappa.begin()->second;
    }
    out.diagnostics = std::move(diag);
    return out;
}

} // namespace stablewalk
