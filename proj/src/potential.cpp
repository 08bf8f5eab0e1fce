#include "stablewalk/potential.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/format.hpp"
#include "stablewalk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace stablewalk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double critical_tol = 1e-9;
// Relative error assumed for 1/(1 - phi), covering the complement table and a fitted kappa_alpha.
constexpr double inverse_rel_error = 1e-12;

struct SingularTerm {
    double K = 0.0; // 1/(1 - phi) contains K theta^{-s}
    double s = 0.0;
};

// Leading part of 1/(1 - phi) = (1/(kappa theta^alpha)) sum_m u^m with
// u = sum_beta (kappa_beta/kappa) theta^{beta - alpha}: every term with s > 0. Terms with s >= 1
// shape the growth in x; the integrable ones are subtracted too so the numerical remainder is
// small near theta = 0.
std::vector<SingularTerm> singular_terms(double alpha, double kappa, const std::map<double, double>& kappa_beta)
{
    ExponentSeries u;
    for (const auto& [beta, k] : kappa_beta)
        series_add(u, beta - alpha, k / kappa);
    const double cutoff = alpha;
    ExponentSeries geometric{{0.0, 1.0}};
    ExponentSeries power{{0.0, 1.0}};
    while (true) {
        power = series_multiply(power, u, cutoff);
        if (power.empty())
            break;
        for (const auto& [e, c] : power)
            series_add(geometric, e, c);
    }
    std::vector<SingularTerm> out;
    for (const auto& [e, c] : geometric)
        if (c != 0.0)
            out.push_back({c / kappa, alpha - e});
    return out;
}

bool is_growth_term(const SingularTerm& t) { return t.s >= 1.0 - critical_tol; }

bool is_log_term(const SingularTerm& t) { return std::abs(t.s - 1.0) <= critical_tol; }

// x-power coefficient of (1/pi) int_0^pi (cos theta x - 1) K theta^{-s}, s in (1, 2).
double power_coefficient(const SingularTerm& t) { return -t.K * specfun::frac_cos_integral(t.s - 1.0) / pi; }

// x-independent part of the same integral as x -> infinity; for integrable terms, minus the
// integral of the term over [0, pi].
double constant_part(const SingularTerm& t)
{
    if (!is_growth_term(t))
        return -t.K * std::pow(pi, 1.0 - t.s) / (pi * (1.0 - t.s));
    if (is_log_term(t))
        return -t.K * (specfun::euler_gamma + std::log(pi)) / pi;
    return t.K * std::pow(pi, 1.0 - t.s) / (pi * (t.s - 1.0));
}

struct Remainder {
    double integral = 0.0; // int_0^pi (1/(1 - phi) - sum K theta^{-s}) d theta
    double error = 0.0;
};

// The integrand is integrable at 0 but computed with cancellation there; the integral is cut
// at the theta_c that balances rounding noise against the neglected piece.
Remainder remainder_integral(const LatticeDistribution& d, double alpha, double kappa,
                             const std::vector<SingularTerm>& terms, const QuadratureSpec& spec)
{
    const auto g = [&](double t) {
        double v = 1.0 / d.fast_complement(t);
        for (const auto& s : terms)
            v -= s.K * std::pow(t, -s.s);
        return v;
    };
    const auto noise_from = [&](double t) {
        const double integral_of_inverse =
            std::abs(alpha - 1.0) < critical_tol ? std::log(pi / t) / kappa
                                                 : (std::pow(t, 1.0 - alpha) - std::pow(pi, 1.0 - alpha)) /
                                                       (kappa * (alpha - 1.0));
        return inverse_rel_error * integral_of_inverse;
    };
    double best_cut = pi / 16.0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 4; k <= 60; ++k) {
        const double t = std::ldexp(pi, -k);
        const double cost = noise_from(t) + 4.0 * std::abs(g(t)) * t;
        if (cost < best_cost) {
            best_cost = cost;
            best_cut = t;
        }
    }
    std::vector<double> breaks;
    for (double t = best_cut; t < pi; t *= 2.0)
        breaks.push_back(t);
    breaks.push_back(pi);
    QuadratureSpec relaxed = spec;
    relaxed.abs_tol = std::max(spec.abs_tol, best_cost);
    const auto r = integrate_panels(g, breaks, relaxed);
    return {r.value, r.abs_error + best_cost};
}

void require_kernel_index(const LatticeDistribution& d)
{
    const auto a = d.index();
    if (!a)
        throw DomainError("potential kernel: needs a heavy-tailed law");
    if (*a < 1.0 - critical_tol)
        throw DomainError("potential kernel: index below 1 is not covered");
}

void fill_from_terms(PotentialExpansion& e, const std::vector<SingularTerm>& terms,
                     const std::map<double, int>& ladder_index)
{
    for (const auto& t : terms) {
        if (std::abs(t.s - e.alpha) <= critical_tol || !is_growth_term(t))
            continue; // the leading term, C_alpha or the alpha = 1 log
        if (is_log_term(t)) {
            e.C0_prime += -t.K / pi;
            continue;
        }
        const double c = power_coefficient(t);
        bool named = false;
        for (const auto& [s, m] : ladder_index)
            if (std::abs(s - t.s) <= critical_tol) {
                e.C_m[m] = c;
                named = true;
            }
        if (!named) {
            if (e.delta && std::abs(t.s - (2.0 * e.alpha - *e.delta)) <= critical_tol)
                e.C_delta = c;
            else
                e.extra_powers[t.s - 1.0] += c;
        }
    }
}

} // namespace

std::string to_string(PotentialCase c)
{
    switch (c) {
    case PotentialCase::RepairedA: return "RepairedA";
    case PotentialCase::LadderA: return "LadderA";
    case PotentialCase::GeneralDeltaSmall: return "GeneralDeltaSmall";
    case PotentialCase::GeneralDeltaLarge: return "GeneralDeltaLarge";
    case PotentialCase::GeneralDeltaCritical: return "GeneralDeltaCritical";
    case PotentialCase::AlphaOne: return "AlphaOne";
    }
    return "Unknown";
}

double PotentialExpansion::predict(double x) const
{
    const double ax = std::abs(x);
    double v = C_0.value_or(0.0);
    if (ax == 0.0)
        return v;
    if (case_tag != PotentialCase::AlphaOne)
        v += C_alpha * std::pow(ax, alpha - 1.0);
    for (const auto& [m, c] : C_m)
        v += c * std::pow(ax, alpha - 1.0 - m * (2.0 - alpha));
    if (C_delta && delta)
        v += *C_delta * std::pow(ax, 2.0 * alpha - *delta - 1.0);
    for (const auto& [p, c] : extra_powers)
        v += c * std::pow(ax, p);
    v += C0_prime * std::log(ax);
    return v;
}

double PotentialExpansion::residual_scale_exponent() const
{
    switch (case_tag) {
    case PotentialCase::RepairedA: return (2.0 - alpha) / 3.0 - 0.05;
    case PotentialCase::AlphaOne: return 1.0 / 3.0 - 0.05;
    case PotentialCase::GeneralDeltaSmall: return -(2.0 * alpha - delta.value_or(alpha) - 1.0);
    default: return 0.0;
    }
}

nlohmann::json PotentialExpansion::to_json() const
{
    nlohmann::json j;
    j["case"] = to_string(case_tag);
    j["alpha"] = alpha;
    j["kappa_alpha"] = kappa_alpha;
    j["C_alpha"] = C_alpha;
    j["C_0"] = C_0 ? nlohmann::json(*C_0) : nlohmann::json(nullptr);
    j["C_0_error"] = C_0_error;
    j["C0_prime"] = C0_prime;
    j["m_alpha"] = m_alpha;
    auto cm = nlohmann::json::object();
    for (const auto& [m, c] : C_m)
        cm[std::to_string(m)] = c;
    j["C_m"] = cm;
    j["C_delta"] = C_delta ? nlohmann::json(*C_delta) : nlohmann::json(nullptr);
    j["delta"] = delta ? nlohmann::json(*delta) : nlohmann::json(nullptr);
    auto extra = nlohmann::json::array();
    for (const auto& [p, c] : extra_powers)
        extra.push_back({{"x_power", p}, {"coefficient", c}});
    j["extra_powers"] = extra;
    j["stated"] = stated;
    return j;
}

double potential_kernel(const LatticeDistribution& d, long long x, const QuadratureSpec& spec)
{
    require_kernel_index(d);
    if (x == 0)
        return 0.0;
    const double fx = static_cast<double>(std::llabs(x));
    const auto f = [&](double t) {
        if (t == 0.0)
            return 0.0;
        const double s = std::sin(0.5 * t * fx);
        return -2.0 * s * s / d.fast_complement(t);
    };
    if (!std::isfinite(f(1e-8)))
        throw NonConvergenceError("potential kernel: integrand is not finite near 0");
    return integrate_panels(f, oscillatory_breakpoints(0.0, pi, fx, spec.max_panels), spec).value / pi;
}

PartialSum partial_sum_oracle(const LatticeDistribution& d, long long x, long long N)
{
    if (N < 1)
        throw DomainError("partial_sum_oracle: N must be positive");
    const double fx = static_cast<double>(std::llabs(x));
    PartialSum out;
    out.terms = N + 1;
    if (x == 0)
        return out;

    struct Nodes {
        std::vector<double> phi, weight, power;
    };
    const auto prepare = [&](int split) {
        const NodeSet rule = cosine_nodes(pi, std::max(fx, 1.0), split);
        Nodes n;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = rule.nodes[i];
            n.phi.push_back(d.fast_char_fn(t));
            n.weight.push_back(rule.weights[i] * (std::cos(t * fx) - 1.0) / pi);
        }
        n.power.assign(n.phi.size(), 1.0);
        return n;
    };
    Nodes coarse = prepare(1);
    Nodes fine = prepare(2);
    const auto step = [](Nodes& n) {
        double s = 0.0;
        for (std::size_t i = 0; i < n.phi.size(); ++i) {
            n.power[i] *= n.phi[i];
            s += n.weight[i] * n.power[i];
        }
        return s;
    };

    const long long decade_start = std::max<long long>(1, N / 10);
    std::vector<std::pair<double, double>> decade; // (n, summand)
    out.value = -1.0; // n = 0: p^0(x) - p^0(0) = -1
    for (long long n = 1; n <= N; ++n) {
        const double s_fine = step(fine);
        const double s_coarse = step(coarse);
        out.value += s_fine;
        out.quadrature_error += std::abs(s_fine - s_coarse);
        if (n >= decade_start)
            decade.emplace_back(static_cast<double>(n), s_fine);
    }

    // Power-law fit |s_n| = A n^{-b} over a stretch of the last decade, integrated beyond N.
    const auto tail_from = [&](std::size_t lo, std::size_t hi, double* exponent) {
        double mx = 0.0, my = 0.0, sxx = 0.0, sxy = 0.0;
        const double m = static_cast<double>(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            mx += std::log(decade[i].first);
            my += std::log(std::abs(decade[i].second));
        }
        mx /= m;
        my /= m;
        for (std::size_t i = lo; i < hi; ++i) {
            const double dx = std::log(decade[i].first) - mx;
            sxx += dx * dx;
            sxy += dx * (std::log(std::abs(decade[i].second)) - my);
        }
        const double b = -sxy / sxx;
        if (exponent)
            *exponent = b;
        if (!(b > 1.0))
            return std::numeric_limits<double>::infinity();
        const double a = std::exp(my + b * mx);
        return a * std::pow(static_cast<double>(N) + 0.5, 1.0 - b) / (b - 1.0);
    };
    const bool one_signed = std::all_of(decade.begin(), decade.end(), [&](const auto& p) {
        return p.second != 0.0 && std::signbit(p.second) == std::signbit(decade.back().second);
    });
    if (decade.size() < 8 || !one_signed) {
        out.tail_uncertainty = std::numeric_limits<double>::infinity();
        return out;
    }
    const double sign = std::signbit(decade.back().second) ? -1.0 : 1.0;
    const std::size_t mid = decade.size() / 2;
    const double whole = tail_from(0, decade.size(), &out.tail_exponent);
    const double early = tail_from(0, mid, nullptr);
    const double late = tail_from(mid, decade.size(), nullptr);
    out.tail_estimate = sign * whole;
    out.tail_uncertainty = std::max(std::abs(early - late), 0.05 * std::abs(whole));
    return out;
}

double const_C_alpha(double alpha, double kappa_alpha)
{
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("const_C_alpha: alpha must lie in (1, 2)");
    if (!(kappa_alpha > 0.0))
        throw DomainError("const_C_alpha: kappa_alpha must be positive");
    return -specfun::frac_cos_integral(alpha - 1.0) / (pi * kappa_alpha);
}

ConstantTerm const_C0(const LatticeDistribution& d, double alpha, double kappa_alpha, const QuadratureSpec& spec)
{
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("const_C0: alpha must lie in (1, 2)");
    const SingularTerm lead{1.0 / kappa_alpha, alpha};
    // theta (1/(1 - phi) - 1/(kappa theta^alpha)) must shrink toward 0 at a visible rate, else a
    // further power or log appears.
    const auto scaled = [&](double t) {
        return std::abs(t / d.fast_complement(t) - std::pow(t, 1.0 - alpha) / kappa_alpha);
    };
    if (!(std::log10(scaled(1e-3) / scaled(1e-4)) > 0.05))
        throw CaseError("const_C0: the input has a non-integrable correction; no constant-order term");
    const auto r = remainder_integral(d, alpha, kappa_alpha, {lead}, spec);
    return {constant_part(lead) - r.integral / pi, r.error / pi};
}

Ladder const_ladder(double alpha, double kappa_alpha, double kappa2)
{
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("const_ladder: alpha must lie in (1, 2)");
    if (kappa2 == 0.0)
        throw DomainError("const_ladder: kappa2 must be nonzero");
    Ladder out;
    const double ratio = (alpha - 1.0) / (2.0 - alpha);
    out.m_alpha = static_cast<int>(std::ceil(ratio - critical_tol)) - 1;
    for (int m = 1; m <= out.m_alpha; ++m) {
        const SingularTerm t{std::pow(kappa2, m) / std::pow(kappa_alpha, m + 1), alpha - m * (2.0 - alpha)};
        out.C_m[m] = power_coefficient(t);
    }
    const int critical = out.m_alpha + 1;
    if (std::abs(ratio - std::round(ratio)) <= critical_tol)
        out.C0_prime = -std::pow(kappa2, critical) / (pi * std::pow(kappa_alpha, critical + 1));
    return out;
}

PotentialExpansion const_general_delta(double alpha, double kappa_alpha, double delta, double kappa_delta)
{
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("const_general_delta: alpha must lie in (1, 2)");
    if (!(delta > alpha && delta < 2.0 + alpha))
        throw DomainError("const_general_delta: delta must lie in (alpha, 2 + alpha)");
    PotentialExpansion e;
    e.alpha = alpha;
    e.kappa_alpha = kappa_alpha;
    e.delta = delta;
    e.C_alpha = const_C_alpha(alpha, kappa_alpha);
    const double critical = 2.0 * alpha - 1.0;
    const double k2 = kappa_alpha * kappa_alpha;
    if (std::abs(delta - critical) <= critical_tol) {
        e.case_tag = PotentialCase::GeneralDeltaCritical;
        e.C0_prime = -kappa_delta / (pi * k2);
        e.C_delta = e.C0_prime;
        e.stated["C_delta"] = kappa_delta / (pi * kappa_alpha) * -specfun::cin(pi);
    } else if (delta < critical) {
        e.case_tag = PotentialCase::GeneralDeltaSmall;
        const double f = specfun::frac_cos_integral(2.0 * alpha - delta - 1.0);
        e.C_delta = -kappa_delta / (pi * k2) * f;
        e.stated["C_delta"] = -kappa_delta / (pi * kappa_alpha) * f;
    } else {
        e.case_tag = PotentialCase::GeneralDeltaLarge;
    }
    return e;
}

PotentialExpansion alpha_one_expansion(const LatticeDistribution& d, double kappa1, const QuadratureSpec& spec)
{
    const auto a = d.index();
    if (!a || std::abs(*a - 1.0) > critical_tol)
        throw DomainError("alpha_one_expansion: the law must have index 1");
    if (!(kappa1 > 0.0))
        throw DomainError("alpha_one_expansion: kappa1 must be positive");
    PotentialExpansion e;
    e.case_tag = PotentialCase::AlphaOne;
    e.alpha = 1.0;
    e.kappa_alpha = kappa1;
    const SingularTerm lead{1.0 / kappa1, 1.0};
    e.C0_prime = -1.0 / (pi * kappa1);
    const auto r = remainder_integral(d, 1.0, kappa1, {lead}, spec);
    e.C_0 = constant_part(lead) - r.integral / pi;
    e.C_0_error = r.error / pi;
    e.stated["C0_prime"] = e.C0_prime;
    e.stated["C_0"] = (specfun::euler_gamma + std::log(pi)) / (pi * kappa1);
    return e;
}

PotentialExpansion potential_expansion(const LatticeDistribution& d, const ExpansionCoefficients& coeffs,
                                       const QuadratureSpec& spec)
{
    require_kernel_index(d);
    const double alpha = coeffs.alpha;
    const double kappa = coeffs.kappa_alpha;
    if (alpha < 1.0 - critical_tol)
        throw DomainError("potential expansion: alpha below 1 is not covered");
    const bool alpha_one = std::abs(alpha - 1.0) <= critical_tol;

    const auto r = coeffs.regularity_set();
    const auto terms = singular_terms(alpha, kappa, coeffs.kappa);
    PotentialExpansion e;
    e.alpha = alpha;
    e.kappa_alpha = kappa;
    std::map<double, int> ladder_index;
    if (alpha_one) {
        e = alpha_one_expansion(d, kappa, spec);
    } else if (r.empty()) {
        e.case_tag = PotentialCase::RepairedA;
        e.C_alpha = const_C_alpha(alpha, kappa);
    } else if (r.size() == 1 && std::abs(r[0] - 2.0) <= critical_tol) {
        e.case_tag = PotentialCase::LadderA;
        e.C_alpha = const_C_alpha(alpha, kappa);
        const double k2 = coeffs.kappa.begin()->second;
        const Ladder ladder = const_ladder(alpha, kappa, k2);
        e.m_alpha = ladder.m_alpha;
        for (int m = 1; m <= ladder.m_alpha + 1; ++m)
            ladder_index[alpha - m * (2.0 - alpha)] = m;
        // Published log test 2/(2 - alpha) in N and its coefficient, for comparison.
        const double stated_ratio = 2.0 / (2.0 - alpha);
        const int critical = ladder.m_alpha + 1;
        e.stated["log_condition"] = std::abs(stated_ratio - std::round(stated_ratio)) <= critical_tol;
        e.stated["C0_prime"] = std::abs(stated_ratio - std::round(stated_ratio)) <= critical_tol
                                   ? std::pow(k2, critical) / (pi * std::pow(kappa, critical + 1)) * -specfun::cin(pi)
                                   : 0.0;
    } else {
        const double delta = r.front();
        PotentialExpansion g = const_general_delta(alpha, kappa, delta, coeffs.kappa.begin()->second);
        e.case_tag = g.case_tag;
        e.C_alpha = g.C_alpha;
        e.delta = delta;
        e.stated = g.stated;
    }
    fill_from_terms(e, terms, ladder_index);

    const auto rem = remainder_integral(d, alpha, kappa, terms, spec);
    double constant = -rem.integral / pi;
    for (const auto& t : terms)
        constant += constant_part(t);
    e.C_0 = constant;
    e.C_0_error = rem.error / pi;
    if (e.case_tag == PotentialCase::RepairedA || e.case_tag == PotentialCase::GeneralDeltaLarge) {
        // The displayed formula, with h = 1/(1 - phi) - 1/(kappa theta^alpha).
        double h_integral = rem.integral;
        for (const auto& t : terms)
            if (!is_growth_term(t))
                h_integral += t.K * std::pow(pi, 1.0 - t.s) / (1.0 - t.s);
        e.stated["C_0"] = -std::pow(pi, 1.0 - alpha) / (2.0 * pi * kappa * (alpha - 1.0)) + h_integral / pi;
    }
    return e;
}

std::vector<ResidualRow> residual_profile(const LatticeDistribution& d, const PotentialExpansion& expansion,
                                          const std::vector<long long>& x_grid, const QuadratureSpec& spec)
{
    const double p = expansion.residual_scale_exponent();
    std::vector<ResidualRow> rows;
    for (long long x : x_grid) {
        ResidualRow row;
        row.x = x;
        row.a_value = potential_kernel(d, x, spec);
        row.predicted = x == 0 ? 0.0 : expansion.predict(static_cast<double>(x));
        row.residual = row.a_value - row.predicted;
        row.residual_scaled = x == 0 ? 0.0 : row.residual * std::pow(std::abs(static_cast<double>(x)), p);
        rows.push_back(row);
    }
    return rows;
}

std::string residual_csv(const std::vector<ResidualRow>& rows)
{
    std::ostringstream os;
    os << "x,a_value,predicted,residual,residual_scaled\n";
    for (const auto& r : rows)
        os << r.x << ',' << format_double(r.a_value) << ',' << format_double(r.predicted) << ','
           << format_double(r.residual) << ',' << format_double(r.residual_scaled) << '\n';
    return os.str();
}

} // namespace stablewalk
