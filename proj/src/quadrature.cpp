#include "stablewalk/quadrature.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/format.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <string>

namespace stablewalk {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr int grading_levels = 36;

struct Panel {
    double a;
    double b;
    double value;
    double error;
    double resabs;
    bool at_roundoff;
};

struct ByError {
    bool operator()(const Panel& lhs, const Panel& rhs) const { return lhs.error < rhs.error; }
};

// One Gauss-Kronrod 21 point panel with the QUADPACK error heuristic.
Panel gk21(const RealFn& f, double a, double b)
{
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& xk = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, 21> fx{};
    fx[0] = f(centre);
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double dx = half * xk[i];
        fx[2 * i - 1] = f(centre - dx);
        fx[2 * i] = f(centre + dx);
    }

    double kron = wk[0] * fx[0];
    double resabs = wk[0] * std::abs(fx[0]);
    double gsum = 0.0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double pair = fx[2 * i - 1] + fx[2 * i];
        kron += wk[i] * pair;
        resabs += wk[i] * (std::abs(fx[2 * i - 1]) + std::abs(fx[2 * i]));
        // Gauss nodes are the odd Kronrod abscissae.
        if (i % 2 == 1)
            gsum += wg[i / 2] * pair;
    }
    const double mean = 0.5 * kron;
    double resasc = wk[0] * std::abs(fx[0] - mean);
    for (std::size_t i = 1; i < xk.size(); ++i)
        resasc += wk[i] * (std::abs(fx[2 * i - 1] - mean) + std::abs(fx[2 * i] - mean));

    Panel p{a, b, kron * half, std::abs((kron - gsum) * half), resabs * std::abs(half), false};
    resasc *= std::abs(half);
    if (resasc != 0.0 && p.error != 0.0)
        p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
    const double floor = 50.0 * eps * p.resabs;
    if (p.error <= floor) {
        p.error = floor;
        p.at_roundoff = true;
    }
    if (half <= 4.0 * eps * std::max(std::abs(a), std::abs(b)))
        p.at_roundoff = true;
    return p;
}

} // namespace

void QuadratureSpec::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_panels < 1 || !(frequency_hint >= 0.0))
        throw DomainError("QuadratureSpec: abs_tol, rel_tol > 0, max_panels >= 1, frequency_hint >= 0");
}

QuadResult integrate_panels(const RealFn& f, const std::vector<double>& breakpoints,
                            const QuadratureSpec& spec)
{
    spec.validate();
    if (breakpoints.size() < 2)
        throw DomainError("integrate_panels: need at least two breakpoints");

    std::priority_queue<Panel, std::vector<Panel>, ByError> open;
    std::vector<Panel> closed;
    double total = 0.0;
    double pending_error = 0.0;
    double settled_error = 0.0;
    int panels = 0;

    auto admit = [&](const Panel& p) {
        total += p.value;
        ++panels;
        if (p.at_roundoff) {
            settled_error += p.error;
            closed.push_back(p);
        } else {
            pending_error += p.error;
            open.push(p);
        }
    };

    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i + 1] > breakpoints[i])
            admit(gk21(f, breakpoints[i], breakpoints[i + 1]));

    int since_resum = 0;
    while (!open.empty()) {
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
        if (pending_error <= tol)
            break;
        if (panels >= spec.max_panels)
            throw NonConvergenceError("quadrature: tolerance " + format_double(tol) +
                                      " not met within " + std::to_string(spec.max_panels) +
                                      " panels (error estimate " + format_double(pending_error) + ")");
        const Panel worst = open.top();
        open.pop();
        total -= worst.value;
        pending_error -= worst.error;
        --panels;
        const double mid = 0.5 * (worst.a + worst.b);
        admit(gk21(f, worst.a, mid));
        admit(gk21(f, mid, worst.b));

        // Refresh the running sums now and then so cancellation cannot drift.
        if (++since_resum == 256) {
            since_resum = 0;
            auto copy = open;
            double s = 0.0;
            double e = 0.0;
            while (!copy.empty()) {
                s += copy.top().value;
                e += copy.top().error;
                copy.pop();
            }
            for (const auto& p : closed)
                s += p.value;
            total = s;
            pending_error = e;
        }
    }

    QuadResult out;
    double sum = 0.0;
    double err = settled_error;
    while (!open.empty()) {
        sum += open.top().value;
        err += open.top().error;
        open.pop();
    }
    for (const auto& p : closed)
        sum += p.value;
    out.value = sum;
    out.abs_error = err;
    out.panels = panels;
    return out;
}

std::vector<double> oscillatory_breakpoints(double lo, double hi, double frequency, int max_panels)
{
    if (!(hi > lo))
        return {lo, hi};
    const double step = frequency > 0.0 ? std::numbers::pi / frequency
                                        : std::numeric_limits<double>::infinity();
    std::vector<double> pts;
    double start = lo;
    if (lo == 0.0) {
        const double h0 = std::min(hi, step);
        pts.push_back(0.0);
        for (int k = grading_levels; k >= 1; --k)
            pts.push_back(std::ldexp(h0, -k));
        start = h0;
    }
    if (std::isfinite(step)) {
        const double count = std::ceil((hi - start) / step);
        if (count > max_panels)
            throw NonConvergenceError("quadrature: " + std::to_string(count) +
                                      " half-period panels exceed max_panels");
        // Align to integer multiples of the half-period so neighbouring integrals share nodes.
        const auto first = static_cast<long long>(std::floor(start / step)) + 1;
        pts.push_back(start);
        for (long long k = first; k * step < hi; ++k)
            if (k * step > start)
                pts.push_back(static_cast<double>(k) * step);
        pts.push_back(hi);
    } else {
        pts.push_back(start);
        // Octave breakpoints help the adaptive scheme on long non-oscillatory ranges.
        for (double t = std::max(2.0 * start, 1.0); t < hi; t *= 2.0)
            pts.push_back(t);
        pts.push_back(hi);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

QuadResult integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec)
{
    if (!(b > a))
        return {};
    return integrate_panels(f, oscillatory_breakpoints(a, b, 0.0, spec.max_panels), spec);
}

QuadResult oscillatory_integral(const RealFn& envelope, double frequency, Interval domain,
                                const QuadratureSpec& spec, std::optional<TailCut> cut)
{
    spec.validate();
    if (!(frequency >= 0.0))
        throw DomainError("oscillatory_integral: frequency must be >= 0");
    if (!(domain.hi > domain.lo))
        return {};

    double hi = domain.hi;
    double tail = 0.0;
    if (!std::isfinite(hi)) {
        if (cut) {
            hi = cut->cutoff;
            tail = cut->bound;
        } else {
            // Walk outward until the envelope (times the length scale) is negligible
            // on a whole octave; the last checked value stands in for the tail bound.
            const double target = spec.abs_tol / 10.0;
            double t = std::max(1.0, 2.0 * std::abs(domain.lo));
            for (;; t *= 2.0) {
                if (t > 1e12)
                    throw NonConvergenceError("oscillatory_integral: envelope does not decay");
                double worst = 0.0;
                for (double s : {1.0, 1.25, 1.5, 1.75, 2.0})
                    worst = std::max(worst, std::abs(envelope(s * t)) * s * t);
                if (worst <= target) {
                    tail = worst;
                    break;
                }
            }
            hi = t;
        }
    }

    const RealFn integrand = [&](double t) { return envelope(t) * std::cos(frequency * t); };
    auto pts = oscillatory_breakpoints(domain.lo, hi, frequency, spec.max_panels);
    QuadResult r = integrate_panels(integrand, pts, spec);
    r.tail_bound = tail;
    r.abs_error += tail;
    return r;
}

NodeSet cosine_nodes(double hi, double max_frequency, int split, const std::vector<double>& breaks)
{
    using legendre = boost::math::quadrature::gauss<double, 20>;
    const auto& x = legendre::abscissa();
    const auto& w = legendre::weights();

    double width = hi / 16.0;
    if (max_frequency > 0.0)
        width = std::min(width, std::numbers::pi / max_frequency);
    std::vector<double> pts{0.0};
    for (int k = 30; k >= 1; --k)
        pts.push_back(std::ldexp(width, -k));
    const auto count = static_cast<long long>(std::ceil(hi / width));
    for (long long k = 1; k < count; ++k)
        pts.push_back(static_cast<double>(k) * width);
    pts.push_back(hi);
    for (double b : breaks)
        if (b > 0.0 && b < hi)
            pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    NodeSet rule;
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
        const double step = (pts[p + 1] - pts[p]) / split;
        for (int s = 0; s < split; ++s) {
            const double a = pts[p] + s * step;
            const double centre = a + 0.5 * step;
            const double half = 0.5 * step;
            // The 20 point rule has no centre node; abscissae come in +- pairs.
            for (std::size_t i = 0; i < x.size(); ++i) {
                for (double o : {-x[i], x[i]}) {
                    rule.nodes.push_back(centre + half * o);
                    rule.weights.push_back(half * w[i]);
                }
            }
        }
    }
    return rule;
}

std::vector<double> cosine_sums(const NodeSet& rule, const std::vector<double>& values, long long k_max)
{
    std::vector<double> out(static_cast<std::size_t>(k_max + 1), 0.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double amp = rule.weights[i] * values[i];
        if (amp == 0.0)
            continue;
        const std::complex<double> step = std::polar(1.0, rule.nodes[i]);
        std::complex<double> z = 1.0;
        for (long long k = 0; k <= k_max; ++k) {
            out[static_cast<std::size_t>(k)] += amp * z.real();
            z *= step;
            // Renormalise occasionally so rounding cannot drift the modulus.
            if ((k & 63) == 63)
                z = std::polar(1.0, static_cast<double>(k + 1) * rule.nodes[i]);
        }
    }
    return out;
}

} // namespace stablewalk
