#include "stablewalk/errors.hpp"
#include "stablewalk/format.hpp"
#include "stablewalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stablewalk {

namespace {
constexpr double pi = std::numbers::pi;
constexpr int cutoff_samples = 1024;
constexpr double envelope_floor = 1e-18;
} // namespace

double char_fn_power_cutoff(const LatticeDistribution& d, long long n, double threshold)
{
    std::vector<double> suffix(cutoff_samples + 2, 0.0);
    for (int j = cutoff_samples; j >= 1; --j) {
        const double a = std::abs(d.fast_char_fn(pi * j / cutoff_samples));
        suffix[j] = std::max(suffix[j + 1], a);
    }
    const double root = std::pow(threshold, 1.0 / static_cast<double>(std::max<long long>(n, 1)));
    for (int j = 1; j <= cutoff_samples; ++j)
        if (suffix[j] < root)
            return pi * j / cutoff_samples;
    return pi;
}

double nstep_pmf(const LatticeDistribution& d, long long n, long long x, const QuadratureSpec& spec)
{
    if (n < 0)
        throw DomainError("nstep_pmf: n must be nonnegative");
    if (n == 0)
        return x == 0 ? 1.0 : 0.0;
    const double hi = char_fn_power_cutoff(d, n, envelope_floor);
    const auto r = oscillatory_integral(
        [&](double t) { return power_of_char_fn(d.fast_complement(t), n); },
        static_cast<double>(std::llabs(x)), {0.0, hi}, spec);
    return std::clamp(r.value / pi, 0.0, 1.0);
}

NStepGrid nstep_pmf_grid(const LatticeDistribution& d, long long n, long long x_max)
{
    if (n < 1 || x_max < 0)
        throw DomainError("nstep_pmf_grid: need n >= 1 and x_max >= 0");
    const double hi = char_fn_power_cutoff(d, n, envelope_floor);
    auto evaluate = [&](int split) {
        const NodeSet rule = cosine_nodes(hi, static_cast<double>(std::max<long long>(x_max, 1)), split);
        std::vector<double> v(rule.nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = power_of_char_fn(d.fast_complement(rule.nodes[i]), n);
        auto s = cosine_sums(rule, v, x_max);
        for (auto& e : s)
            e /= pi;
        return s;
    };
    const auto coarse = evaluate(1);
    NStepGrid out;
    out.values = evaluate(2);
    for (std::size_t i = 0; i < coarse.size(); ++i)
        out.error_estimate = std::max(out.error_estimate, std::abs(coarse[i] - out.values[i]));
    return out;
}

double BruteTable::at(long long x) const
{
    if (std::llabs(x) > window)
        return 0.0;
    return p[static_cast<std::size_t>(x + window)];
}

BruteTable brute_nstep(const LatticeDistribution& d, long long n, long long window, double max_leak)
{
    if (n < 1 || window < 0)
        throw DomainError("brute_nstep: need n >= 1 and window >= 0");
    const auto width = static_cast<std::size_t>(2 * window + 1);
    std::vector<double> step(width);
    std::vector<long long> support;
    for (long long x = -window; x <= window; ++x) {
        const double m = d.pmf(x);
        step[static_cast<std::size_t>(x + window)] = m;
        if (m != 0.0)
            support.push_back(x);
    }

    std::vector<double> cur(width, 0.0);
    cur[static_cast<std::size_t>(window)] = 1.0;
    std::vector<double> next(width);
    for (long long k = 0; k < n; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (long long y = -window; y <= window; ++y) {
            const double w = cur[static_cast<std::size_t>(y + window)];
            if (w == 0.0)
                continue;
            for (long long z : support) {
                const long long x = y + z;
                if (x < -window || x > window)
                    continue;
                next[static_cast<std::size_t>(x + window)] += w * step[static_cast<std::size_t>(z + window)];
            }
        }
        cur.swap(next);
    }

    BruteTable out;
    out.window = window;
    double total = 0.0;
    for (double v : cur)
        total += v;
    out.leaked_mass = std::max(0.0, 1.0 - total);
    out.p = std::move(cur);
    if (out.leaked_mass > max_leak)
        throw WindowTooSmallError("brute_nstep: leaked mass " + format_double(out.leaked_mass) +
                                  " exceeds " + format_double(max_leak));
    return out;
}

} // namespace stablewalk
