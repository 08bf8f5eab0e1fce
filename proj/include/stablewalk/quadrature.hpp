#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace stablewalk {

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_panels = 200000;
    // Oscillation frequency used to align panels to half-periods; 0 disables alignment.
    double frequency_hint = 0.0;

    // Throws DomainError unless every field is in range.
    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int panels = 0;
    // Estimated magnitude of the discarded part of an infinite domain.
    double tail_bound = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
};

// Where to cut an infinite domain and how large the discarded tail is known to be.
struct TailCut {
    double cutoff;
    double bound;
};

using RealFn = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (10/21) over the panels delimited by `breakpoints`
// (sorted, at least two entries). Throws NonConvergenceError beyond spec.max_panels.
QuadResult integrate_panels(const RealFn& f, const std::vector<double>& breakpoints,
                            const QuadratureSpec& spec);

// Adaptive integral over a finite [a, b], graded toward a when a == 0.
QuadResult integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec);

// int envelope(t) cos(frequency t) dt over the domain. Panels follow half-periods
// pi/frequency, a geometric mesh (ratio 2) resolves a singular endpoint at 0, and an
// infinite upper limit is cut where the envelope falls below abs_tol/10 unless `cut`
// supplies the truncation point and its analytic bound.
QuadResult oscillatory_integral(const RealFn& envelope, double frequency, Interval domain,
                                const QuadratureSpec& spec,
                                std::optional<TailCut> cut = std::nullopt);

// Breakpoints used by oscillatory_integral on a finite [lo, hi]; exposed for callers
// that evaluate several integrals on shared nodes.
std::vector<double> oscillatory_breakpoints(double lo, double hi, double frequency,
                                            int max_panels);

struct NodeSet {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Fixed Gauss-Legendre (20 point) nodes on [0, hi]: a geometric mesh toward 0, then
// panels no wider than pi/max_frequency or hi/16. Each panel is cut into `split` equal
// parts, so split = 2 gives a refined companion rule for error estimates. Entries of
// `breaks` inside (0, hi) become panel boundaries.
NodeSet cosine_nodes(double hi, double max_frequency, int split = 1,
                     const std::vector<double>& breaks = {});

// out[k] = sum_i w_i v_i cos(k t_i) for k = 0..k_max, with the rotation e^{ikt}
// advanced multiplicatively.
std::vector<double> cosine_sums(const NodeSet& rule, const std::vector<double>& values, long long k_max);

} // namespace stablewalk
