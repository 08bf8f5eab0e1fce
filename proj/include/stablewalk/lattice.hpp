#pragma once

#include "stablewalk/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stablewalk {

enum class DistKind { FiniteSupport, LongRange, ParetoDiff, Convolution, Mixture };

std::string to_string(DistKind kind);

// Symmetric law on the integers. Immutable; copies share one node, so passing by value
// is cheap and sharing across threads is safe. Composite laws are evaluated lazily
// through their characteristic functions.
class LatticeDistribution {
public:
    struct Node;

    DistKind kind() const;

    // Tail index of the heaviest heavy-tailed leaf; empty for purely finite laws.
    std::optional<double> index() const;
    // 1 + index, or +infinity for finite support.
    double tail_exponent() const;

    double pmf(long long x) const;
    // Upper bound on P(|X| > radius); exact for leaves and mixtures of leaves.
    double tail_mass_bound(long long radius) const;

    // Characteristic function and its complement 1 - phi, certified to 1e-12.
    double char_fn(double theta) const;
    double complement(double theta) const;

    // Table-backed complement for heavy leaves (relative error near 1e-15), exact otherwise.
    // The table is built on first use.
    double fast_complement(double theta) const;
    double fast_char_fn(double theta) const { return 1.0 - fast_complement(theta); }

    // Structure accessors; each throws DomainError when asked of the wrong kind.
    double alpha() const;
    double normalizer() const;
    const std::vector<double>& masses() const; // p(0), p(1), ..., p(M)
    std::optional<double> repairer_kappa2() const;
    double weight() const;
    const std::vector<LatticeDistribution>& components() const;

    nlohmann::json to_json() const;
    static LatticeDistribution from_json(const nlohmann::json& j);

    explicit LatticeDistribution(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<const Node> node_;
};

LatticeDistribution make_long_range(double alpha);
LatticeDistribution make_pareto_diff(double alpha);
LatticeDistribution make_repairer(double kappa2);
// masses[k] = p(k) = p(-k) for k = 0..M; must sum (counting both signs) to 1.
LatticeDistribution make_finite_support(std::vector<double> masses);
LatticeDistribution make_point_mass();
LatticeDistribution convolve(const LatticeDistribution& d1, const LatticeDistribution& d2);
LatticeDistribution mix(const LatticeDistribution& d1, const LatticeDistribution& d2, double q);

inline double char_fn(const LatticeDistribution& d, double theta) { return d.char_fn(theta); }

// phi^n computed as exp(n log1p(-c)) when the complement c is small.
double power_of_char_fn(double complement, long long n);

// Smallest theta beyond which |phi|^n stays below `threshold` on [theta, pi], found on a
// uniform sampling of [0, pi]; returns pi when no cut is possible.
double char_fn_power_cutoff(const LatticeDistribution& d, long long n, double threshold);

// p^n(x) = (1/pi) int_0^pi phi^n(theta) cos(x theta) d theta.
double nstep_pmf(const LatticeDistribution& d, long long n, long long x, const QuadratureSpec& spec);

struct NStepGrid {
    std::vector<double> values; // p^n(x) for x = 0..x_max
    double error_estimate = 0.0;
};

// p^n(x) for every x in 0..x_max from one shared set of quadrature nodes.
NStepGrid nstep_pmf_grid(const LatticeDistribution& d, long long n, long long x_max);

struct BruteTable {
    long long window = 0;
    std::vector<double> p; // index x + window
    double leaked_mass = 0.0;
    double at(long long x) const;
};

// n-fold convolution on [-window, window]. Throws WindowTooSmallError when the mass lost
// to truncation exceeds max_leak.
BruteTable brute_nstep(const LatticeDistribution& d, long long n, long long window, double max_leak = 1e-9);

} // namespace stablewalk
