#pragma once

#include "stablewalk/expansion.hpp"
#include "stablewalk/lattice.hpp"
#include "stablewalk/stable.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace stablewalk {

enum class TargetKind { PureStable, StableGauss };
std::string to_string(TargetKind t);

// Stable target matching fitted coefficients: pure, or with the Gaussian that absorbs kappa2 < 0.
StableLaw target_law(const ExpansionCoefficients& coeffs, TargetKind kind);

struct SupError {
    long long n = 0;
    double value = 0.0;       // max over the window of |p^n(x) - target density|
    long long argmax_x = 0;
    double tol_budget = 0.0;  // quadrature error estimate of every difference on the window
    long long window = 0;     // half-width X of the window in lattice units
    double window_factor = 0; // X / n^{1/alpha}
};

struct SupErrorOptions {
    double window_factor = 10.0;
    double max_window_factor = 80.0;
    // The outer half of the window must stay below this fraction of the sup.
    double outer_fraction = 0.1;
    // The quadrature estimate must stay below this fraction of the sup.
    double max_tolerance_fraction = 0.1;
};

// The difference p^n - target is inverted as one cosine transform, so no cancellation
// between two separately rounded densities occurs.
SupError sup_error(const LatticeDistribution& d, long long n, const StableLaw& target,
                   const SupErrorOptions& options = {});

struct RateFit {
    double exponent = 0.0;
    double r2 = 0.0;
    double prefactor = 0.0;
};

// Least-squares slope of log error against log n, negated.
RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs);

struct RateExperiment {
    nlohmann::json distribution;
    TargetKind target = TargetKind::PureStable;
    StableLaw law;
    std::vector<long long> n_list;
    std::vector<SupError> rows;
    RateFit fit;
    double theoretical_exponent = 0.0;

    std::string csv() const;
    nlohmann::json summary() const;
};

// Predicted exponent: (beta1 + 1 - alpha)/alpha against the pure target, 1 + 1/alpha against
// the Gaussian-corrected one.
double theoretical_exponent(const ExpansionCoefficients& coeffs, TargetKind target);

std::vector<long long> default_n_list();

RateExperiment run_rate_experiment(const LatticeDistribution& d, const ExpansionCoefficients& coeffs,
                                   TargetKind target, const std::vector<long long>& n_list,
                                   const SupErrorOptions& options = {});

// One correction D n^k u_J(x n^{-1/alpha}) n^{-(1+J)/alpha} of the expansion of p^n.
struct CorrectionTerm {
    int order = 0;            // k: power of r_X in exp(n r_X)
    double exponent = 0.0;    // J
    double coefficient = 0.0; // D
    double n_power = 0.0;     // k - (1 + J)/alpha
};

// Terms of exp(n r_X) whose n-power exceeds -3/alpha. Exponents listed in `omit` are
// removed from r_X first. Throws UnsupportedRegularityError unless R is a subset of {2}.
std::vector<CorrectionTerm> correction_terms(const ExpansionCoefficients& coeffs,
                                             const std::vector<double>& omit = {});

// p^n(x) - stable density - sum of correction terms, as one cosine transform.
double expansion_residual(const LatticeDistribution& d, const ExpansionCoefficients& coeffs, long long n,
                          long long x, const QuadratureSpec& spec, const std::vector<double>& omit = {});

// The same residual for every x in 0..x_max from shared nodes.
std::vector<double> expansion_residual_grid(const LatticeDistribution& d, const ExpansionCoefficients& coeffs,
                                            long long n, long long x_max, const std::vector<double>& omit = {});

struct AsymptoticExample {
    LatticeDistribution distribution;
    ExpansionCoefficients coeffs;
    double q = 0.0;
};

// mix(p_alpha, uniform on {-1, 1}, q), lowering q from 0.5 in steps of 0.1 until the fitted
// kappa2 is negative with |kappa2| >= kappa_alpha / 4.
AsymptoticExample make_asymptotic_example(double alpha);

} // namespace stablewalk
