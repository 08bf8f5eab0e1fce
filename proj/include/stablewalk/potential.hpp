#pragma once

#include "stablewalk/expansion.hpp"
#include "stablewalk/lattice.hpp"
#include "stablewalk/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stablewalk {

enum class PotentialCase { RepairedA, LadderA, GeneralDeltaSmall, GeneralDeltaLarge, GeneralDeltaCritical, AlphaOne };
std::string to_string(PotentialCase c);

// a(0, x) ~ C_alpha x^{alpha-1} + sum_m C_m x^{alpha-1-m(2-alpha)} + C_delta x^{2 alpha-delta-1}
//           + C0_prime log x + C_0.
struct PotentialExpansion {
    PotentialCase case_tag = PotentialCase::RepairedA;
    double alpha = 0.0;
    double kappa_alpha = 0.0;
    double C_alpha = 0.0;
    std::optional<double> C_0;
    double C_0_error = 0.0; // quadrature and truncation bound on C_0
    std::map<int, double> C_m;
    double C0_prime = 0.0; // coefficient of log x
    std::optional<double> C_delta;
    int m_alpha = 0;
    std::optional<double> delta;
    std::map<double, double> extra_powers; // x power -> coefficient, further singular terms
    // Published closed forms, kept for comparison where they differ from the computed constants.
    nlohmann::json stated = nlohmann::json::object();

    double predict(double x) const;
    // Exponent p such that residual * x^p should stay bounded.
    double residual_scale_exponent() const;
    nlohmann::json to_json() const;
};

// (1/pi) int_0^pi (cos(theta x) - 1)/(1 - phi(theta)) d theta. Requires a heavy-tailed law
// of index in [1, 2).
double potential_kernel(const LatticeDistribution& d, long long x, const QuadratureSpec& spec);

struct PartialSum {
    double value = 0.0;            // sum_{n=0}^{N} (p^n(x) - p^n(0))
    double quadrature_error = 0.0; // accumulated difference between two node refinements
    double tail_estimate = 0.0;    // fitted power-law tail of the summands beyond N, not added to value
    double tail_uncertainty = 0.0;
    double tail_exponent = 0.0; // fitted decay exponent of the summands
    long long terms = 0;
};

PartialSum partial_sum_oracle(const LatticeDistribution& d, long long x, long long N);

// (1/(pi kappa)) int_0^inf (cos theta - 1) theta^{-alpha} d theta.
double const_C_alpha(double alpha, double kappa_alpha);

struct ConstantTerm {
    double value = 0.0;
    double error = 0.0;
};

// Constant-order term for inputs whose 1/(1 - phi) exceeds 1/(kappa theta^alpha) by an
// integrable amount (repaired, or delta > 2 alpha - 1).
ConstantTerm const_C0(const LatticeDistribution& d, double alpha, double kappa_alpha, const QuadratureSpec& spec);

struct Ladder {
    int m_alpha = 0;
    std::map<int, double> C_m;
    double C0_prime = 0.0;
};

// Powers generated by kappa2 theta^{2-alpha} in 1/(1 - phi) that still grow with x, and the
// log coefficient when one lands exactly on x^0.
Ladder const_ladder(double alpha, double kappa_alpha, double kappa2);

PotentialExpansion const_general_delta(double alpha, double kappa_alpha, double delta, double kappa_delta);

PotentialExpansion alpha_one_expansion(const LatticeDistribution& d, double kappa1, const QuadratureSpec& spec);

// Dispatches on the fitted coefficients and fills every computable constant.
PotentialExpansion potential_expansion(const LatticeDistribution& d, const ExpansionCoefficients& coeffs,
                                       const QuadratureSpec& spec);

struct ResidualRow {
    long long x = 0;
    double a_value = 0.0;
    double predicted = 0.0;
    double residual = 0.0;
    double residual_scaled = 0.0;
};

std::vector<ResidualRow> residual_profile(const LatticeDistribution& d, const PotentialExpansion& expansion,
                                          const std::vector<long long>& x_grid, const QuadratureSpec& spec);

std::string residual_csv(const std::vector<ResidualRow>& rows);

} // namespace stablewalk
