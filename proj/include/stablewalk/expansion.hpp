#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stablewalk {

// Exponent-keyed power series; keys closer than exponent_snap are treated as equal.
inline constexpr double exponent_snap = 1e-9;
using ExponentSeries = std::map<double, double>;

// Adds value to the coefficient at exponent, merging with an existing key within exponent_snap.
void series_add(ExponentSeries& s, double exponent, double value);
// Product of two series, keeping exponents strictly below cutoff (minus exponent_snap).
ExponentSeries series_multiply(const ExponentSeries& a, const ExponentSeries& b, double cutoff);
// log(1 + t) for a series t with positive exponents, truncated below cutoff.
ExponentSeries series_log1p(const ExponentSeries& t, double cutoff);

enum class RepairClass { Repaired, LocallyRepairable, AsymptoticallyRepairable, GeneralAdmissible };
std::string to_string(RepairClass c);

// phi = 1 - kappa_alpha |theta|^alpha + sum_beta kappa[beta] |theta|^beta + O(|theta|^{2+alpha}).
struct ExpansionCoefficients {
    double alpha = 0.0;
    double kappa_alpha = 0.0;
    std::map<double, double> kappa; // exponent -> coefficient in phi
    double error_order = 0.0;

    // Fit diagnostics, empty for closed forms.
    struct Diagnostics {
        double max_residual = 0.0;
        double refined_max_residual = 0.0;
        double condition_number = 0.0;
        std::map<double, double> standard_error;   // exponent -> std error of the 1 - phi coefficient
        std::map<double, double> refinement_shift; // exponent -> change under grid refinement
        std::map<double, double> pruned;           // exponent -> dropped coefficient (phi convention)
        std::map<double, double> nuisance;         // exponent -> coefficient (phi convention)
        std::optional<double> leading_exponent;    // only when the alpha slot is disabled
        std::optional<double> leading_coefficient;
    };
    std::optional<Diagnostics> diagnostics;

    std::vector<double> regularity_set() const;
    double kappa_at(double exponent) const; // 0 when absent
    // Throws DomainError when an invariant fails.
    void validate() const;
    nlohmann::json to_json() const;
};

RepairClass classify(const ExpansionCoefficients& coeffs);

struct JSetInfo {
    std::vector<double> j_set;
    std::vector<double> j_set_plus;
    double beta1 = 0.0;
    double beta2 = 0.0;
    ExponentSeries eta; // coefficients of r_X = log phi + kappa_alpha |theta|^alpha, when R is a subset of {2}
};

JSetInfo j_set(double alpha, const std::vector<double>& regularity_set);
JSetInfo j_set(const ExpansionCoefficients& coeffs);

// Closed forms for the long-range law p_alpha.
double closed_form_kappa_alpha(double alpha);

struct K2Value {
    double value = 0.0;
    double truncation_bound = 0.0;
};
K2Value closed_form_K2(double alpha, int terms = 60);
double closed_form_kappa2(double alpha, int terms = 60);
ExpansionCoefficients closed_form_long_range(double alpha);

struct FitOptions {
    double theta_max = 0.02;     // grid theta_k = theta_max 2^{-k}
    int points = 26;
    bool alpha_slot = true;      // false: fit only the candidates and report the leading one
    double prune_factor = 10.0;
    double max_condition = 1e12;
};

// {1+alpha, 2, 2 alpha} intersected with (alpha, 2+alpha).
std::vector<double> default_candidates(double alpha);

// Least-squares fit of the complement 1 - phi on a dyadic grid. Coefficients below
// prune_factor times their uncertainty are dropped from the regularity set.
ExpansionCoefficients fit_expansion(const std::function<double(double)>& complement, double alpha,
                                    const std::vector<double>& candidates, const FitOptions& options = {});

} // namespace stablewalk
