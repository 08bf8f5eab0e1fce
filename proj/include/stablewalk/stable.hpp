#pragma once

#include "stablewalk/quadrature.hpp"

namespace stablewalk {

// Characteristic function exp(-kappa_alpha |theta|^alpha - gauss_kappa2 theta^2).
struct StableLaw {
    double alpha = 1.0;
    double kappa_alpha = 1.0;
    double gauss_kappa2 = 0.0; // 0: pure stable; > 0: stable plus an independent Gaussian

    void validate() const;
    double char_fn(double theta) const;
    // Exponent of the n-step characteristic function, n (kappa_alpha theta^alpha + gauss_kappa2 theta^2).
    double log_decay(long long n, double theta) const;
    // Theta* with n kappa_alpha Theta*^alpha = 40 (or the Gaussian analogue when it cuts sooner).
    double cutoff(long long n) const;
};

enum class StableMethod {
    Ray,      // integral along a ray into the upper half plane; no oscillatory cancellation
    RealAxis, // half-period panels on [0, Theta*]
};

// (1/pi) int_0^inf theta^j exp(-n (kappa theta^alpha + kappa2 theta^2)) cos(theta x) d theta.
double stable_moment_transform(const StableLaw& law, long long n, double j, double x, const QuadratureSpec& spec,
                               StableMethod method = StableMethod::Ray);

double stable_nstep_density(const StableLaw& law, long long n, double x, const QuadratureSpec& spec,
                            StableMethod method = StableMethod::Ray);

// u_j(x) = (1/pi) int_0^inf theta^j exp(-kappa theta^alpha) cos(theta x) d theta.
double u_profile(double alpha, double kappa_alpha, double j, double x, const QuadratureSpec& spec,
                 StableMethod method = StableMethod::Ray);

} // namespace stablewalk
