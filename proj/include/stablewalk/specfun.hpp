#pragma once

#include <numbers>

namespace stablewalk::specfun {

inline constexpr double euler_gamma = std::numbers::egamma;

// Gamma function on the real line. Throws PoleError at 0, -1, -2, ...
double gamma_real(double x);

// Riemann zeta for s > 1 by Euler-Maclaurin corrected partial sums.
double zeta(double s);

// zeta(s) - 1, accurate when s is large and zeta(s) is close to 1.
double zeta_minus_one(double s);

// Hurwitz-type tail sum_{k >= first} k^{-s} for s > 1 and first >= 1.
double zeta_tail(double s, long long first);

// Entire cosine integral Cin(z) = int_0^z (1 - cos t)/t dt.
double cin(double z);

// Closed form of int_0^inf (1 - cos z)/z^{1+a} dz = -cos(pi a/2) Gamma(-a), a in (0,2) \ {1}.
double frac_cos_integral(double a);

} // namespace stablewalk::specfun
