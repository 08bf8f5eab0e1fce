#pragma once

#include <array>
#include <functional>
#include <vector>

namespace stablewalk::detail {

// Reduce an angle to [0, pi] using evenness and 2 pi periodicity.
double reduce_angle(double theta);

// One-sided profile f(x) = p(x), x >= 1, of a heavy-tailed leaf together with the
// smooth extension to real x used by the Euler-Maclaurin tail. f is completely
// monotone for both shapes, which the error bounds rely on.
class HeavyTail {
public:
    enum class Shape { LongRange, ParetoDiff };

    HeavyTail(Shape shape, double alpha);

    Shape shape() const { return shape_; }
    double alpha() const { return alpha_; }
    double normalizer() const { return c_; }

    double profile(double x) const;
    // magnitudes[m] = |f^{(m)}(x)| for m = 0..count-1.
    void derivative_magnitudes(double x, int count, double* magnitudes) const;
    // int_x^inf f.
    double tail_integral(double x) const;
    // P(|X| > r).
    double tail_mass(long long r) const;

    // 1 - phi(theta) = 2 sum_{x >= 1} f(x)(1 - cos x theta): a direct head up to the cut,
    // then a 30-term Euler-Maclaurin tail whose integral is done in u = theta x space.
    // Throws NonConvergenceError if the certified error exceeds 1e-12.
    double complement(double theta, double* error = nullptr) const;

    static constexpr int cut = 128;

private:
    Shape shape_;
    double alpha_;
    double c_;
    std::vector<double> head_; // f(x) for x = 0..cut-1 (entry 0 unused)
};

// Piecewise Chebyshev interpolant of a complement on dyadic panels
// [pi 2^{-k-1}, pi 2^{-k}], k < panels, with power-law continuation below.
class ComplementTable {
public:
    static constexpr int panels = 48;
    static constexpr int degree = 24;

    ComplementTable(const std::function<double(double)>& exact, double alpha);
    double operator()(double reduced_theta) const;

private:
    double alpha_;
    double floor_theta_;
    double floor_value_;
    std::vector<std::array<double, degree + 1>> coef_;
    double eval_panel(int k, double theta) const;
};

} // namespace stablewalk::detail
