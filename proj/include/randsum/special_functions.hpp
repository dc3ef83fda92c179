#pragma once

#include <cmath>

// Scalar distribution functions shared by every numeric layer.  The standard
// normal CDF rides on std::erfc, whose absolute error is a few ulp, far inside
// the 1e-12 budget the distance computations assume.

namespace randsum {

inline constexpr double sqrt_two = 1.4142135623730950488;
inline constexpr double sqrt_two_over_pi = 0.79788456080286535588;
inline constexpr double inv_sqrt_two_pi = 0.39894228040143267794;

inline double normal_pdf(double z) {
    return inv_sqrt_two_pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / sqrt_two);
}

// Inverse of normal_cdf on (0, 1).  Backed by boost::math::erfc_inv; declared
// here so headers that only evaluate it do not drag boost into every TU.
double normal_quantile(double q);

// Laplace(location, scale) distribution function and its inverse.
inline double laplace_cdf(double z, double location, double scale) {
    const double t = (z - location) / scale;
    return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
}

inline double laplace_quantile(double q, double location, double scale) {
    return q < 0.5 ? location + scale * std::log(2.0 * q)
                   : location - scale * std::log(2.0 * (1.0 - q));
}

}  // namespace randsum
