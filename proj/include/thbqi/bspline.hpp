#pragma once

#include <span>
#include <vector>

namespace thbqi {

/// Value of the cardinal degree-d B-spline with active knots 0,...,d+1.
/// Zero outside [0, d+1]; evaluation is right-continuous at knots.
/// Requires degree >= 1.
double bspline_eval(int degree, double x);

/// order-th derivative of the cardinal B-spline, 0 <= order <= degree.
/// Order `degree` hits the piecewise-constant level, where the half-open
/// cell convention [t, t+1) resolves knot values.
double bspline_deriv(int degree, double x, int order);

/// Two-scale coefficients (c_0,...,c_{d+1}) with
/// B_d(x) = sum_k c_k B_d(2x - k), c_k = 2^{-d} binom(d+1, k).
/// Binomials are computed in integer arithmetic before the single division.
std::vector<double> subdivision_coeffs(int degree);

/// Coefficients of the same spline one dyadic level finer. Input entry k
/// multiplies the basis function with index i0 + k for some origin i0; the
/// output entry k' multiplies index 2*i0 + k'. Output length 2n + degree.
std::vector<double> refine_coeffs_1d(int degree, std::span<const double> coarse);

} // namespace thbqi
