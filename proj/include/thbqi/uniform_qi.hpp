#pragma once

#include <span>
#include <vector>

#include "thbqi/core.hpp"

namespace thbqi {

/// Coefficient vectors of the uniform degree-d Hermite functional
///   lambda_j(f) = sum_r alpha_r f(x_{j+r}) - h sum_r beta_r f'(x_{j+r}),
/// r = 1..d. Supported degrees: 2, 3, 4.
struct QiCoefficients {
    int degree;
    std::vector<double> alpha;
    std::vector<double> beta;
};

/// Exact coefficient row for degree d in {2,3,4}; throws otherwise.
const QiCoefficients& qi_coefficients(int degree);

/// Values of f and f' on the inner nodes of the extended uniform partition:
/// abscissae x_i = a + i*h for i = -degree+1 .. n+degree-1, where x_0..x_n
/// spans the approximation interval.
struct UnivariateHermiteSamples {
    int degree = 2;
    int n = 0;       // cells of the core partition
    double a = 0.0;  // left end of the core interval
    double h = 1.0;
    std::vector<double> values;
    std::vector<double> derivs;

    int sample_count() const { return n + 2 * degree - 1; }
    double abscissa(int i) const { return a + i * h; }
    /// storage slot of abscissa index i (i = -degree+1 maps to 0)
    std::size_t slot(int i) const { return std::size_t(i + degree - 1); }
};

/// Functionals lambda_j for j = -degree..n-1, as a flat vector of length
/// n + degree (entry k holds lambda_{k-degree}). Computed windowwise; the
/// banded matrices of the closed form are never materialized.
std::vector<double> univariate_functionals(const UnivariateHermiteSamples& samples);

/// Evaluate sum_j lambda_j B_d((x-a)/h - j) or its deriv_order-th derivative
/// at x in [a, a + n*h], n = lambda.size() - degree.
double univariate_qi_eval(std::span<const double> lambda, int degree, double a,
                          double h, double x, int deriv_order = 0);

} // namespace thbqi
