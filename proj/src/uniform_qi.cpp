#include "thbqi/uniform_qi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "thbqi/bspline.hpp"

namespace thbqi {

const QiCoefficients& qi_coefficients(int degree) {
    static const QiCoefficients table[] = {
        {2, {1.0 / 2.0, 1.0 / 2.0}, {-1.0 / 4.0, 1.0 / 4.0}},
        {3, {-1.0 / 2.0, 2.0, -1.0 / 2.0}, {1.0 / 6.0, 0.0, -1.0 / 6.0}},
        {4,
         {5.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 5.0 / 12.0},
         {-5.0 / 48.0, -41.0 / 48.0, 41.0 / 48.0, 5.0 / 48.0}},
    };
    if (degree < 2 || degree > 4)
        throw std::invalid_argument("qi_coefficients: unsupported degree " +
                                    std::to_string(degree) + " (supported: 2, 3, 4)");
    return table[degree - 2];
}

std::vector<double> univariate_functionals(const UnivariateHermiteSamples& s) {
    const QiCoefficients& qc = qi_coefficients(s.degree);
    const std::size_t expected = std::size_t(s.sample_count());
    if (s.values.size() != expected || s.derivs.size() != expected)
        throw std::invalid_argument(
            "univariate_functionals: sample arrays must both have length " +
            std::to_string(expected) + ", got " + std::to_string(s.values.size()) +
            " values and " + std::to_string(s.derivs.size()) + " derivatives");

    const int d = s.degree;
    std::vector<double> lambda(std::size_t(s.n + d));
    for (int j = -d; j <= s.n - 1; ++j) {
        double acc = 0.0;
        for (int r = 1; r <= d; ++r) {
            const std::size_t k = s.slot(j + r);
            acc += qc.alpha[r - 1] * s.values[k] - s.h * qc.beta[r - 1] * s.derivs[k];
        }
        lambda[std::size_t(j + d)] = acc;
    }
    return lambda;
}

double univariate_qi_eval(std::span<const double> lambda, int degree, double a,
                          double h, double x, int deriv_order) {
    const int n = int(lambda.size()) - degree;
    if (n < 1) throw std::invalid_argument("univariate_qi_eval: too few coefficients");
    const double b = a + n * h;
    if (x < a || x > b)
        throw std::domain_error("univariate_qi_eval: x = " + std::to_string(x) +
                                " outside [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");

    const double u = (x - a) / h;
    int cell = int(std::floor(u));
    if (cell > n - 1) cell = n - 1; // right boundary closed
    if (cell < 0) cell = 0;

    double acc = 0.0;
    for (int j = cell - degree; j <= cell; ++j)
        acc += lambda[std::size_t(j + degree)] * bspline_deriv(degree, u - j, deriv_order);
    return acc * std::pow(1.0 / h, deriv_order);
}

} // namespace thbqi
