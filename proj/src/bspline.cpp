#include "thbqi/bspline.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace thbqi {

namespace {

constexpr int kMaxDegree = 24;

void check_degree(int degree) {
    if (degree < 1 || degree > kMaxDegree)
        throw std::invalid_argument("bspline: degree " + std::to_string(degree) +
                                    " outside supported range [1, " +
                                    std::to_string(kMaxDegree) + "]");
}

// Cox-de Boor on integer knots; degree 0 uses half-open cells [k, k+1).
double eval_any(int degree, double x) {
    if (x < 0.0 || x >= degree + 1.0) return 0.0;
    int cell = int(std::floor(x));
    if (cell > degree) cell = degree; // guards x just below degree+1 rounding up
    if (degree == 0) return 1.0;

    std::array<double, kMaxDegree + 2> n{};
    n[cell] = 1.0;
    for (int deg = 1; deg <= degree; ++deg) {
        for (int k = 0; k <= degree - deg; ++k) {
            const double t = x - k;
            n[k] = (t * n[k] + (deg + 1 - t) * n[k + 1]) / deg;
        }
    }
    return n[0];
}

} // namespace

double bspline_eval(int degree, double x) {
    check_degree(degree);
    return eval_any(degree, x);
}

double bspline_deriv(int degree, double x, int order) {
    check_degree(degree);
    if (order < 0 || order > degree)
        throw std::invalid_argument("bspline_deriv: order " + std::to_string(order) +
                                    " invalid for degree " + std::to_string(degree));
    if (order == 0) return eval_any(degree, x);

    // B_d^(r)(x) = sum_k (-1)^k binom(r,k) B_{d-r}(x - k)
    double sum = 0.0;
    long long binom = 1;
    for (int k = 0; k <= order; ++k) {
        const double term = double(binom) * eval_any(degree - order, x - k);
        sum += (k % 2 == 0) ? term : -term;
        binom = binom * (order - k) / (k + 1);
    }
    return sum;
}

std::vector<double> subdivision_coeffs(int degree) {
    check_degree(degree);
    std::vector<double> c(degree + 2);
    const double scale = double(1LL << degree);
    long long binom = 1; // binom(degree+1, k)
    for (int k = 0; k <= degree + 1; ++k) {
        c[k] = double(binom) / scale;
        binom = binom * (degree + 1 - k) / (k + 1);
    }
    return c;
}

std::vector<double> refine_coeffs_1d(int degree, std::span<const double> coarse) {
    const std::vector<double> c = subdivision_coeffs(degree);
    std::vector<double> fine(2 * coarse.size() + degree, 0.0);
    for (std::size_t k = 0; k < coarse.size(); ++k)
        for (int r = 0; r <= degree + 1; ++r)
            fine[2 * k + r] += c[r] * coarse[k];
    return fine;
}

} // namespace thbqi
