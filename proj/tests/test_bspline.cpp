#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "thbqi/bspline.hpp"
#include "thbqi/uniform_qi.hpp"

using namespace thbqi;

TEST_CASE("cardinal evaluation against the unrolled recursion") {
    CHECK(bspline_eval(1, 1.0) == doctest::Approx(1.0));
    CHECK(bspline_eval(2, 1.5) == doctest::Approx(0.75));
    CHECK(bspline_eval(2, 1.5) == doctest::Approx(oracles::bspline_recursive(2, 1.5)));
    CHECK(bspline_eval(3, -0.1) == 0.0);
    CHECK(bspline_eval(3, 4.0) == 0.0);
    CHECK(bspline_eval(4, 5.0) == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 6.0);
    for (int d = 1; d <= 4; ++d)
        for (int k = 0; k < 200; ++k) {
            const double x = dist(rng);
            CHECK(bspline_eval(d, x) ==
                  doctest::Approx(oracles::bspline_recursive(d, x)).epsilon(1e-14));
        }
}

TEST_CASE("invalid degree is rejected") {
    CHECK_THROWS_AS(bspline_eval(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bspline_eval(-3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(subdivision_coeffs(0), std::invalid_argument);
}

TEST_CASE("partition of unity") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dist(0.0, 20.0);
    for (int d = 2; d <= 4; ++d)
        for (int k = 0; k < 1000; ++k) {
            const double x = dist(rng);
            double sum = 0.0;
            for (int j = -d - 1; j <= 21; ++j) sum += bspline_eval(d, x - j);
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
}

TEST_CASE("nonnegativity on the support") {
    std::mt19937_64 rng(13);
    for (int d = 1; d <= 4; ++d) {
        std::uniform_real_distribution<double> dist(0.0, d + 1.0);
        for (int k = 0; k < 300; ++k) CHECK(bspline_eval(d, dist(rng)) >= 0.0);
    }
}

TEST_CASE("derivatives") {
    CHECK(bspline_deriv(2, 1.5, 1) == doctest::Approx(0.0)); // symmetric peak
    CHECK(bspline_deriv(3, 1.3, 0) == doctest::Approx(bspline_eval(3, 1.3)));
    CHECK_THROWS_AS(bspline_deriv(2, 0.5, 3), std::invalid_argument);

    // first derivative vs central differences
    std::mt19937_64 rng(14);
    for (int d = 2; d <= 4; ++d) {
        std::uniform_real_distribution<double> dist(0.1, d + 0.9);
        for (int k = 0; k < 100; ++k) {
            const double x = dist(rng);
            const double fd = oracles::central_diff(
                [d](double t) { return bspline_eval(d, t); }, x, 1e-5);
            CHECK(bspline_deriv(d, x, 1) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    CHECK(bspline_deriv(2, 0.5, 1) ==
          doctest::Approx(oracles::central_diff(
                              [](double t) { return bspline_eval(2, t); }, 0.5, 1e-5))
              .epsilon(1e-6));
}

TEST_CASE("two-scale coefficients") {
    CHECK(subdivision_coeffs(1) == std::vector<double>{0.5, 1.0, 0.5});
    CHECK(subdivision_coeffs(2) == std::vector<double>{0.25, 0.75, 0.75, 0.25});
    CHECK(subdivision_coeffs(3) ==
          std::vector<double>{0.125, 0.5, 0.75, 0.5, 0.125});

    for (int d = 1; d <= 6; ++d) {
        const auto c = subdivision_coeffs(d);
        double sum = 0.0;
        for (double v : c) sum += v;
        CHECK(sum == doctest::Approx(2.0));
    }

    // the refinement identity B_d(x) = sum_k c_k B_d(2x - k) on a sample grid
    for (int d = 2; d <= 4; ++d) {
        const auto c = subdivision_coeffs(d);
        for (int s = 0; s <= 100; ++s) {
            const double x = (d + 1.0) * s / 100.0;
            double fine = 0.0;
            for (int k = 0; k <= d + 1; ++k) fine += c[std::size_t(k)] * bspline_eval(d, 2 * x - k);
            CHECK(std::abs(fine - bspline_eval(d, x)) < 1e-12);
        }
    }
}

namespace {

// coarse coefficients over basis offsets i0..i0+n-1 evaluated at u (coarse units)
double spline_value(std::span<const double> coeffs, int d, int i0, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += coeffs[k] * bspline_eval(d, u - (i0 + int(k)));
    return acc;
}

} // namespace

TEST_CASE("coefficient refinement preserves the spline") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int d = 2; d <= 4; ++d) {
        std::vector<double> coarse(16);
        for (double& v : coarse) v = dist(rng);
        const std::vector<double> fine = refine_coeffs_1d(d, coarse);
        CHECK(fine.size() == 2 * coarse.size() + std::size_t(d));
        std::uniform_real_distribution<double> xs(0.0, 16.0 + d);
        for (int k = 0; k < 500; ++k) {
            const double u = xs(rng);
            const double a = spline_value(coarse, d, 0, u);
            const double b = spline_value(fine, d, 0, 2.0 * u);
            CHECK(std::abs(a - b) < 1e-12);
        }
    }
}

TEST_CASE("refinement of a constant keeps interior coefficients at one") {
    for (int d = 2; d <= 4; ++d) {
        const std::vector<double> ones(20, 1.0);
        const std::vector<double> fine = refine_coeffs_1d(d, ones);
        // away from the window edges the two parity stencils each sum to 1
        for (std::size_t k = std::size_t(d + 1); k + d + 1 < fine.size(); ++k)
            CHECK(fine[k] == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("refinement of a single basis function lists the two-scale children") {
    const std::vector<double> unit = {1.0};
    const std::vector<double> fine = refine_coeffs_1d(2, unit);
    CHECK(fine == std::vector<double>{0.25, 0.75, 0.75, 0.25});
}

TEST_CASE("refinement maps Greville coefficients to finer Greville coefficients") {
    // coefficients of f(x) = x on the integer grid are the knot averages
    const int d = 3, n = 14;
    std::vector<double> coarse(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) coarse[std::size_t(k)] = k + (d + 1) / 2.0;
    const std::vector<double> fine = refine_coeffs_1d(d, coarse);
    // interior fine coefficients must be the level-1 Greville abscissae
    // (fine basis index k' has abscissa (k' + (d+1)/2) / 2 in coarse units)
    for (std::size_t k = std::size_t(d + 2); k + d + 2 < fine.size(); ++k)
        CHECK(fine[k] == doctest::Approx((double(k) + (d + 1) / 2.0) / 2.0));

    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> xs(d + 1.0, n - 1.0);
    for (int k = 0; k < 100; ++k) {
        const double u = xs(rng);
        CHECK(spline_value(fine, d, 0, 2 * u) == doctest::Approx(u).epsilon(1e-13));
    }
}
