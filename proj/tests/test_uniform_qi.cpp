#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thbqi/bspline.hpp"
#include "thbqi/uniform_qi.hpp"

using namespace thbqi;

namespace {

UnivariateHermiteSamples sample(int d, int n, double a, double h,
                                const std::function<double(double)>& f,
                                const std::function<double(double)>& df) {
    UnivariateHermiteSamples s;
    s.degree = d;
    s.n = n;
    s.a = a;
    s.h = h;
    for (int i = -d + 1; i <= n + d - 1; ++i) {
        s.values.push_back(f(s.abscissa(i)));
        s.derivs.push_back(df(s.abscissa(i)));
    }
    return s;
}

} // namespace

TEST_CASE("coefficient table") {
    const QiCoefficients& q2 = qi_coefficients(2);
    CHECK(q2.alpha == std::vector<double>{0.5, 0.5});
    CHECK(q2.beta == std::vector<double>{-0.25, 0.25});
    const QiCoefficients& q3 = qi_coefficients(3);
    CHECK(q3.alpha == std::vector<double>{-0.5, 2.0, -0.5});
    CHECK(q3.beta == std::vector<double>{1.0 / 6.0, 0.0, -1.0 / 6.0});
    const QiCoefficients& q4 = qi_coefficients(4);
    CHECK(q4.alpha ==
          std::vector<double>{5.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 5.0 / 12.0});
    CHECK(q4.beta ==
          std::vector<double>{-5.0 / 48.0, -41.0 / 48.0, 41.0 / 48.0, 5.0 / 48.0});

    CHECK_THROWS_AS(qi_coefficients(1), std::invalid_argument);
    CHECK_THROWS_AS(qi_coefficients(5), std::invalid_argument);
}

TEST_CASE("coefficient structure: partition, symmetry") {
    for (int d = 2; d <= 4; ++d) {
        const QiCoefficients& q = qi_coefficients(d);
        double sa = 0.0, sb = 0.0;
        for (double v : q.alpha) sa += v;
        for (double v : q.beta) sb += v;
        CHECK(sa == doctest::Approx(1.0));
        CHECK(sb == doctest::Approx(0.0));
        for (int r = 0; r < d; ++r) {
            CHECK(q.alpha[std::size_t(r)] == q.alpha[std::size_t(d - 1 - r)]);
            CHECK(q.beta[std::size_t(r)] == -q.beta[std::size_t(d - 1 - r)]);
        }
    }
}

TEST_CASE("functionals of simple data") {
    for (int d = 2; d <= 4; ++d) {
        const auto s = sample(d, 8, 0.0, 0.25, [](double) { return 1.0; },
                              [](double) { return 0.0; });
        for (double l : univariate_functionals(s)) CHECK(l == doctest::Approx(1.0));
    }

    // f(x) = x with degree 2: the window midpoint
    const auto s = sample(2, 8, 0.0, 0.25, [](double x) { return x; },
                          [](double) { return 1.0; });
    const auto lambda = univariate_functionals(s);
    for (int j = -2; j <= 7; ++j)
        CHECK(lambda[std::size_t(j + 2)] ==
              doctest::Approx((s.abscissa(j + 1) + s.abscissa(j + 2)) / 2.0));
}

TEST_CASE("functionals match the dense banded-matrix product") {
    auto s = sample(3, 2, 0.0, 0.5, [](double x) { return x * x; },
                    [](double x) { return 2.0 * x; });
    const auto lambda = univariate_functionals(s);
    const Eigen::VectorXd dense = oracles::dense_univariate_functionals(s);
    REQUIRE(long(lambda.size()) == dense.size());
    for (long k = 0; k < dense.size(); ++k)
        CHECK(std::abs(lambda[std::size_t(k)] - dense(k)) < 1e-13);

    // and on random data for every degree
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int d = 2; d <= 4; ++d) {
        auto r = sample(d, 9, -1.0, 0.125, [](double) { return 0.0; },
                        [](double) { return 0.0; });
        for (double& v : r.values) v = dist(rng);
        for (double& v : r.derivs) v = dist(rng);
        const auto lam = univariate_functionals(r);
        const Eigen::VectorXd dlam = oracles::dense_univariate_functionals(r);
        for (long k = 0; k < dlam.size(); ++k)
            CHECK(std::abs(lam[std::size_t(k)] - dlam(k)) < 1e-13);
    }
}

TEST_CASE("malformed samples are rejected") {
    auto s = sample(3, 4, 0.0, 0.25, [](double x) { return x; },
                    [](double) { return 1.0; });
    s.derivs.pop_back();
    CHECK_THROWS_AS(univariate_functionals(s), std::invalid_argument);
}

TEST_CASE("constant and monomial reproduction") {
    std::mt19937_64 rng(22);
    for (int d = 2; d <= 4; ++d) {
        const double h = 0.1;
        const auto ones = sample(d, 10, 0.0, h, [](double) { return 1.0; },
                                 [](double) { return 0.0; });
        const auto l1 = univariate_functionals(ones);
        std::uniform_real_distribution<double> xs(0.0, 1.0);
        for (int k = 0; k < 50; ++k)
            CHECK(univariate_qi_eval(l1, d, 0.0, h, xs(rng)) ==
                  doctest::Approx(1.0).epsilon(1e-13));

        const auto pow_d = sample(
            d, 10, 0.0, h, [d](double x) { return std::pow(x, d); },
            [d](double x) { return d * std::pow(x, d - 1); });
        const auto ld = univariate_functionals(pow_d);
        for (int k = 0; k < 100; ++k) {
            const double x = xs(rng);
            CHECK(std::abs(univariate_qi_eval(ld, d, 0.0, h, x) - std::pow(x, d)) <
                  1e-10);
        }
    }
}

TEST_CASE("projector on random splines") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const int n = 8;
    const double h = 1.0 / n;
    for (int d = 2; d <= 4; ++d) {
        for (int trial = 0; trial < 50; ++trial) {
            // spline with random coefficients on a window wide enough to be
            // complete over the extended lattice
            const int lo = -3 * d, hi = n + 2 * d;
            std::vector<double> c(static_cast<std::size_t>(hi - lo + 1));
            for (double& v : c) v = coeff(rng);
            auto seval = [&](double x, int order) {
                double acc = 0.0;
                for (int k = lo; k <= hi; ++k)
                    acc += c[std::size_t(k - lo)] * bspline_deriv(d, x / h - k, order);
                return acc * std::pow(1.0 / h, order);
            };
            const auto s = sample(d, n, 0.0, h,
                                  [&](double x) { return seval(x, 0); },
                                  [&](double x) { return seval(x, 1); });
            const auto lambda = univariate_functionals(s);
            std::uniform_real_distribution<double> xs(0.0, 1.0);
            for (int k = 0; k < 500; ++k) {
                const double x = xs(rng);
                CHECK(std::abs(univariate_qi_eval(lambda, d, 0.0, h, x) - seval(x, 0)) <
                      1e-10);
            }
        }
    }
}

TEST_CASE("functional bound from the coefficient norms") {
    std::mt19937_64 rng(24);
    auto f = [](double x) { return std::sin(3.0 * x + 1.0) * std::exp(0.3 * x); };
    auto df = [](double x) {
        return (3.0 * std::cos(3.0 * x + 1.0) + 0.3 * std::sin(3.0 * x + 1.0)) *
               std::exp(0.3 * x);
    };
    for (int d = 2; d <= 4; ++d) {
        const double h = 0.2;
        const auto s = sample(d, 10, 0.0, h, f, df);
        const auto lambda = univariate_functionals(s);
        const QiCoefficients& q = qi_coefficients(d);
        const double na = l1_norm(q.alpha), nb = l1_norm(q.beta);
        for (int j = -d; j <= 9; ++j) {
            // max over the support [x_{j+1}, x_{j+d}], lattice points included
            double mf = 0.0, mdf = 0.0;
            for (int t = 0; t <= 64; ++t) {
                const double x = s.abscissa(j + 1) + (d - 1) * h * t / 64.0;
                mf = std::max(mf, std::abs(f(x)));
                mdf = std::max(mdf, std::abs(df(x)));
            }
            CHECK(std::abs(lambda[std::size_t(j + d)]) <= na * mf + h * nb * mdf + 1e-12);
        }
    }
}

TEST_CASE("convergence order d+1") {
    auto f = [](double x) { return std::sin(3.0 * x); };
    auto df = [](double x) { return 3.0 * std::cos(3.0 * x); };
    for (int d = 2; d <= 4; ++d) {
        double err[2];
        for (int pass = 0; pass < 2; ++pass) {
            const int n = pass == 0 ? 32 : 64;
            const double h = 1.0 / n;
            const auto s = sample(d, n, 0.0, h, f, df);
            const auto lambda = univariate_functionals(s);
            double worst = 0.0;
            for (int t = 0; t <= 1000; ++t) {
                const double x = t / 1000.0;
                worst = std::max(worst,
                                 std::abs(univariate_qi_eval(lambda, d, 0.0, h, x) - f(x)));
            }
            err[pass] = worst;
        }
        const double ratio = err[0] / err[1];
        const double expected = std::pow(2.0, d + 1);
        CHECK(ratio > 0.7 * expected);
        CHECK(ratio < 1.3 * expected);
    }
}

TEST_CASE("evaluation outside the interval is rejected") {
    const auto s = sample(2, 4, 0.0, 0.25, [](double x) { return x; },
                          [](double) { return 1.0; });
    const auto lambda = univariate_functionals(s);
    CHECK_THROWS_AS(univariate_qi_eval(lambda, 2, 0.0, 0.25, -0.01),
                    std::domain_error);
    CHECK_THROWS_AS(univariate_qi_eval(lambda, 2, 0.0, 0.25, 1.01), std::domain_error);
    // closed right boundary evaluates
    CHECK(univariate_qi_eval(lambda, 2, 0.0, 0.25, 1.0) == doctest::Approx(1.0));
}
