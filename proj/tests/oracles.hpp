// Shared test oracles, all independent of the library's computation paths:
// dense banded-matrix assembly of the quasi-interpolant, brute-force basis
// expansions, finite differences and small deterministic generators.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "thbqi/bspline.hpp"
#include "thbqi/harness.hpp"
#include "thbqi/uniform_qi.hpp"

namespace oracles {

using namespace thbqi;

// Literal two-level unrolling of the uniform B-spline recursion
//   B_d(x) = (x B_{d-1}(x) + (d+1-x) B_{d-1}(x-1)) / d,  B_0 = 1 on [0,1).
inline double bspline_recursive(int d, double x) {
    if (d == 0) return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
    return (x * bspline_recursive(d - 1, x) +
            (d + 1 - x) * bspline_recursive(d - 1, x - 1.0)) /
           d;
}

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Banded functional matrices with the coefficient rows of the scheme:
// rows j = -d..n-1, columns i = -d+1..n+d-1.
inline Eigen::MatrixXd banded_matrix(const std::vector<double>& row, int d, int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + d, n + 2 * d - 1);
    for (int r = 0; r < n + d; ++r)
        for (int k = 0; k < d; ++k) m(r, r + k) = row[std::size_t(k)];
    return m;
}

// Dense matrix evaluation of the univariate functional vector.
inline Eigen::VectorXd dense_univariate_functionals(const UnivariateHermiteSamples& s) {
    const QiCoefficients& qc = qi_coefficients(s.degree);
    const Eigen::MatrixXd A = banded_matrix(qc.alpha, s.degree, s.n);
    const Eigen::MatrixXd B = banded_matrix(qc.beta, s.degree, s.n);
    const Eigen::Map<const Eigen::VectorXd> v(s.values.data(), long(s.values.size()));
    const Eigen::Map<const Eigen::VectorXd> w(s.derivs.data(), long(s.derivs.size()));
    return A * v - s.h * (B * w);
}

// Dense evaluation of the full tensor coefficient matrix
//   A2 F A1^T - hx A2 Fx B1^T - hy B2 Fy A1^T + hx hy B2 Fxy B1^T.
inline Eigen::MatrixXd dense_tensor_coeffs(const HermiteData& data) {
    const QiCoefficients& q1 = qi_coefficients(data.deg.d1);
    const QiCoefficients& q2 = qi_coefficients(data.deg.d2);
    const int n1 = data.grid.cells_x(), n2 = data.grid.cells_y();
    const Eigen::MatrixXd A1 = banded_matrix(q1.alpha, data.deg.d1, n1);
    const Eigen::MatrixXd B1 = banded_matrix(q1.beta, data.deg.d1, n1);
    const Eigen::MatrixXd A2 = banded_matrix(q2.alpha, data.deg.d2, n2);
    const Eigen::MatrixXd B2 = banded_matrix(q2.beta, data.deg.d2, n2);

    auto to_eigen = [](const OffsetGrid& g) {
        Eigen::MatrixXd m(g.rows(), g.cols());
        for (int r = 0; r < g.rows(); ++r)
            for (int c = 0; c < g.cols(); ++c)
                m(r, c) = g.at(g.row_lo() + r, g.col_lo() + c);
        return m;
    };
    const Eigen::MatrixXd F = to_eigen(data.f);
    const Eigen::MatrixXd Fx = to_eigen(data.fx);
    const Eigen::MatrixXd Fy = to_eigen(data.fy);
    const Eigen::MatrixXd Fxy = to_eigen(data.fxy);
    const double hx = data.grid.step_x(), hy = data.grid.step_y();

    return A2 * F * A1.transpose() - hx * (A2 * Fx * B1.transpose()) -
           hy * (B2 * Fy * A1.transpose()) + hx * hy * (B2 * Fxy * B1.transpose());
}

// Brute-force tensor spline evaluation: the full double loop over every
// stored coefficient, no locality.
inline double full_sum_eval(const TensorSpline& s, double x, double y, int dx = 0,
                            int dy = 0) {
    const Rect& dom = s.grid.base.domain;
    const double u = (x - dom.x0) / s.grid.step_x();
    const double v = (y - dom.y0) / s.grid.step_y();
    double acc = 0.0;
    for (int j = s.coeffs.row_lo(); j <= s.coeffs.row_hi(); ++j)
        for (int i = s.coeffs.col_lo(); i <= s.coeffs.col_hi(); ++i)
            acc += s.coeffs.at(j, i) * bspline_deriv(s.deg.d1, u - i, dx) *
                   bspline_deriv(s.deg.d2, v - j, dy);
    return acc * std::pow(1.0 / s.grid.step_x(), dx) *
           std::pow(1.0 / s.grid.step_y(), dy);
}

// A spline with known coefficients used to probe the projector property:
// samples of the spline and its derivatives on any lattice.
struct KnownTensorSpline {
    Degrees deg;
    UniformGrid grid;
    OffsetGrid coeffs; // wider than the active range so boundary data is exact

    double eval(double x, double y, int dx = 0, int dy = 0) const {
        const Rect& dom = grid.base.domain;
        const double u = (x - dom.x0) / grid.step_x();
        const double v = (y - dom.y0) / grid.step_y();
        double acc = 0.0;
        for (int j = coeffs.row_lo(); j <= coeffs.row_hi(); ++j)
            for (int i = coeffs.col_lo(); i <= coeffs.col_hi(); ++i)
                acc += coeffs.at(j, i) * bspline_deriv(deg.d1, u - i, dx) *
                       bspline_deriv(deg.d2, v - j, dy);
        return acc * std::pow(1.0 / grid.step_x(), dx) *
               std::pow(1.0 / grid.step_y(), dy);
    }
};

inline KnownTensorSpline random_tensor_spline(Degrees deg, const UniformGrid& grid,
                                              std::uint64_t seed) {
    const int margin = 2 * std::max(deg.d1, deg.d2);
    KnownTensorSpline s{deg, grid,
                        OffsetGrid(-deg.d2 - margin, grid.cells_y() + margin,
                                   -deg.d1 - margin, grid.cells_x() + margin)};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : s.coeffs.data()) v = dist(rng);
    return s;
}

inline HermiteData sample_known_spline(const KnownTensorSpline& s) {
    HermiteData data = HermiteData::allocate(s.deg, s.grid);
    for (int j = data.f.row_lo(); j <= data.f.row_hi(); ++j)
        for (int i = data.f.col_lo(); i <= data.f.col_hi(); ++i) {
            const double x = s.grid.node_x(i), y = s.grid.node_y(j);
            data.f.at(j, i) = s.eval(x, y);
            data.fx.at(j, i) = s.eval(x, y, 1, 0);
            data.fy.at(j, i) = s.eval(x, y, 0, 1);
            data.fxy.at(j, i) = s.eval(x, y, 1, 1);
        }
    return data;
}

// Full fine-level expansion of one truncated basis function: every level is
// refined completely (no trimming), truncation only drops the terms whose
// support lies inside the next domain. Evaluation happens purely in the
// finest-level basis.
struct FullExpansion {
    Degrees deg;
    UniformGrid grid; // finest level
    std::vector<std::vector<double>> terms_i_j_w;
};

inline std::vector<std::vector<double>> full_expansion_terms(
    const HierarchicalMesh& mesh, Degrees deg, int level, int i, int j) {
    std::vector<std::vector<double>> cur = {{double(i), double(j), 1.0}};
    const std::vector<double> cx = subdivision_coeffs(deg.d1);
    const std::vector<double> cy = subdivision_coeffs(deg.d2);
    for (int q = level; q + 1 < mesh.depth(); ++q) {
        std::map<std::pair<int, int>, double> next;
        for (const auto& t : cur) {
            const int ti = int(t[0]), tj = int(t[1]);
            for (int s = 0; s <= deg.d2 + 1; ++s)
                for (int r = 0; r <= deg.d1 + 1; ++r) {
                    const int ci = 2 * ti + r, cj = 2 * tj + s;
                    if (mesh.region_in_domain(q + 1, ci, ci + deg.d1, cj, cj + deg.d2))
                        continue;
                    next[{cj, ci}] += t[2] * cx[std::size_t(r)] * cy[std::size_t(s)];
                }
        }
        cur.clear();
        for (const auto& [key, w] : next)
            cur.push_back({double(key.second), double(key.first), w});
    }
    return cur;
}

inline double full_expansion_eval(const HierarchicalMesh& mesh, Degrees deg,
                                  int level, int i, int j, double x, double y,
                                  int dx = 0, int dy = 0) {
    const auto terms = full_expansion_terms(mesh, deg, level, i, j);
    const UniformGrid g = mesh.level_grid(mesh.depth() - 1);
    const Rect& dom = g.base.domain;
    const double u = (x - dom.x0) / g.step_x();
    const double v = (y - dom.y0) / g.step_y();
    double acc = 0.0;
    for (const auto& t : terms)
        acc += t[2] * bspline_deriv(deg.d1, u - t[0], dx) *
               bspline_deriv(deg.d2, v - t[1], dy);
    return acc * std::pow(1.0 / g.step_x(), dx) * std::pow(1.0 / g.step_y(), dy);
}

// Random nested mesh: each level subdivides a random subset of the cells
// available at the previous one.
inline HierarchicalMesh random_mesh(const BaseGrid& base, int depth,
                                    std::uint64_t seed, double fraction = 0.35) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    HierarchicalMesh mesh(base);
    for (int l = 0; l + 1 < depth; ++l) {
        const UniformGrid g = mesh.level_grid(l);
        bool any = false;
        for (int j = 0; j < g.cells_y(); ++j)
            for (int i = 0; i < g.cells_x(); ++i)
                if (mesh.cell_in_domain(l, i, j) && coin(rng) < fraction) {
                    mesh.subdivide({l, i, j});
                    any = true;
                }
        if (!any) { // keep the requested depth meaningful
            for (int j = 0; j < g.cells_y() && !any; ++j)
                for (int i = 0; i < g.cells_x() && !any; ++i)
                    if (mesh.cell_in_domain(l, i, j)) {
                        mesh.subdivide({l, i, j});
                        any = true;
                    }
        }
    }
    return mesh;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

} // namespace oracles
