#include "thbqi/tensor_qi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "thbqi/bspline.hpp"
#include "thbqi/uniform_qi.hpp"

namespace thbqi {

GammaRange gamma_range(Degrees deg, const UniformGrid& grid) {
    return {-deg.d1, grid.cells_x() - 1, -deg.d2, grid.cells_y() - 1};
}

HermiteData HermiteData::allocate(Degrees deg, const UniformGrid& grid) {
    const int n1 = grid.cells_x(), n2 = grid.cells_y();
    OffsetGrid proto(-deg.d2 + 1, n2 + deg.d2 - 1, -deg.d1 + 1, n1 + deg.d1 - 1);
    return {deg, grid, proto, proto, proto, proto};
}

HermiteData HermiteData::sample(const SmoothFunction& fn, Degrees deg,
                                const UniformGrid& grid) {
    HermiteData data = allocate(deg, grid);
    for (int j = data.f.row_lo(); j <= data.f.row_hi(); ++j) {
        const double y = grid.node_y(j);
        for (int i = data.f.col_lo(); i <= data.f.col_hi(); ++i) {
            const double x = grid.node_x(i);
            data.f.at(j, i) = fn.deriv(0, 0, x, y);
            data.fx.at(j, i) = fn.deriv(1, 0, x, y);
            data.fy.at(j, i) = fn.deriv(0, 1, x, y);
            data.fxy.at(j, i) = fn.deriv(1, 1, x, y);
        }
    }
    return data;
}

double lambda_functional(const HermiteData& data, int j, int i) {
    const int d1 = data.deg.d1, d2 = data.deg.d2;
    const QiCoefficients& q1 = qi_coefficients(d1);
    const QiCoefficients& q2 = qi_coefficients(d2);
    if (!data.f.contains(j + 1, i + 1) || !data.f.contains(j + d2, i + d1))
        throw std::out_of_range("lambda_functional: window of J = (" +
                                std::to_string(j) + "," + std::to_string(i) +
                                ") leaves the sampled lattice");

    const double hx = data.grid.step_x(), hy = data.grid.step_y();
    double aa = 0.0, ab = 0.0, ba = 0.0, bb = 0.0;
    for (int r2 = 1; r2 <= d2; ++r2) {
        double fa = 0.0, fb = 0.0, ga = 0.0, gb = 0.0;
        for (int r1 = 1; r1 <= d1; ++r1) {
            fa += q1.alpha[r1 - 1] * data.f.at(j + r2, i + r1);
            fb += q1.beta[r1 - 1] * data.fx.at(j + r2, i + r1);
            ga += q1.alpha[r1 - 1] * data.fy.at(j + r2, i + r1);
            gb += q1.beta[r1 - 1] * data.fxy.at(j + r2, i + r1);
        }
        aa += q2.alpha[r2 - 1] * fa;
        ab += q2.alpha[r2 - 1] * fb;
        ba += q2.beta[r2 - 1] * ga;
        bb += q2.beta[r2 - 1] * gb;
    }
    return aa - hx * ab - hy * ba + hx * hy * bb;
}

TensorSpline tensor_qi(const HermiteData& data) {
    const GammaRange g = gamma_range(data.deg, data.grid);
    TensorSpline spline{data.deg, data.grid,
                        OffsetGrid(g.j_lo, g.j_hi, g.i_lo, g.i_hi)};
    for (int j = g.j_lo; j <= g.j_hi; ++j)
        for (int i = g.i_lo; i <= g.i_hi; ++i)
            spline.coeffs.at(j, i) = lambda_functional(data, j, i);
    return spline;
}

double TensorSpline::eval(double x, double y, int dx, int dy) const {
    const Rect& dom = grid.base.domain;
    if (!dom.contains(x, y))
        throw std::domain_error("TensorSpline::eval: point (" + std::to_string(x) +
                                ", " + std::to_string(y) + ") outside the domain");
    if (dx > deg.d1 || dy > deg.d2)
        throw std::invalid_argument("TensorSpline::eval: derivative order exceeds degree");

    const double u = (x - dom.x0) / grid.step_x();
    const double v = (y - dom.y0) / grid.step_y();
    int ci = std::min(int(std::floor(u)), grid.cells_x() - 1);
    int cj = std::min(int(std::floor(v)), grid.cells_y() - 1);
    if (ci < 0) ci = 0;
    if (cj < 0) cj = 0;

    double bx[8], by[8];
    for (int r = 0; r <= deg.d1; ++r)
        bx[r] = bspline_deriv(deg.d1, u - (ci - deg.d1 + r), dx);
    for (int s = 0; s <= deg.d2; ++s)
        by[s] = bspline_deriv(deg.d2, v - (cj - deg.d2 + s), dy);

    double acc = 0.0;
    for (int s = 0; s <= deg.d2; ++s) {
        if (by[s] == 0.0) continue;
        double row = 0.0;
        for (int r = 0; r <= deg.d1; ++r)
            row += coeffs.at(cj - deg.d2 + s, ci - deg.d1 + r) * bx[r];
        acc += by[s] * row;
    }
    return acc * std::pow(1.0 / grid.step_x(), dx) * std::pow(1.0 / grid.step_y(), dy);
}

Rect functional_support(Degrees deg, const UniformGrid& grid, int j, int i) {
    return {grid.node_x(i + 1), grid.node_y(j + 1),
            grid.node_x(i + deg.d1), grid.node_y(j + deg.d2)};
}

BoundConstants bound_constants(Degrees deg) {
    const QiCoefficients& q1 = qi_coefficients(deg.d1);
    const QiCoefficients& q2 = qi_coefficients(deg.d2);
    const double a1 = l1_norm(q1.alpha), b1 = l1_norm(q1.beta);
    const double a2 = l1_norm(q2.alpha), b2 = l1_norm(q2.beta);
    return {a2 * a1, a2 * b1, b2 * a1, b2 * b1};
}

} // namespace thbqi
