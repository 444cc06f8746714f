#include "thbqi/hqi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "thbqi/bspline.hpp"
#include "thbqi/uniform_qi.hpp"

namespace thbqi {

double AnalyticHermiteProvider::sample(int level, int i, int j, Quantity q) {
    const UniformGrid g{grid_, level};
    const double x = g.node_x(i), y = g.node_y(j);
    switch (q) {
        case Quantity::f: return fn_.deriv(0, 0, x, y);
        case Quantity::fx: return fn_.deriv(1, 0, x, y);
        case Quantity::fy: return fn_.deriv(0, 1, x, y);
        case Quantity::fxy: return fn_.deriv(1, 1, x, y);
    }
    return 0.0;
}

double CountingHermiteProvider::sample(int level, int i, int j, Quantity q) {
    const std::uint64_t key = (std::uint64_t(level) << 50) |
                              (std::uint64_t(int(q)) << 48) |
                              (std::uint64_t(std::uint32_t(i + (1 << 20))) << 24) |
                              std::uint64_t(std::uint32_t(j + (1 << 20)));
    seen_.insert(key);
    return inner_.sample(level, i, j, q);
}

FdStencil fd_stencil(int order) {
    if (order < 1)
        throw std::invalid_argument("fd_stencil: order must be positive");
    const int n = order + 1;
    const int anchor = (order % 2 == 1) ? -(order - 1) / 2 : -order / 2;

    // Fornberg weights for the first derivative at offset 0 on the nodes
    // anchor..anchor+order.
    std::vector<double> delta0(std::size_t(n) * n, 0.0); // derivative order 0
    std::vector<double> delta1(std::size_t(n) * n, 0.0); // derivative order 1
    auto d0 = [&](int nn, int v) -> double& { return delta0[std::size_t(nn) * n + v]; };
    auto d1 = [&](int nn, int v) -> double& { return delta1[std::size_t(nn) * n + v]; };

    d0(0, 0) = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn < n; ++nn) {
        const double an = anchor + nn;
        const double aprev = anchor + nn - 1;
        double c2 = 1.0;
        for (int v = 0; v < nn; ++v) {
            const double av = anchor + v;
            const double c3 = an - av;
            c2 *= c3;
            d1(nn, v) = (an * d1(nn - 1, v) - d0(nn - 1, v)) / c3;
            d0(nn, v) = an * d0(nn - 1, v) / c3;
        }
        d1(nn, nn) = c1 / c2 * (d0(nn - 1, nn - 1) - aprev * d1(nn - 1, nn - 1));
        d0(nn, nn) = -c1 / c2 * aprev * d0(nn - 1, nn - 1);
        c1 = c2;
    }

    FdStencil s{order, anchor, std::vector<double>(std::size_t(n))};
    for (int v = 0; v < n; ++v) s.weights[std::size_t(v)] = d1(n - 1, v);
    return s;
}

FdHermiteProvider::FdHermiteProvider(LevelValueSource& source, BaseGrid grid,
                                     Degrees deg, int k1, int k2)
    : source_(source), grid_(grid), sx_(fd_stencil(k1)), sy_(fd_stencil(k2)) {
    if (k1 < deg.d1 || k2 < deg.d2)
        throw std::invalid_argument(
            "FdHermiteProvider: stencil orders (" + std::to_string(k1) + "," +
            std::to_string(k2) + ") must reach the bidegree (" +
            std::to_string(deg.d1) + "," + std::to_string(deg.d2) + ")");
}

double FdHermiteProvider::sample(int level, int i, int j, Quantity q) {
    const UniformGrid g{grid_, level};
    switch (q) {
        case Quantity::f:
            return source_.value_at(level, i, j);
        case Quantity::fx: {
            double acc = 0.0;
            for (std::size_t r = 0; r < sx_.weights.size(); ++r)
                acc += sx_.weights[r] * source_.value_at(level, i + sx_.anchor + int(r), j);
            return acc / g.step_x();
        }
        case Quantity::fy: {
            double acc = 0.0;
            for (std::size_t s = 0; s < sy_.weights.size(); ++s)
                acc += sy_.weights[s] * source_.value_at(level, i, j + sy_.anchor + int(s));
            return acc / g.step_y();
        }
        case Quantity::fxy: {
            double acc = 0.0;
            for (std::size_t s = 0; s < sy_.weights.size(); ++s) {
                double row = 0.0;
                for (std::size_t r = 0; r < sx_.weights.size(); ++r)
                    row += sx_.weights[r] *
                           source_.value_at(level, i + sx_.anchor + int(r),
                                            j + sy_.anchor + int(s));
                acc += sy_.weights[s] * row;
            }
            return acc / (g.step_x() * g.step_y());
        }
    }
    return 0.0;
}

HierSpline::HierSpline(std::shared_ptr<const ThbBasis> basis,
                       std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    const ThbBasis& b = *basis_;
    if (coeffs_.size() != b.size())
        throw std::invalid_argument("HierSpline: expected " + std::to_string(b.size()) +
                                    " coefficients, got " + std::to_string(coeffs_.size()));

    const Degrees deg = b.degrees();
    const std::size_t patch = std::size_t(deg.d1 + 1) * (deg.d2 + 1);
    patches_.assign(b.cell_count() * patch, 0.0);

    for (std::size_t g = 0; g < coeffs_.size(); ++g) {
        const double lam = coeffs_[g];
        const ThbFunction& fn = b.function(g);
        for (int q = fn.level; q < b.depth(); ++q) {
            const UniformGrid lg = b.mesh().level_grid(q);
            for (const ThbFunction::Term& t : fn.reps[q - fn.level]) {
                const int i0 = std::max(t.i, 0);
                const int i1 = std::min(t.i + deg.d1, lg.cells_x() - 1);
                const int j0 = std::max(t.j, 0);
                const int j1 = std::min(t.j + deg.d2, lg.cells_y() - 1);
                for (int jj = j0; jj <= j1; ++jj)
                    for (int ii = i0; ii <= i1; ++ii) {
                        const int ord = b.cell_ordinal({q, ii, jj});
                        if (ord < 0) continue;
                        const std::size_t local =
                            std::size_t(t.j - (jj - deg.d2)) * (deg.d1 + 1) +
                            std::size_t(t.i - (ii - deg.d1));
                        patches_[std::size_t(ord) * patch + local] += lam * t.w;
                    }
            }
        }
    }
}

double HierSpline::eval(double x, double y, int dx, int dy) const {
    const ThbBasis& b = *basis_;
    const Degrees deg = b.degrees();
    if (dx > deg.d1 || dy > deg.d2)
        throw std::invalid_argument("HierSpline::eval: derivative order exceeds degree");

    const CellId c = b.mesh().active_cell_at(x, y);
    const int ord = b.cell_ordinal(c);
    const UniformGrid lg = b.mesh().level_grid(c.level);
    const double u = (x - lg.base.domain.x0) / lg.step_x();
    const double v = (y - lg.base.domain.y0) / lg.step_y();

    double bx[8], by[8];
    for (int r = 0; r <= deg.d1; ++r)
        bx[r] = bspline_deriv(deg.d1, u - (c.ix - deg.d1 + r), dx);
    for (int s = 0; s <= deg.d2; ++s)
        by[s] = bspline_deriv(deg.d2, v - (c.iy - deg.d2 + s), dy);

    const std::size_t patch = std::size_t(deg.d1 + 1) * (deg.d2 + 1);
    const double* p = patches_.data() + std::size_t(ord) * patch;
    double acc = 0.0;
    for (int s = 0; s <= deg.d2; ++s) {
        if (by[s] == 0.0) continue;
        double row = 0.0;
        for (int r = 0; r <= deg.d1; ++r) row += p[s * (deg.d1 + 1) + r] * bx[r];
        acc += by[s] * row;
    }
    return acc * std::pow(1.0 / lg.step_x(), dx) * std::pow(1.0 / lg.step_y(), dy);
}

HierSpline hierarchical_qi(std::shared_ptr<const ThbBasis> basis,
                           LevelHermiteProvider& provider) {
    const ThbBasis& b = *basis;
    const Degrees deg = b.degrees();
    const QiCoefficients& q1 = qi_coefficients(deg.d1);
    const QiCoefficients& q2 = qi_coefficients(deg.d2);

    std::vector<double> lambda;
    lambda.reserve(b.size());
    for (int l = 0; l < b.depth(); ++l) {
        const UniformGrid g = b.mesh().level_grid(l);
        const double hx = g.step_x(), hy = g.step_y();
        for (const GridIndex& J : b.active(l)) {
            double aa = 0.0, ab = 0.0, ba = 0.0, bb = 0.0;
            for (int r2 = 1; r2 <= deg.d2; ++r2) {
                double fa = 0.0, fb = 0.0, ga = 0.0, gb = 0.0;
                for (int r1 = 1; r1 <= deg.d1; ++r1) {
                    const int i = J.i + r1, j = J.j + r2;
                    using Q = LevelHermiteProvider::Quantity;
                    fa += q1.alpha[r1 - 1] * provider.sample(l, i, j, Q::f);
                    fb += q1.beta[r1 - 1] * provider.sample(l, i, j, Q::fx);
                    ga += q1.alpha[r1 - 1] * provider.sample(l, i, j, Q::fy);
                    gb += q1.beta[r1 - 1] * provider.sample(l, i, j, Q::fxy);
                }
                aa += q2.alpha[r2 - 1] * fa;
                ab += q2.alpha[r2 - 1] * fb;
                ba += q2.beta[r2 - 1] * ga;
                bb += q2.beta[r2 - 1] * gb;
            }
            lambda.push_back(aa - hx * ab - hy * ba + hx * hy * bb);
        }
    }
    return HierSpline(std::move(basis), std::move(lambda));
}

HermiteData materialize_hermite(LevelHermiteProvider& provider, Degrees deg,
                                const UniformGrid& grid) {
    HermiteData data = HermiteData::allocate(deg, grid);
    using Q = LevelHermiteProvider::Quantity;
    for (int j = data.f.row_lo(); j <= data.f.row_hi(); ++j)
        for (int i = data.f.col_lo(); i <= data.f.col_hi(); ++i) {
            data.f.at(j, i) = provider.sample(grid.level, i, j, Q::f);
            data.fx.at(j, i) = provider.sample(grid.level, i, j, Q::fx);
            data.fy.at(j, i) = provider.sample(grid.level, i, j, Q::fy);
            data.fxy.at(j, i) = provider.sample(grid.level, i, j, Q::fxy);
        }
    return data;
}

RegionC region_C(const ThbBasis& basis, CellId c) {
    const int ord = basis.cell_ordinal(c);
    if (ord < 0) throw std::invalid_argument("region_C: cell is not active");

    RegionC out;
    out.cell = c;
    out.k_m = std::max(0, c.level - basis.admissibility_class() + 1);
    const Rect cell = basis.mesh().cell_rect(c);
    out.parts.push_back(cell);
    out.bbox = cell;
    for (std::uint32_t g : basis.functions_on_cell(ord)) {
        const ThbFunction& fn = basis.function(g);
        const Rect lam = functional_support(basis.degrees(),
                                            basis.mesh().level_grid(fn.level), fn.j,
                                            fn.i);
        out.parts.push_back(lam);
        out.bbox = out.bbox.united(lam);
    }
    return out;
}

double region_max_abs(const SmoothFunction& fn, int dx, int dy, const RegionC& C) {
    double best = 0.0;
    for (const Rect& r : C.parts) {
        for (int a = 0; a <= 10; ++a) {
            const double x = r.x0 + (r.x1 - r.x0) * a / 10.0;
            for (int b = 0; b <= 10; ++b) {
                const double y = r.y0 + (r.y1 - r.y0) * b / 10.0;
                best = std::max(best, std::abs(fn.deriv(dx, dy, x, y)));
            }
        }
    }
    return best;
}

double lemma2_bound(const ThbBasis& basis, CellId c, double max_f, double max_fx,
                    double max_fy, double max_fxy) {
    const BoundConstants k = bound_constants(basis.degrees());
    const int m = basis.admissibility_class();
    const UniformGrid g = basis.mesh().level_grid(c.level);
    const double two = std::pow(2.0, m - 1);
    const double four = std::pow(4.0, m - 1);
    return k.k00 * max_f + two * g.step_x() * k.k10 * max_fx +
           two * g.step_y() * k.k01 * max_fy +
           four * g.step_x() * g.step_y() * k.k11 * max_fxy;
}

TheoremConstants theorem_constants(Degrees deg, int m, double hx0, double hy0) {
    const BoundConstants k = bound_constants(deg);
    TheoremConstants tc;
    tc.m = m;
    const double two = std::pow(2.0, m - 1);
    tc.w1 = two * (deg.d1 - 1);
    tc.w2 = two * (deg.d2 - 1);
    tc.gamma = two * std::max({1.0, hx0, hy0});
    tc.K = 1.0 + k.k00 + (k.k10 + k.k01 + k.k11) * tc.gamma;
    tc.v1 = tc.K * std::pow(tc.w1, deg.d1 + 1);
    tc.v2 = tc.K * std::pow(tc.w2, deg.d2 + 1);
    tc.v3 = tc.K * std::pow(tc.w1, deg.d1 + 1) * std::pow(tc.w2, deg.d2 + 1);
    return tc;
}

double theorem1_bound(const ThbBasis& basis, CellId c, double max_fd1,
                      double max_fd2, double max_fmix) {
    const Degrees deg = basis.degrees();
    const UniformGrid g = basis.mesh().level_grid(c.level);
    const TheoremConstants tc =
        theorem_constants(deg, basis.admissibility_class(), basis.mesh().base().hx(),
                          basis.mesh().base().hy());
    const double px = std::pow(g.step_x(), deg.d1 + 1);
    const double py = std::pow(g.step_y(), deg.d2 + 1);
    return tc.v1 * max_fd1 * px + tc.v2 * max_fd2 * py + tc.v3 * max_fmix * px * py;
}

} // namespace thbqi
