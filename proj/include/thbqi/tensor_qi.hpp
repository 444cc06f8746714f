#pragma once

#include "thbqi/core.hpp"

namespace thbqi {

/// Index ranges of the tensor basis/functional set on a level grid:
/// J = (j,i) with i = -d1..N1-1, j = -d2..N2-1 (the (N1+d1)(N2+d2) basis
/// functions that are nonzero on the domain).
struct GammaRange {
    int i_lo, i_hi, j_lo, j_hi;
    bool contains(int j, int i) const {
        return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
    }
    std::size_t count() const {
        return std::size_t(i_hi - i_lo + 1) * std::size_t(j_hi - j_lo + 1);
    }
};
GammaRange gamma_range(Degrees deg, const UniformGrid& grid);

/// Values of f, f_x, f_y, f_xy on the inner nodes of the extended lattice of
/// one level: i = -d1+1..N1+d1-1, j = -d2+1..N2+d2-1 (rows j, columns i).
struct HermiteData {
    Degrees deg;
    UniformGrid grid;
    OffsetGrid f, fx, fy, fxy;

    static HermiteData allocate(Degrees deg, const UniformGrid& grid);
    /// Fill from a function with analytic derivatives.
    static HermiteData sample(const SmoothFunction& fn, Degrees deg,
                              const UniformGrid& grid);
};

/// Hermite functional of multi-index J = (j,i): four bilinear forms over the
/// local d2 x d1 windows starting one node right/up of (i,j), scaled by the
/// level's step sizes. Throws if a window leaves the stored data range.
double lambda_functional(const HermiteData& data, int j, int i);

/// Tensor-product spline on one level: coefficients over the basis range
/// j = -d2..N2-1, i = -d1..N1-1.
struct TensorSpline {
    Degrees deg;
    UniformGrid grid;
    OffsetGrid coeffs;

    /// Mixed derivative of order (dx, dy) at a domain point; local sum over
    /// the (d1+1)(d2+1) basis functions alive on the containing cell.
    double eval(double x, double y, int dx = 0, int dy = 0) const;
    std::size_t dim() const { return coeffs.size(); }
};

/// The quasi-interpolant: coefficient (j,i) is lambda_functional(data, j, i).
TensorSpline tensor_qi(const HermiteData& data);

/// Support of the functional of J = (j,i): [x_{i+1}, x_{i+d1}] x [y_{j+1}, y_{j+d2}].
Rect functional_support(Degrees deg, const UniformGrid& grid, int j, int i);

/// Products of the coefficient 1-norms bounding the four functional addends:
/// k_rs built from the x-factor (alpha for r=0, beta for r=1 acting on d1)
/// and the y-factor (alpha/beta acting on d2).
struct BoundConstants {
    double k00, k10, k01, k11;
};
BoundConstants bound_constants(Degrees deg);

} // namespace thbqi
