#pragma once

#include <cstdint>
#include <memory>
#include <unordered_set>
#include <vector>

#include "thbqi/hierarchy.hpp"
#include "thbqi/tensor_qi.hpp"

namespace thbqi {

/// Supplies f and its first/mixed derivatives at lattice nodes
/// (x0 + i*h_{x,level}, y0 + j*h_{y,level}) of any hierarchy level.
/// Implementations must be deterministic: repeated queries return the same
/// value.
class LevelHermiteProvider {
public:
    enum class Quantity { f, fx, fy, fxy };

    virtual ~LevelHermiteProvider() = default;
    virtual double sample(int level, int i, int j, Quantity q) = 0;
};

/// Provider backed by a function with analytic derivatives.
class AnalyticHermiteProvider : public LevelHermiteProvider {
public:
    AnalyticHermiteProvider(const SmoothFunction& fn, BaseGrid grid)
        : fn_(fn), grid_(grid) {}
    double sample(int level, int i, int j, Quantity q) override;

private:
    const SmoothFunction& fn_;
    BaseGrid grid_;
};

/// Forwards to an inner provider while counting distinct
/// (level, point, quantity) queries.
class CountingHermiteProvider : public LevelHermiteProvider {
public:
    explicit CountingHermiteProvider(LevelHermiteProvider& inner) : inner_(inner) {}
    double sample(int level, int i, int j, Quantity q) override;
    std::size_t distinct_queries() const { return seen_.size(); }
    void reset() { seen_.clear(); }

private:
    LevelHermiteProvider& inner_;
    std::unordered_set<std::uint64_t> seen_;
};

/// f values at lattice nodes of a hierarchy level (no derivatives).
class LevelValueSource {
public:
    virtual ~LevelValueSource() = default;
    virtual double value_at(int level, int i, int j) = 0;
};

class AnalyticValueSource : public LevelValueSource {
public:
    AnalyticValueSource(const SmoothFunction& fn, BaseGrid grid)
        : fn_(fn), grid_(grid) {}
    double value_at(int level, int i, int j) override {
        const UniformGrid g{grid_, level};
        return fn_.value(g.node_x(i), g.node_y(j));
    }

private:
    const SmoothFunction& fn_;
    BaseGrid grid_;
};

/// First-derivative finite-difference stencil of the requested accuracy
/// order on order+1 consecutive lattice nodes. `anchor` is the offset of the
/// first node relative to the target: odd orders use the balanced one-sided
/// layout (anchor = -(order-1)/2), even orders the symmetric one.
/// Weights exclude the 1/h factor. Order 3 yields (-2,-3,6,-1)/6 at
/// offsets -1..2.
struct FdStencil {
    int order;
    int anchor;
    std::vector<double> weights;
};
FdStencil fd_stencil(int order);

/// Hermite provider that synthesizes fx, fy, fxy from grid values of f via
/// finite differences of order (k1, k2), k1 >= d1 and k2 >= d2. The same
/// interior stencil is applied at every node, reading f from an accordingly
/// enlarged lattice; derivative queries at node (i,j) touch f at
/// i+anchor..i+anchor+k1 and j+anchor..j+anchor+k2.
class FdHermiteProvider : public LevelHermiteProvider {
public:
    FdHermiteProvider(LevelValueSource& source, BaseGrid grid, Degrees deg, int k1,
                      int k2);
    double sample(int level, int i, int j, Quantity q) override;

    const FdStencil& stencil_x() const { return sx_; }
    const FdStencil& stencil_y() const { return sy_; }

private:
    LevelValueSource& source_;
    BaseGrid grid_;
    FdStencil sx_, sy_;
};

/// A spline in the hierarchical space: one coefficient per truncated basis
/// function, evaluated through per-cell coefficient patches assembled once.
class HierSpline {
public:
    HierSpline(std::shared_ptr<const ThbBasis> basis, std::vector<double> coeffs);

    double eval(double x, double y, int dx = 0, int dy = 0) const;
    const std::vector<double>& coefficients() const { return coeffs_; }
    const ThbBasis& basis() const { return *basis_; }
    std::shared_ptr<const ThbBasis> basis_ptr() const { return basis_; }
    std::size_t dim() const { return coeffs_.size(); }

private:
    std::shared_ptr<const ThbBasis> basis_;
    std::vector<double> coeffs_;
    std::vector<double> patches_; // cell_count * (d1+1)*(d2+1), level-k local coeffs
};

/// The hierarchical quasi-interpolant: the Hermite functional of each active
/// index, computed with its own level's step sizes, attached to the truncated
/// basis. Only active functionals are evaluated.
HierSpline hierarchical_qi(std::shared_ptr<const ThbBasis> basis,
                           LevelHermiteProvider& provider);

/// Pull one level's full extended-lattice data through a provider.
HermiteData materialize_hermite(LevelHermiteProvider& provider, Degrees deg,
                                const UniformGrid& grid);

/// Data region a cell's value depends on: the union of the functional
/// supports of every basis function nonzero on the cell, joined with the
/// cell itself, plus the enclosing axis-aligned rectangle.
struct RegionC {
    CellId cell;
    int k_m = 0; // coarsest level that can contribute on the cell
    Rect bbox{};
    std::vector<Rect> parts;
};
RegionC region_C(const ThbBasis& basis, CellId c);

/// Max of |d^(dx,dy) f| over the region, sampled on an 11x11 grid per
/// constituent rectangle.
double region_max_abs(const SmoothFunction& fn, int dx, int dy, const RegionC& C);

/// Per-cell bound on |Q_H(f)| from the functional bound aggregated over the
/// levels that can act on the cell (class-m mesh):
/// k00*F + 2^{m-1}h_x k10*Fx + 2^{m-1}h_y k01*Fy + 4^{m-1}h_x h_y k11*Fxy,
/// with the extrema over region_C supplied by the caller and h the cell
/// level's step sizes.
double lemma2_bound(const ThbBasis& basis, CellId c, double max_f, double max_fx,
                    double max_fy, double max_fxy);

/// Constants of the local error bound for a class-m hierarchy.
struct TheoremConstants {
    int m = 1;
    double w1 = 0.0, w2 = 0.0; // 2^{m-1}(d_i - 1)
    double gamma = 0.0;        // 2^{m-1} max(1, h_x0, h_y0)
    double K = 0.0;            // 1 + k00 + (k10 + k01 + k11) gamma
    double v1 = 0.0, v2 = 0.0, v3 = 0.0;
    int k_m(int cell_level) const { return std::max(0, cell_level - m + 1); }
};
TheoremConstants theorem_constants(Degrees deg, int m, double hx0, double hy0);

/// Per-cell bound on |f - Q_H(f)|:
/// v1*Fd1*h_x^{d1+1} + v2*Fd2*h_y^{d2+1} + v3*Fmix*h_x^{d1+1}h_y^{d2+1},
/// with the (d+1)-order derivative extrema over region_C supplied.
double theorem1_bound(const ThbBasis& basis, CellId c, double max_fd1,
                      double max_fd2, double max_fmix);

} // namespace thbqi
