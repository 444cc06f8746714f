#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "thbqi/core.hpp"

namespace thbqi {

/// Nested domains Omega^0 >= Omega^1 >= ... >= Omega^{M-1} over dyadic
/// refinements of a base grid. Omega^0 is the whole domain; Omega^l (l >= 1)
/// is stored as the set of level-(l-1) cells composing it, so every
/// containment test is integer cell arithmetic.
///
/// Index conventions used by the whole hierarchy layer:
///  - level-l cells: (i, j), i in [0, n1*2^l), j in [0, n2*2^l);
///    children of cell (l,i,j) are (l+1, 2i+a, 2j+b), a,b in {0,1}
///  - level-l basis functions J = (j,i):
///    B((x-x0)/h_{x,l} - i) * B((y-y0)/h_{y,l} - j),
///    i in [-d1, n1*2^l - 1], j in [-d2, n2*2^l - 1];
///    support = level-l cells [i, i+d1] x [j, j+d2], clipped to the domain;
///    dyadic children of basis (l,i,j) are (l+1, 2i+r, 2j+s)
///  - a cell is active when it lies in its level's domain and is not
///    subdivided, i.e. its region is not part of the next level's domain.
class HierarchicalMesh {
public:
    explicit HierarchicalMesh(BaseGrid base);

    const BaseGrid& base() const { return base_; }
    int depth() const { return int(omega_.size()); }
    UniformGrid level_grid(int level) const { return {base_, level}; }

    /// level-l cell (i,j) inside Omega^l?
    bool cell_in_domain(int level, int i, int j) const;
    /// cell region inside Omega^{level+1}?
    bool cell_subdivided(int level, int i, int j) const;
    bool cell_active(int level, int i, int j) const;
    bool cell_active(CellId c) const { return cell_active(c.level, c.ix, c.iy); }

    /// Every level-l cell of [i0..i1] x [j0..j1] (clipped to the grid) inside
    /// Omega^l? Clipping must leave at least one cell.
    bool region_in_domain(int level, int i0, int i1, int j0, int j1) const;
    /// ... inside Omega^{level+1}?
    bool region_in_next(int level, int i0, int i1, int j0, int j1) const;
    /// Any level-l cell of the (clipped) range inside Omega^{level+1}?
    bool region_intersects_next(int level, int i0, int i1, int j0, int j1) const;

    /// Grow Omega^{level+1} by the region of the level-l cell (i,j). The cell
    /// must lie in Omega^l. Extends the hierarchy depth when needed.
    void subdivide(CellId c);

    std::vector<CellId> active_cells(int level) const;
    std::vector<CellId> all_active_cells() const;

    /// The active cell whose region contains the region of `pos`, if `pos`
    /// is at the active level or coarser there; a cell covered by finer
    /// active cells yields {false, ...}.
    struct Covering {
        bool found = false;
        CellId cell;
    };
    Covering covering_active_cell(CellId pos) const;

    /// Containing active cell of a domain point (half-open cells, the domain
    /// boundary closed on the right/top). Throws for points outside.
    CellId active_cell_at(double x, double y) const;

    /// Cells of Omega^level counted at level-(level-1) resolution.
    std::size_t domain_cell_count(int level) const;

    Rect cell_rect(CellId c) const { return level_grid(c.level).cell_rect(c.ix, c.iy); }

    bool operator==(const HierarchicalMesh& other) const;

    /// Plain-text serialization: header with domain and base resolution, then
    /// one record per level l >= 1 listing the level-(l-1) cell index pairs of
    /// Omega^l. See save_text() output for the exact layout.
    void save_text(std::ostream& out) const;
    static HierarchicalMesh load_text(std::istream& in);

private:
    struct Mask {
        int nx = 0, ny = 0;
        std::vector<std::uint8_t> bits;
        bool get(int i, int j) const { return bits[std::size_t(j) * nx + i] != 0; }
        void set(int i, int j) { bits[std::size_t(j) * nx + i] = 1; }
        std::size_t count() const;
    };

    BaseGrid base_;
    // omega_[l] for l >= 1 marks the level-(l-1) cells of Omega^l; omega_[0]
    // stays empty (Omega^0 is the full domain).
    std::vector<Mask> omega_;
};

/// Basis index at one level.
struct GridIndex {
    int i = 0;
    int j = 0;
    auto operator<=>(const GridIndex&) const = default;
};

/// One truncated hierarchical basis function: the level-`level` B-spline of
/// index (i,j) with every finer-level contribution supported inside the
/// corresponding finer domain removed.
///
/// reps[q - level] holds the surviving level-q B-spline coefficients. The
/// stored maps are trimmed: a term whose support no longer meets the next
/// finer domain is not carried further down, because it can never be
/// truncated and is identically zero on every active cell of deeper levels.
/// Restricted to an active level-q cell, the stored level-q map always
/// agrees with the function.
struct ThbFunction {
    int level = 0;
    int i = 0, j = 0;
    struct Term {
        int i, j;
        double w;
    };
    std::vector<std::vector<Term>> reps;
    /// bounding box of the active cells where the function is nonzero
    Rect support{};
};

/// Standalone construction of one truncated basis function; (i,j) must be an
/// active index of its level.
ThbFunction build_thb(const HierarchicalMesh& mesh, Degrees deg, int level,
                      int i, int j);

/// Zero the coefficients (over the level-(level+1) basis) of every B-spline
/// whose support lies inside Omega^{level+1}. `coeffs` rows are j indices,
/// columns i indices.
void truncate(const HierarchicalMesh& mesh, Degrees deg, int level,
              OffsetGrid& coeffs);

/// The truncated hierarchical basis of a mesh: active index sets per level,
/// the basis functions, and per-active-cell lists of the functions that are
/// nonzero there. Owns a copy of the mesh; immutable after construction.
class ThbBasis {
public:
    ThbBasis(const HierarchicalMesh& mesh, Degrees deg);

    const HierarchicalMesh& mesh() const { return mesh_; }
    Degrees degrees() const { return deg_; }
    int depth() const { return mesh_.depth(); }

    /// dim of the hierarchical spline space
    std::size_t size() const { return functions_.size(); }
    const ThbFunction& function(std::size_t g) const { return functions_[g]; }
    /// A^l, sorted by (j, i)
    const std::vector<GridIndex>& active(int level) const { return active_[level]; }

    const std::vector<CellId>& cells() const { return cells_; }
    std::size_t cell_count() const { return cells_.size(); }
    /// ordinal of an active cell, -1 for inactive positions
    int cell_ordinal(CellId c) const;
    int cell_ordinal_at(double x, double y) const;

    /// Global indices of the basis functions nonzero on an active cell,
    /// sorted by (level, j, i).
    std::span<const std::uint32_t> functions_on_cell(int cell_ordinal) const;

    /// Value (or mixed derivative) of one basis function at a domain point.
    double eval_function(std::size_t g, double x, double y, int dx = 0,
                         int dy = 0) const;

    /// Measured admissibility class: the largest number of successive levels
    /// whose functions are simultaneously nonzero on some active cell.
    int admissibility_class() const { return admissibility_; }

private:
    friend class HierSpline;
    void build_active_sets();
    void build_functions();
    void register_on_cells();

    HierarchicalMesh mesh_;
    Degrees deg_;
    std::vector<std::vector<GridIndex>> active_;
    std::vector<ThbFunction> functions_;
    std::vector<CellId> cells_;
    std::vector<std::vector<int>> cell_ordinal_; // per level, dense grid of ordinals
    std::vector<std::uint32_t> cell_funcs_;      // concatenated per-cell lists
    std::vector<std::size_t> cell_funcs_begin_;  // size cells()+1
    int admissibility_ = 1;
};

/// A^l(c) for l = 0..M-1: the active indices per level whose basis functions
/// are nonzero on the active cell c.
std::vector<std::vector<GridIndex>> local_active_set(const ThbBasis& basis,
                                                     CellId c);

} // namespace thbqi
