#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "thbqi/hqi.hpp"

namespace thbqi {

struct SamplePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Vertices of the level-(max_levels-1) lattice inside the domain: a
/// (n1*2^{K-1}+1) x (n2*2^{K-1}+1) point grid.
std::vector<SamplePoint> default_sample_points(const BaseGrid& base, int max_levels);

struct RefinementConfig {
    int max_levels = 5;
    double epsilon = 0.0;
    double eps_factor = 1.5;
    std::vector<SamplePoint> sample_points;
};

/// Per active cell (ordinal order of the spline's basis) the maximum
/// pointwise error over the sample points the cell contains; cells without
/// sample points carry 0.
struct CellIndicator {
    std::vector<double> delta;
    double max_delta = 0.0;
};

/// Cells are closed: a sample point on a shared edge or corner is seen by
/// every active cell containing it.
CellIndicator cell_errors(const HierSpline& spline, const SmoothFunction& f,
                          std::span<const SamplePoint> points);

/// One marking pass: cells with delta > epsilon are marked, each marked
/// cell additionally marks the (at most 8) active cells touching it at the
/// same or a coarser level, and every marked cell is split into its four
/// dyadic children. Cells at max_level-1 (when max_level > 0) are left
/// unsplit so the depth budget is never exceeded.
struct MarkResult {
    HierarchicalMesh mesh;
    std::size_t cells_split = 0;
};
MarkResult mark_and_split(const ThbBasis& basis, const CellIndicator& indicator,
                          double epsilon, int max_levels = 0);

/// epsilon rule: factor times the maximum error of the single-level
/// (tensor-product) operator at the target finest level over the sample
/// points.
double epsilon_from_tensor(const TensorSpline& finest, const SmoothFunction& f,
                           std::span<const SamplePoint> points, double factor = 1.5);

using SplineBuilder = std::function<HierSpline(std::shared_ptr<const ThbBasis>)>;

struct AdaptiveResult {
    struct Iteration {
        int index = 0;           // 1-based
        int levels = 0;          // mesh depth when the spline was built
        std::size_t dim = 0;     // hierarchical space dimension
        double max_delta = 0.0;  // indicator maximum
        std::size_t cells_split = 0;
    };

    HierarchicalMesh mesh;
    std::shared_ptr<const ThbBasis> basis;
    HierSpline spline;
    std::vector<Iteration> trace;
    bool by_tolerance = false;
};

/// The adaptive loop: build the quasi-interpolant on the current mesh,
/// measure the per-cell indicator, stop when every cell passes (or the level
/// budget is spent), otherwise mark, split and repeat. Runs at most
/// max_levels iterations. The observer, when given, sees every intermediate
/// spline together with its trace record.
AdaptiveResult adaptive_refine(
    const BaseGrid& base, Degrees deg, const SmoothFunction& f,
    const RefinementConfig& config, const SplineBuilder& builder,
    const std::function<void(const AdaptiveResult::Iteration&, const HierSpline&)>&
        observer = {});

} // namespace thbqi
