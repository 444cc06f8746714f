#include "thbqi/refine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace thbqi {

std::vector<SamplePoint> default_sample_points(const BaseGrid& base, int max_levels) {
    if (max_levels < 1)
        throw std::invalid_argument("default_sample_points: max_levels must be >= 1");
    const UniformGrid g{base, max_levels - 1};
    std::vector<SamplePoint> pts;
    pts.reserve(std::size_t(g.cells_x() + 1) * (g.cells_y() + 1));
    for (int j = 0; j <= g.cells_y(); ++j)
        for (int i = 0; i <= g.cells_x(); ++i)
            pts.push_back({g.node_x(i), g.node_y(j)});
    return pts;
}

namespace {

// All active cells whose closure contains the point; lattice hits are
// detected with a step-relative tolerance.
void candidate_cells(const HierarchicalMesh& mesh, double x, double y,
                     std::vector<CellId>& out) {
    out.clear();
    const Rect& dom = mesh.base().domain;
    for (int l = 0; l < mesh.depth(); ++l) {
        const UniformGrid g = mesh.level_grid(l);
        const double u = (x - dom.x0) / g.step_x();
        const double v = (y - dom.y0) / g.step_y();
        const double tol = 1e-9;

        int iset[2], jset[2];
        int ni = 1, nj = 1;
        const double ru = std::round(u), rv = std::round(v);
        if (std::abs(u - ru) <= tol * std::max(1.0, std::abs(u))) {
            iset[0] = int(ru) - 1;
            iset[1] = int(ru);
            ni = 2;
        } else {
            iset[0] = int(std::floor(u));
        }
        if (std::abs(v - rv) <= tol * std::max(1.0, std::abs(v))) {
            jset[0] = int(rv) - 1;
            jset[1] = int(rv);
            nj = 2;
        } else {
            jset[0] = int(std::floor(v));
        }
        for (int a = 0; a < ni; ++a) {
            if (iset[a] < 0 || iset[a] >= g.cells_x()) continue;
            for (int b = 0; b < nj; ++b) {
                if (jset[b] < 0 || jset[b] >= g.cells_y()) continue;
                if (mesh.cell_active(l, iset[a], jset[b]))
                    out.push_back({l, iset[a], jset[b]});
            }
        }
    }
}

} // namespace

CellIndicator cell_errors(const HierSpline& spline, const SmoothFunction& f,
                          std::span<const SamplePoint> points) {
    const ThbBasis& basis = spline.basis();
    CellIndicator ind;
    ind.delta.assign(basis.cell_count(), 0.0);

    std::vector<CellId> cand;
    for (const SamplePoint& p : points) {
        candidate_cells(basis.mesh(), p.x, p.y, cand);
        if (cand.empty()) continue; // outside the domain
        const double err = std::abs(spline.eval(p.x, p.y) - f.value(p.x, p.y));
        for (const CellId& c : cand) {
            const int ord = basis.cell_ordinal(c);
            ind.delta[std::size_t(ord)] = std::max(ind.delta[std::size_t(ord)], err);
        }
        ind.max_delta = std::max(ind.max_delta, err);
    }
    return ind;
}

MarkResult mark_and_split(const ThbBasis& basis, const CellIndicator& indicator,
                          double epsilon, int max_levels) {
    const HierarchicalMesh& mesh = basis.mesh();
    if (indicator.delta.size() != basis.cell_count())
        throw std::invalid_argument("mark_and_split: indicator does not match the mesh");

    std::set<CellId> marked;
    for (std::size_t c = 0; c < indicator.delta.size(); ++c) {
        if (!(indicator.delta[c] > epsilon)) continue;
        const CellId cell = basis.cells()[c];
        marked.insert(cell);
        // the (at most) 8 touching neighbors, same level or coarser
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const CellId pos{cell.level, cell.ix + di, cell.iy + dj};
                const UniformGrid g = mesh.level_grid(cell.level);
                if (pos.ix < 0 || pos.ix >= g.cells_x() || pos.iy < 0 ||
                    pos.iy >= g.cells_y())
                    continue;
                const auto cov = mesh.covering_active_cell(pos);
                if (cov.found) marked.insert(cov.cell);
            }
        }
    }

    MarkResult result{mesh, 0};
    for (const CellId& c : marked) {
        if (max_levels > 0 && c.level + 2 > max_levels) continue;
        result.mesh.subdivide(c);
        ++result.cells_split;
    }
    return result;
}

double epsilon_from_tensor(const TensorSpline& finest, const SmoothFunction& f,
                           std::span<const SamplePoint> points, double factor) {
    double worst = 0.0;
    for (const SamplePoint& p : points)
        worst = std::max(worst, std::abs(finest.eval(p.x, p.y) - f.value(p.x, p.y)));
    return factor * worst;
}

AdaptiveResult adaptive_refine(
    const BaseGrid& base, Degrees deg, const SmoothFunction& f,
    const RefinementConfig& config, const SplineBuilder& builder,
    const std::function<void(const AdaptiveResult::Iteration&, const HierSpline&)>&
        observer) {
    if (config.max_levels < 1)
        throw std::invalid_argument("adaptive_refine: max_levels must be >= 1");
    if (config.sample_points.empty())
        throw std::invalid_argument("adaptive_refine: empty sample point set");

    // The depth budget caps the number of level-adding iterations at
    // max_levels; late iterations may keep splitting coarser cells at
    // constant depth, so a generous hard cap guards termination.
    const int iteration_cap = 4 * config.max_levels;

    HierarchicalMesh mesh(base);
    std::vector<AdaptiveResult::Iteration> trace;
    for (int it = 1;; ++it) {
        auto basis = std::make_shared<const ThbBasis>(mesh, deg);
        HierSpline spline = builder(basis);
        const CellIndicator ind = cell_errors(spline, f, config.sample_points);

        AdaptiveResult::Iteration rec{it, mesh.depth(), basis->size(), ind.max_delta, 0};
        const bool pass = ind.max_delta <= config.epsilon;
        if (pass || it >= iteration_cap) {
            trace.push_back(rec);
            if (observer) observer(rec, spline);
            return {std::move(mesh), std::move(basis), std::move(spline),
                    std::move(trace), pass};
        }
        MarkResult next = mark_and_split(*basis, ind, config.epsilon, config.max_levels);
        rec.cells_split = next.cells_split;
        trace.push_back(rec);
        if (observer) observer(rec, spline);
        if (next.cells_split == 0) // every failing cell already sits at the last level
            return {std::move(mesh), std::move(basis), std::move(spline),
                    std::move(trace), false};
        mesh = std::move(next.mesh);
    }
}

} // namespace thbqi
