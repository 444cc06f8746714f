#include "thbqi/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "thbqi/bspline.hpp"

namespace thbqi {

namespace {

int clampi(int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); }

} // namespace

std::size_t HierarchicalMesh::Mask::count() const {
    return std::size_t(std::count(bits.begin(), bits.end(), std::uint8_t(1)));
}

HierarchicalMesh::HierarchicalMesh(BaseGrid base) : base_(base), omega_(1) {
    if (base_.n1 < 1 || base_.n2 < 1)
        throw std::invalid_argument("HierarchicalMesh: base grid needs positive cell counts");
    if (base_.domain.width() <= 0.0 || base_.domain.height() <= 0.0)
        throw std::invalid_argument("HierarchicalMesh: degenerate domain");
}

bool HierarchicalMesh::cell_in_domain(int level, int i, int j) const {
    if (level == 0) return true;
    if (level >= depth()) return false;
    return omega_[level].get(i >> 1, j >> 1);
}

bool HierarchicalMesh::cell_subdivided(int level, int i, int j) const {
    if (level + 1 >= depth()) return false;
    return omega_[level + 1].get(i, j);
}

bool HierarchicalMesh::cell_active(int level, int i, int j) const {
    return cell_in_domain(level, i, j) && !cell_subdivided(level, i, j);
}

bool HierarchicalMesh::region_in_domain(int level, int i0, int i1, int j0, int j1) const {
    if (level == 0) return true;
    if (level >= depth()) return false;
    const UniformGrid g = level_grid(level);
    i0 = clampi(i0, 0, g.cells_x() - 1);
    i1 = clampi(i1, 0, g.cells_x() - 1);
    j0 = clampi(j0, 0, g.cells_y() - 1);
    j1 = clampi(j1, 0, g.cells_y() - 1);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (!omega_[level].get(i >> 1, j >> 1)) return false;
    return true;
}

bool HierarchicalMesh::region_in_next(int level, int i0, int i1, int j0, int j1) const {
    if (level + 1 >= depth()) return false;
    const UniformGrid g = level_grid(level);
    i0 = clampi(i0, 0, g.cells_x() - 1);
    i1 = clampi(i1, 0, g.cells_x() - 1);
    j0 = clampi(j0, 0, g.cells_y() - 1);
    j1 = clampi(j1, 0, g.cells_y() - 1);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (!omega_[level + 1].get(i, j)) return false;
    return true;
}

bool HierarchicalMesh::region_intersects_next(int level, int i0, int i1, int j0,
                                              int j1) const {
    if (level + 1 >= depth()) return false;
    const UniformGrid g = level_grid(level);
    i0 = clampi(i0, 0, g.cells_x() - 1);
    i1 = clampi(i1, 0, g.cells_x() - 1);
    j0 = clampi(j0, 0, g.cells_y() - 1);
    j1 = clampi(j1, 0, g.cells_y() - 1);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
            if (omega_[level + 1].get(i, j)) return true;
    return false;
}

void HierarchicalMesh::subdivide(CellId c) {
    const UniformGrid g = level_grid(c.level);
    if (c.ix < 0 || c.ix >= g.cells_x() || c.iy < 0 || c.iy >= g.cells_y())
        throw std::out_of_range("subdivide: cell index outside the level grid");
    if (!cell_in_domain(c.level, c.ix, c.iy))
        throw std::invalid_argument("subdivide: cell not contained in its level domain");
    if (depth() <= c.level + 1) {
        omega_.resize(std::size_t(c.level) + 2);
    }
    Mask& m = omega_[c.level + 1];
    if (m.bits.empty()) {
        m.nx = g.cells_x();
        m.ny = g.cells_y();
        m.bits.assign(std::size_t(m.nx) * m.ny, 0);
    }
    m.set(c.ix, c.iy);
}

std::vector<CellId> HierarchicalMesh::active_cells(int level) const {
    std::vector<CellId> out;
    const UniformGrid g = level_grid(level);
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i)
            if (cell_active(level, i, j)) out.push_back({level, i, j});
    return out;
}

std::vector<CellId> HierarchicalMesh::all_active_cells() const {
    std::vector<CellId> out;
    for (int l = 0; l < depth(); ++l) {
        auto lv = active_cells(l);
        out.insert(out.end(), lv.begin(), lv.end());
    }
    return out;
}

HierarchicalMesh::Covering HierarchicalMesh::covering_active_cell(CellId pos) const {
    if (cell_subdivided(pos.level, pos.ix, pos.iy)) return {};
    for (int q = std::min(pos.level, depth() - 1); q >= 0; --q) {
        const int shift = pos.level - q;
        const CellId anc{q, pos.ix >> shift, pos.iy >> shift};
        if (cell_active(anc)) return {true, anc};
    }
    return {};
}

CellId HierarchicalMesh::active_cell_at(double x, double y) const {
    const Rect& dom = base_.domain;
    if (!dom.contains(x, y))
        throw std::domain_error("active_cell_at: point (" + std::to_string(x) + ", " +
                                std::to_string(y) + ") outside the domain");
    int level = 0;
    UniformGrid g = level_grid(0);
    int i = clampi(int(std::floor((x - dom.x0) / g.step_x())), 0, g.cells_x() - 1);
    int j = clampi(int(std::floor((y - dom.y0) / g.step_y())), 0, g.cells_y() - 1);
    while (cell_subdivided(level, i, j)) {
        ++level;
        g = level_grid(level);
        i = clampi(int(std::floor((x - dom.x0) / g.step_x())), 2 * i, 2 * i + 1);
        j = clampi(int(std::floor((y - dom.y0) / g.step_y())), 2 * j, 2 * j + 1);
    }
    return {level, i, j};
}

std::size_t HierarchicalMesh::domain_cell_count(int level) const {
    if (level < 1 || level >= depth())
        throw std::out_of_range("domain_cell_count: level outside [1, depth)");
    return omega_[level].count();
}

bool HierarchicalMesh::operator==(const HierarchicalMesh& other) const {
    if (!(base_ == other.base_) || depth() != other.depth()) return false;
    for (int l = 1; l < depth(); ++l) {
        const Mask& a = omega_[l];
        const Mask& b = other.omega_[l];
        const std::size_t na = a.bits.empty() ? 0 : a.count();
        const std::size_t nb = b.bits.empty() ? 0 : b.count();
        if (na != nb) return false;
        if (!a.bits.empty() && !b.bits.empty() && a.bits != b.bits) return false;
    }
    return true;
}

void HierarchicalMesh::save_text(std::ostream& out) const {
    out.precision(17);
    out << "thbqi-mesh 1\n";
    out << "domain " << base_.domain.x0 << ' ' << base_.domain.y0 << ' '
        << base_.domain.x1 << ' ' << base_.domain.y1 << '\n';
    out << "base " << base_.n1 << ' ' << base_.n2 << '\n';
    out << "depth " << depth() << '\n';
    for (int l = 1; l < depth(); ++l) {
        const Mask& m = omega_[l];
        out << "level " << l << ' ' << (m.bits.empty() ? 0 : m.count()) << '\n';
        if (m.bits.empty()) continue;
        for (int j = 0; j < m.ny; ++j)
            for (int i = 0; i < m.nx; ++i)
                if (m.get(i, j)) out << i << ' ' << j << '\n';
    }
}

HierarchicalMesh HierarchicalMesh::load_text(std::istream& in) {
    auto expect = [&](const std::string& token) {
        std::string got;
        if (!(in >> got) || got != token)
            throw std::runtime_error("mesh file: expected '" + token + "', got '" + got + "'");
    };
    expect("thbqi-mesh");
    int version = 0;
    in >> version;
    if (version != 1) throw std::runtime_error("mesh file: unsupported version");

    BaseGrid base;
    expect("domain");
    in >> base.domain.x0 >> base.domain.y0 >> base.domain.x1 >> base.domain.y1;
    expect("base");
    in >> base.n1 >> base.n2;
    expect("depth");
    int depth = 0;
    in >> depth;
    if (!in || depth < 1) throw std::runtime_error("mesh file: bad header");

    HierarchicalMesh mesh(base);
    for (int l = 1; l < depth; ++l) {
        expect("level");
        int lvl = 0;
        std::size_t count = 0;
        in >> lvl >> count;
        if (!in || lvl != l) throw std::runtime_error("mesh file: level records out of order");
        for (std::size_t k = 0; k < count; ++k) {
            int i = 0, j = 0;
            in >> i >> j;
            if (!in) throw std::runtime_error("mesh file: truncated cell list");
            mesh.subdivide({l - 1, i, j});
        }
    }
    return mesh;
}

namespace {

// Surviving level-by-level representations of a truncated basis function.
// Maps are trimmed: terms that stopped meeting the next finer domain are not
// refined further (they are zero on all deeper active cells).
std::vector<std::vector<ThbFunction::Term>> build_reps(const HierarchicalMesh& mesh,
                                                       Degrees deg, int level,
                                                       int i, int j) {
    const int d1 = deg.d1, d2 = deg.d2;
    const std::vector<double> cx = subdivision_coeffs(d1);
    const std::vector<double> cy = subdivision_coeffs(d2);

    std::vector<std::vector<ThbFunction::Term>> reps;
    reps.push_back({{i, j, 1.0}});
    for (int q = level; q + 1 < mesh.depth(); ++q) {
        const UniformGrid fine = mesh.level_grid(q + 1);
        std::map<std::pair<int, int>, double> next; // key (j, i)
        for (const ThbFunction::Term& t : reps.back()) {
            if (!mesh.region_intersects_next(q, t.i, t.i + d1, t.j, t.j + d2))
                continue;
            for (int s = 0; s <= d2 + 1; ++s) {
                const int cj = 2 * t.j + s;
                if (cj < -d2 || cj > fine.cells_y() - 1) continue;
                for (int r = 0; r <= d1 + 1; ++r) {
                    const int ci = 2 * t.i + r;
                    if (ci < -d1 || ci > fine.cells_x() - 1) continue;
                    if (mesh.region_in_domain(q + 1, ci, ci + d1, cj, cj + d2))
                        continue; // truncated away
                    next[{cj, ci}] += t.w * cx[r] * cy[s];
                }
            }
        }
        std::vector<ThbFunction::Term> flat;
        flat.reserve(next.size());
        for (const auto& [key, w] : next) flat.push_back({key.second, key.first, w});
        reps.push_back(std::move(flat));
    }
    return reps;
}

bool index_active(const HierarchicalMesh& mesh, Degrees deg, int level, int i, int j) {
    return mesh.region_in_domain(level, i, i + deg.d1, j, j + deg.d2) &&
           !mesh.region_in_next(level, i, i + deg.d1, j, j + deg.d2);
}

} // namespace

ThbFunction build_thb(const HierarchicalMesh& mesh, Degrees deg, int level, int i,
                      int j) {
    const UniformGrid lg = mesh.level_grid(level);
    const bool in_range = i >= -deg.d1 && i <= lg.cells_x() - 1 && j >= -deg.d2 &&
                          j <= lg.cells_y() - 1;
    if (!in_range || !index_active(mesh, deg, level, i, j))
        throw std::invalid_argument("build_thb: index (" + std::to_string(j) + "," +
                                    std::to_string(i) + ") not active at level " +
                                    std::to_string(level));
    ThbFunction fn;
    fn.level = level;
    fn.i = i;
    fn.j = j;
    fn.reps = build_reps(mesh, deg, level, i, j);

    bool first = true;
    for (int q = level; q < mesh.depth(); ++q) {
        const UniformGrid lg = mesh.level_grid(q);
        for (const ThbFunction::Term& t : fn.reps[q - level]) {
            const int i0 = clampi(t.i, 0, lg.cells_x() - 1);
            const int i1 = clampi(t.i + deg.d1, 0, lg.cells_x() - 1);
            const int j0 = clampi(t.j, 0, lg.cells_y() - 1);
            const int j1 = clampi(t.j + deg.d2, 0, lg.cells_y() - 1);
            for (int jj = j0; jj <= j1; ++jj)
                for (int ii = i0; ii <= i1; ++ii)
                    if (mesh.cell_active(q, ii, jj)) {
                        const Rect r = lg.cell_rect(ii, jj);
                        fn.support = first ? r : fn.support.united(r);
                        first = false;
                    }
        }
    }
    return fn;
}

void truncate(const HierarchicalMesh& mesh, Degrees deg, int level,
              OffsetGrid& coeffs) {
    for (int j = coeffs.row_lo(); j <= coeffs.row_hi(); ++j)
        for (int i = coeffs.col_lo(); i <= coeffs.col_hi(); ++i)
            if (mesh.region_in_domain(level + 1, i, i + deg.d1, j, j + deg.d2))
                coeffs.at(j, i) = 0.0;
}

ThbBasis::ThbBasis(const HierarchicalMesh& mesh, Degrees deg)
    : mesh_(mesh), deg_(deg) {
    // active cells with ordinals
    cell_ordinal_.resize(std::size_t(mesh_.depth()));
    for (int l = 0; l < mesh_.depth(); ++l) {
        const UniformGrid g = mesh_.level_grid(l);
        cell_ordinal_[l].assign(std::size_t(g.cells_x()) * g.cells_y(), -1);
        for (int j = 0; j < g.cells_y(); ++j)
            for (int i = 0; i < g.cells_x(); ++i)
                if (mesh_.cell_active(l, i, j)) {
                    cell_ordinal_[l][std::size_t(j) * g.cells_x() + i] =
                        int(cells_.size());
                    cells_.push_back({l, i, j});
                }
    }
    build_active_sets();
    build_functions();
    register_on_cells();
}

void ThbBasis::build_active_sets() {
    active_.resize(std::size_t(mesh_.depth()));
    for (int l = 0; l < mesh_.depth(); ++l) {
        const UniformGrid g = mesh_.level_grid(l);
        for (int j = -deg_.d2; j <= g.cells_y() - 1; ++j)
            for (int i = -deg_.d1; i <= g.cells_x() - 1; ++i)
                if (index_active(mesh_, deg_, l, i, j)) active_[l].push_back({i, j});
    }
}

void ThbBasis::build_functions() {
    for (int l = 0; l < mesh_.depth(); ++l) {
        for (const GridIndex& J : active_[l]) {
            ThbFunction fn;
            fn.level = l;
            fn.i = J.i;
            fn.j = J.j;
            fn.reps = build_reps(mesh_, deg_, l, J.i, J.j);
            functions_.push_back(std::move(fn));
        }
    }
}

void ThbBasis::register_on_cells() {
    std::vector<std::vector<std::uint32_t>> lists(cells_.size());
    std::vector<std::uint32_t> stamp(cells_.size(),
                                     std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t g = 0; g < functions_.size(); ++g) {
        ThbFunction& fn = functions_[g];
        bool first = true;
        for (int q = fn.level; q < mesh_.depth(); ++q) {
            const UniformGrid lg = mesh_.level_grid(q);
            const std::vector<int>& ords = cell_ordinal_[q];
            for (const ThbFunction::Term& t : fn.reps[q - fn.level]) {
                const int i0 = clampi(t.i, 0, lg.cells_x() - 1);
                const int i1 = clampi(t.i + deg_.d1, 0, lg.cells_x() - 1);
                const int j0 = clampi(t.j, 0, lg.cells_y() - 1);
                const int j1 = clampi(t.j + deg_.d2, 0, lg.cells_y() - 1);
                for (int jj = j0; jj <= j1; ++jj)
                    for (int ii = i0; ii <= i1; ++ii) {
                        const int ord = ords[std::size_t(jj) * lg.cells_x() + ii];
                        if (ord < 0 || stamp[ord] == g) continue;
                        stamp[ord] = g;
                        lists[ord].push_back(g);
                        const Rect r = lg.cell_rect(ii, jj);
                        fn.support = first ? r : fn.support.united(r);
                        first = false;
                    }
            }
        }
    }

    cell_funcs_begin_.assign(cells_.size() + 1, 0);
    std::size_t total = 0;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        cell_funcs_begin_[c] = total;
        total += lists[c].size();
    }
    cell_funcs_begin_[cells_.size()] = total;
    cell_funcs_.reserve(total);
    for (const auto& lst : lists)
        cell_funcs_.insert(cell_funcs_.end(), lst.begin(), lst.end());

    admissibility_ = 1;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        int min_level = cells_[c].level;
        for (std::uint32_t g : functions_on_cell(int(c)))
            min_level = std::min(min_level, functions_[g].level);
        admissibility_ = std::max(admissibility_, cells_[c].level - min_level + 1);
    }
}

int ThbBasis::cell_ordinal(CellId c) const {
    if (c.level < 0 || c.level >= mesh_.depth()) return -1;
    const UniformGrid g = mesh_.level_grid(c.level);
    if (c.ix < 0 || c.ix >= g.cells_x() || c.iy < 0 || c.iy >= g.cells_y()) return -1;
    return cell_ordinal_[c.level][std::size_t(c.iy) * g.cells_x() + c.ix];
}

int ThbBasis::cell_ordinal_at(double x, double y) const {
    return cell_ordinal(mesh_.active_cell_at(x, y));
}

std::span<const std::uint32_t> ThbBasis::functions_on_cell(int cell_ordinal) const {
    return {cell_funcs_.data() + cell_funcs_begin_[cell_ordinal],
            cell_funcs_.data() + cell_funcs_begin_[cell_ordinal + 1]};
}

double ThbBasis::eval_function(std::size_t g, double x, double y, int dx,
                               int dy) const {
    const ThbFunction& fn = functions_[g];
    const CellId c = mesh_.active_cell_at(x, y);
    if (c.level < fn.level) return 0.0;

    const UniformGrid lg = mesh_.level_grid(c.level);
    const double u = (x - lg.base.domain.x0) / lg.step_x();
    const double v = (y - lg.base.domain.y0) / lg.step_y();
    const double sx = std::pow(1.0 / lg.step_x(), dx);
    const double sy = std::pow(1.0 / lg.step_y(), dy);

    double acc = 0.0;
    for (const ThbFunction::Term& t : fn.reps[c.level - fn.level]) {
        if (t.i < c.ix - deg_.d1 || t.i > c.ix || t.j < c.iy - deg_.d2 || t.j > c.iy)
            continue;
        acc += t.w * bspline_deriv(deg_.d1, u - t.i, dx) *
               bspline_deriv(deg_.d2, v - t.j, dy);
    }
    return acc * sx * sy;
}

std::vector<std::vector<GridIndex>> local_active_set(const ThbBasis& basis, CellId c) {
    const int ord = basis.cell_ordinal(c);
    if (ord < 0)
        throw std::invalid_argument("local_active_set: cell is not active");
    std::vector<std::vector<GridIndex>> per_level(std::size_t(basis.depth()));
    for (std::uint32_t g : basis.functions_on_cell(ord)) {
        const ThbFunction& fn = basis.function(g);
        per_level[fn.level].push_back({fn.i, fn.j});
    }
    return per_level;
}

} // namespace thbqi
