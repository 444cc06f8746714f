#include "thbqi/harness.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "thbqi/bspline.hpp"

namespace thbqi {

namespace {

// Coefficient vectors (in t = tanh u) of the tanh derivatives:
// d^n/du^n tanh(u) = P_n(tanh u), P_0 = t, P_{n+1} = P_n' (1 - t^2).
const std::vector<double>& tanh_deriv_poly(int n) {
    constexpr int kMaxOrder = 24;
    static const std::vector<std::vector<double>> polys = [] {
        std::vector<std::vector<double>> p;
        p.push_back({0.0, 1.0});
        for (int k = 0; k < kMaxOrder; ++k) {
            const std::vector<double>& cur = p.back();
            std::vector<double> dp(cur.size() > 1 ? cur.size() - 1 : 1, 0.0);
            for (std::size_t a = 1; a < cur.size(); ++a) dp[a - 1] = double(a) * cur[a];
            std::vector<double> next(dp.size() + 2, 0.0);
            for (std::size_t a = 0; a < dp.size(); ++a) {
                next[a] += dp[a];
                next[a + 2] -= dp[a];
            }
            p.push_back(std::move(next));
        }
        return p;
    }();
    if (n < 0 || n > kMaxOrder)
        throw std::invalid_argument("tanh derivative order out of range");
    return polys[std::size_t(n)];
}

double eval_poly(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t a = c.size(); a-- > 0;) acc = acc * t + c[a];
    return acc;
}

// Physicists' Hermite polynomial H_n(u).
double hermite_poly(int n, double u) {
    if (n == 0) return 1.0;
    double hm = 1.0, h = 2.0 * u;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * u * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    return h;
}

} // namespace

TestFunction::TestFunction(std::string name, Kind kind)
    : name_(std::move(name)), kind_(kind) {}

const TestFunction& TestFunction::f1() {
    static const TestFunction fn("f1", Kind::tanh_ridge);
    return fn;
}

const TestFunction& TestFunction::f2() {
    static const TestFunction fn("f2", Kind::gauss_bump);
    return fn;
}

const TestFunction& TestFunction::by_name(const std::string& name) {
    if (name == "f1") return f1();
    if (name == "f2") return f2();
    throw std::invalid_argument("unknown test function '" + name +
                                "' (available: f1, f2)");
}

double TestFunction::deriv(int dx, int dy, double x, double y) const {
    const int n = dx + dy;
    if (kind_ == Kind::tanh_ridge) {
        const double u = 9.0 * (y - x);
        const double t = std::tanh(u);
        if (n == 0) return (t + 1.0) / 9.0;
        // each x derivative contributes -9, each y derivative +9
        const double factor = (dx % 2 == 0 ? 1.0 : -1.0) * std::pow(9.0, n - 1);
        return factor * eval_poly(tanh_deriv_poly(n), t);
    }
    const double u = 10.0 * x - 3.0;
    const double v = 10.0 * y + 4.0;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return (2.0 / 3.0) * std::pow(10.0, n) * sign * hermite_poly(dx, u) *
           hermite_poly(dy, v) * std::exp(-u * u - v * v);
}

BivariatePolynomial::BivariatePolynomial(std::vector<std::vector<double>> coeffs)
    : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("BivariatePolynomial: no coefficients");
}

double BivariatePolynomial::deriv(int dx, int dy, double x, double y) const {
    double acc = 0.0;
    for (std::size_t a = std::size_t(dx); a < c_.size(); ++a) {
        double fa = 1.0;
        for (int k = 0; k < dx; ++k) fa *= double(a - k);
        const double xa = std::pow(x, double(a) - dx);
        for (std::size_t b = std::size_t(dy); b < c_[a].size(); ++b) {
            double fb = 1.0;
            for (int k = 0; k < dy; ++k) fb *= double(b - k);
            acc += c_[a][b] * fa * fb * xa * std::pow(y, double(b) - dy);
        }
    }
    return acc;
}

BivariatePolynomial BivariatePolynomial::random(Degrees deg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> c(std::size_t(deg.d1 + 1),
                                       std::vector<double>(std::size_t(deg.d2 + 1)));
    for (auto& row : c)
        for (double& v : row) v = dist(rng);
    return BivariatePolynomial(std::move(c));
}

namespace {

constexpr int kGridPoints = 301;

template <typename Eval>
double sup_error_impl(const Eval& approx, const SmoothFunction& f, int dx, int dy,
                      const Rect& dom) {
    double worst = 0.0;
    for (int b = 0; b < kGridPoints; ++b) {
        const double y = dom.y0 + dom.height() * b / double(kGridPoints - 1);
        for (int a = 0; a < kGridPoints; ++a) {
            const double x = dom.x0 + dom.width() * a / double(kGridPoints - 1);
            worst = std::max(worst, std::abs(approx(x, y) - f.deriv(dx, dy, x, y)));
        }
    }
    return worst;
}

} // namespace

double sup_error(const TensorSpline& spline, const SmoothFunction& f, int dx, int dy) {
    return sup_error_impl(
        [&](double x, double y) { return spline.eval(x, y, dx, dy); }, f, dx, dy,
        spline.grid.base.domain);
}

double sup_error(const HierSpline& spline, const SmoothFunction& f, int dx, int dy) {
    return sup_error_impl(
        [&](double x, double y) { return spline.eval(x, y, dx, dy); }, f, dx, dy,
        spline.basis().mesh().base().domain);
}

double AnalyticCollocationSource::value_at(int level, int ic, int jc) {
    const UniformGrid g{grid_, level};
    const double x = grid_.domain.x0 + double(ic) * g.step_x() / deg_.d1;
    const double y = grid_.domain.y0 + double(jc) * g.step_y() / deg_.d2;
    return fn_.value(x, y);
}

namespace {

std::uint64_t pack_query(int level, int tag, int i, int j) {
    return (std::uint64_t(level) << 50) | (std::uint64_t(tag) << 48) |
           (std::uint64_t(std::uint32_t(i + (1 << 20))) << 24) |
           std::uint64_t(std::uint32_t(j + (1 << 20)));
}

} // namespace

double CountingCollocationSource::value_at(int level, int ic, int jc) {
    seen_.insert(pack_query(level, 0, ic, jc));
    return inner_.value_at(level, ic, jc);
}

double CountingValueSource::value_at(int level, int i, int j) {
    seen_.insert(pack_query(level, 0, i, j));
    return inner_.value_at(level, i, j);
}

namespace {

// The local interpolation system is translation invariant: rows are the
// (d1+1)(d2+1) collocation points of the central cell, columns the B-splines
// meeting that cell.
struct CollocationSystem {
    Degrees deg;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    int sol_index; // position of the coefficient the operator keeps
};

CollocationSystem make_collocation_system(Degrees deg) {
    const int n1 = deg.d1 + 1, n2 = deg.d2 + 1;
    Eigen::MatrixXd A(n1 * n2, n1 * n2);
    for (int r2 = 0; r2 < n2; ++r2)
        for (int r1 = 0; r1 < n1; ++r1)
            for (int c2 = 0; c2 < n2; ++c2)
                for (int c1 = 0; c1 < n1; ++c1)
                    A(r2 * n1 + r1, c2 * n1 + c1) =
                        bspline_eval(deg.d1, deg.d1 - c1 + double(r1) / deg.d1) *
                        bspline_eval(deg.d2, deg.d2 - c2 + double(r2) / deg.d2);
    Eigen::FullPivLU<Eigen::MatrixXd> full(A);
    if (!full.isInvertible())
        throw std::runtime_error("collocation system is numerically singular");
    const int c1 = deg.d1 - deg.d1 / 2;
    const int c2 = deg.d2 - deg.d2 / 2;
    return {deg, Eigen::PartialPivLU<Eigen::MatrixXd>(A), c2 * n1 + c1};
}

double solve_collocation_coeff(const CollocationSystem& sys, CollocationSource& source,
                               int level, int j, int i) {
    const Degrees deg = sys.deg;
    const int n1 = deg.d1 + 1, n2 = deg.d2 + 1;
    const int bi = i + deg.d1 / 2, bj = j + deg.d2 / 2;
    Eigen::VectorXd rhs(n1 * n2);
    for (int r2 = 0; r2 < n2; ++r2)
        for (int r1 = 0; r1 < n1; ++r1)
            rhs(r2 * n1 + r1) = source.value_at(level, bi * deg.d1 + r1, bj * deg.d2 + r2);
    const Eigen::VectorXd sol = sys.lu.solve(rhs);
    return sol(sys.sol_index);
}

} // namespace

TensorSpline comparison_qi(CollocationSource& source, BaseGrid grid, Degrees deg,
                           int level) {
    const UniformGrid g{grid, level};
    const GammaRange gamma = gamma_range(deg, g);
    const CollocationSystem sys = make_collocation_system(deg);
    TensorSpline spline{deg, g, OffsetGrid(gamma.j_lo, gamma.j_hi, gamma.i_lo, gamma.i_hi)};
    for (int j = gamma.j_lo; j <= gamma.j_hi; ++j)
        for (int i = gamma.i_lo; i <= gamma.i_hi; ++i)
            spline.coeffs.at(j, i) = solve_collocation_coeff(sys, source, level, j, i);
    return spline;
}

HierSpline comparison_qi_hier(std::shared_ptr<const ThbBasis> basis,
                              CollocationSource& source) {
    const ThbBasis& b = *basis;
    const CollocationSystem sys = make_collocation_system(b.degrees());
    std::vector<double> lambda;
    lambda.reserve(b.size());
    for (int l = 0; l < b.depth(); ++l)
        for (const GridIndex& J : b.active(l))
            lambda.push_back(solve_collocation_coeff(sys, source, l, J.j, J.i));
    return HierSpline(std::move(basis), std::move(lambda));
}

std::size_t tensor_eval_count(Degrees deg, const UniformGrid& grid) {
    return 4u * std::size_t(grid.cells_x() + 2 * deg.d1 - 1) *
           std::size_t(grid.cells_y() + 2 * deg.d2 - 1);
}

std::size_t collocation_eval_count(Degrees deg, const UniformGrid& grid) {
    return std::size_t(deg.d1 * (grid.cells_x() + deg.d1) + 1) *
           std::size_t(deg.d2 * (grid.cells_y() + deg.d2) + 1);
}

// ---------------------------------------------------------------------------

bool ExperimentConfig::is_hierarchical() const {
    return qi == "hier" || qi == "that-hier" || qi == "fd-hier";
}

void ExperimentConfig::validate() const {
    if (function != "f1" && function != "f2")
        throw std::invalid_argument("config field 'function': must be f1 or f2, got '" +
                                    function + "'");
    if (degrees.d1 < 2 || degrees.d1 > 4 || degrees.d2 < 2 || degrees.d2 > 4)
        throw std::invalid_argument("config field 'degrees': components must be in {2,3,4}");
    if (levels < 1)
        throw std::invalid_argument("config field 'levels': must be >= 1");
    static const char* kinds[] = {"tensor", "that", "fd", "hier", "that-hier", "fd-hier"};
    if (std::find_if(std::begin(kinds), std::end(kinds),
                     [&](const char* k) { return qi == k; }) == std::end(kinds))
        throw std::invalid_argument(
            "config field 'qi': must be one of tensor, that, fd, hier, that-hier, fd-hier");
    if ((qi == "fd" || qi == "fd-hier") &&
        (fd_order1 < degrees.d1 || fd_order2 < degrees.d2))
        throw std::invalid_argument(
            "config field 'fd-order': orders must be at least the degrees");
    if (!(eps_factor > 0.0))
        throw std::invalid_argument("config field 'eps-factor': must be positive");
    if (base.n1 < 1 || base.n2 < 1)
        throw std::invalid_argument("config field 'base': cell counts must be positive");
}

namespace {

std::size_t tensor_dim(const BaseGrid& base, Degrees deg, int levels) {
    const UniformGrid g{base, levels - 1};
    return std::size_t(g.cells_x() + deg.d1) * std::size_t(g.cells_y() + deg.d2);
}

TensorSpline build_tensor_operator(const ExperimentConfig& cfg, const TestFunction& f,
                                   int level, std::size_t* evals) {
    const Degrees deg = cfg.degrees;
    const UniformGrid g{cfg.base, level};
    if (cfg.qi == "that" || cfg.qi == "that-hier") {
        AnalyticCollocationSource src(f, cfg.base, deg);
        CountingCollocationSource counter(src);
        TensorSpline s = comparison_qi(counter, cfg.base, deg, level);
        if (evals) *evals = counter.distinct_queries();
        return s;
    }
    if (cfg.qi == "fd" || cfg.qi == "fd-hier") {
        AnalyticValueSource src(f, cfg.base);
        CountingValueSource counter(src);
        FdHermiteProvider fd(counter, cfg.base, deg, cfg.fd_order1, cfg.fd_order2);
        TensorSpline s = tensor_qi(materialize_hermite(fd, deg, g));
        if (evals) *evals = counter.distinct_queries();
        return s;
    }
    AnalyticHermiteProvider provider(f, cfg.base);
    CountingHermiteProvider counter(provider);
    TensorSpline s = tensor_qi(materialize_hermite(counter, deg, g));
    if (evals) *evals = counter.distinct_queries();
    return s;
}

ErrorReport make_report(int levels, const BaseGrid& base, Degrees deg,
                        std::size_t dim_hier, double e, double ex, double ey,
                        double exy, std::size_t evals) {
    const UniformGrid g{base, levels - 1};
    return {levels, g.step_x(), tensor_dim(base, deg, levels), dim_hier,
            e,      ex,         ey,                            exy, evals};
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const TestFunction& f = TestFunction::by_name(config.function);
    const Degrees deg = config.degrees;
    ExperimentResult result;
    result.adaptive = config.is_hierarchical();

    if (!result.adaptive) {
        for (int m = 1; m <= config.levels; ++m) {
            std::size_t evals = 0;
            const TensorSpline s = build_tensor_operator(config, f, m - 1, &evals);
            result.rows.push_back(make_report(
                m, config.base, deg, s.dim(), sup_error(s, f, 0, 0),
                sup_error(s, f, 1, 0), sup_error(s, f, 0, 1), sup_error(s, f, 1, 1),
                evals));
        }
    } else {
        const TensorSpline finest =
            build_tensor_operator(config, f, config.levels - 1, nullptr);
        RefinementConfig rc;
        rc.max_levels = config.levels;
        rc.eps_factor = config.eps_factor;
        rc.sample_points = default_sample_points(config.base, config.levels);
        rc.epsilon = epsilon_from_tensor(finest, f, rc.sample_points, config.eps_factor);
        result.epsilon = rc.epsilon;

        AnalyticHermiteProvider hermite(f, config.base);
        CountingHermiteProvider hermite_count(hermite);
        AnalyticCollocationSource colloc(f, config.base, deg);
        CountingCollocationSource colloc_count(colloc);
        AnalyticValueSource values(f, config.base);
        CountingValueSource values_count(values);
        std::optional<FdHermiteProvider> fd;
        if (config.qi == "fd-hier")
            fd.emplace(values_count, config.base, deg, config.fd_order1, config.fd_order2);

        SplineBuilder builder;
        std::function<std::size_t()> current_count;
        if (config.qi == "that-hier") {
            builder = [&](std::shared_ptr<const ThbBasis> basis) {
                colloc_count.reset();
                return comparison_qi_hier(std::move(basis), colloc_count);
            };
            current_count = [&] { return colloc_count.distinct_queries(); };
        } else if (config.qi == "fd-hier") {
            builder = [&](std::shared_ptr<const ThbBasis> basis) {
                values_count.reset();
                return hierarchical_qi(std::move(basis), *fd);
            };
            current_count = [&] { return values_count.distinct_queries(); };
        } else {
            builder = [&](std::shared_ptr<const ThbBasis> basis) {
                hermite_count.reset();
                return hierarchical_qi(std::move(basis), hermite_count);
            };
            current_count = [&] { return hermite_count.distinct_queries(); };
        }

        // one table row per level: a same-depth re-iteration replaces its row
        auto observer = [&](const AdaptiveResult::Iteration& rec, const HierSpline& s) {
            ErrorReport row = make_report(
                rec.levels, config.base, deg, rec.dim, sup_error(s, f, 0, 0),
                sup_error(s, f, 1, 0), sup_error(s, f, 0, 1), sup_error(s, f, 1, 1),
                current_count());
            if (!result.rows.empty() && result.rows.back().levels == rec.levels)
                result.rows.back() = row;
            else
                result.rows.push_back(row);
        };
        AdaptiveResult run =
            adaptive_refine(config.base, deg, f, rc, builder, observer);
        result.trace = std::move(run.trace);
        result.by_tolerance = run.by_tolerance;
        result.final_mesh = std::make_unique<HierarchicalMesh>(std::move(run.mesh));
    }

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.out_dir);
        const fs::path dir(config.out_dir);
        {
            std::ofstream csv(dir / "table.csv");
            write_table_csv(csv, result.rows);
            std::ofstream txt(dir / "table.txt");
            write_table_text(txt, result.rows);
        }
        if (result.adaptive) {
            std::ofstream trace(dir / "trace.csv");
            write_trace_csv(trace, result.trace);
            export_mesh_text(*result.final_mesh, (dir / "mesh_final.txt").string());
            export_mesh_svg(*result.final_mesh, (dir / "mesh_final.svg").string());
        }
    }
    return result;
}

void write_table_csv(std::ostream& out, const std::vector<ErrorReport>& rows) {
    out << "M,h_finest,dim_tensor,dim_hier,err_sup,err_x,err_y,err_xy,evals\n";
    char buf[224];
    for (const ErrorReport& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.3e,%zu,%zu,%.3e,%.3e,%.3e,%.3e,%zu\n",
                      r.levels, r.h_finest, r.dim_tensor, r.dim_hier, r.err, r.err_x,
                      r.err_y, r.err_xy, r.evals);
        out << buf;
    }
}

void write_table_text(std::ostream& out, const std::vector<ErrorReport>& rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%3s %11s %10s %9s %10s %10s %10s %10s %9s\n", "M",
                  "h_finest", "dim_tensor", "dim_hier", "err_sup", "err_x", "err_y",
                  "err_xy", "evals");
    out << buf;
    for (const ErrorReport& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%3d %11.3e %10zu %9zu %10.3e %10.3e %10.3e %10.3e %9zu\n",
                      r.levels, r.h_finest, r.dim_tensor, r.dim_hier, r.err, r.err_x,
                      r.err_y, r.err_xy, r.evals);
        out << buf;
    }
}

void write_trace_csv(std::ostream& out,
                     const std::vector<AdaptiveResult::Iteration>& trace) {
    out << "iteration,levels,dim_hier,max_delta,cells_split\n";
    char buf[160];
    for (const auto& t : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%zu,%.3e,%zu\n", t.index, t.levels,
                      t.dim, t.max_delta, t.cells_split);
        out << buf;
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

bool looks_integer(const std::string& s) {
    return s.find_first_of(".eE") == std::string::npos;
}

} // namespace

bool compare_tables(std::istream& produced, std::istream& expected,
                    const std::map<std::string, double>& column_tol,
                    double default_tol, std::ostream& log) {
    std::string pline, eline;
    if (!std::getline(produced, pline) || !std::getline(expected, eline)) {
        log << "missing header line\n";
        return false;
    }
    const std::vector<std::string> header = split_csv_line(pline);
    if (header != split_csv_line(eline)) {
        log << "header mismatch\n";
        return false;
    }

    bool ok = true;
    int row = 0;
    while (true) {
        const bool hp = bool(std::getline(produced, pline));
        const bool he = bool(std::getline(expected, eline));
        if (hp != he) {
            log << "row count mismatch\n";
            return false;
        }
        if (!hp) break;
        ++row;
        const auto pv = split_csv_line(pline);
        const auto ev = split_csv_line(eline);
        if (pv.size() != header.size() || ev.size() != header.size()) {
            log << "row " << row << ": column count mismatch\n";
            ok = false;
            continue;
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            const double a = std::stod(pv[c]);
            const double b = std::stod(ev[c]);
            double tol = default_tol;
            if (auto it = column_tol.find(header[c]); it != column_tol.end())
                tol = it->second;
            bool cell_ok;
            if (looks_integer(pv[c]) && looks_integer(ev[c]))
                cell_ok = (a == b);
            else
                cell_ok = std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
            if (!cell_ok) {
                log << "row " << row << ", column '" << header[c] << "': " << pv[c]
                    << " vs " << ev[c] << "\n";
                ok = false;
            }
        }
    }
    return ok;
}

void export_mesh_text(const HierarchicalMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    mesh.save_text(out);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

HierarchicalMesh import_mesh_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return HierarchicalMesh::load_text(in);
}

void export_mesh_svg(const HierarchicalMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

    const Rect dom = mesh.base().domain;
    const double margin = 10.0;
    const double scale = 800.0 / std::max(dom.width(), dom.height());
    const double w = dom.width() * scale + 2 * margin;
    const double h = dom.height() * scale + 2 * margin;

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.1f %.1f\">\n",
                  w, h);
    out << buf;
    for (int level = 0; level < mesh.depth(); ++level) {
        const double stroke = std::max(0.25, 2.0 / double(1 << level));
        for (const CellId& c : mesh.active_cells(level)) {
            const Rect r = mesh.cell_rect(c);
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                          "fill=\"none\" stroke=\"black\" stroke-width=\"%.3f\"/>\n",
                          margin + (r.x0 - dom.x0) * scale,
                          margin + (dom.y1 - r.y1) * scale, r.width() * scale,
                          r.height() * scale, stroke);
            out << buf;
        }
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace thbqi
