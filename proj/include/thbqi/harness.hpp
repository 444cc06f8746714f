#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "thbqi/refine.hpp"

namespace thbqi {

/// The two built-in targets on [-1,1]^2: a diagonal tanh ridge and a narrow
/// Gaussian bump centered near (0.3, -0.4). Mixed derivatives of any order
/// are produced from the chain-rule recurrences of tanh and exp(-u^2), so
/// the high-order norms needed by the error-bound checks are exact.
class TestFunction : public SmoothFunction {
public:
    static const TestFunction& f1();
    static const TestFunction& f2();
    static const TestFunction& by_name(const std::string& name);

    const std::string& name() const { return name_; }
    Rect domain() const { return {-1.0, -1.0, 1.0, 1.0}; }
    double deriv(int dx, int dy, double x, double y) const override;

private:
    enum class Kind { tanh_ridge, gauss_bump };
    TestFunction(std::string name, Kind kind);

    std::string name_;
    Kind kind_;
};

/// Dense polynomial sum c[a][b] x^a y^b; exact mixed derivatives.
class BivariatePolynomial : public SmoothFunction {
public:
    explicit BivariatePolynomial(std::vector<std::vector<double>> coeffs);
    double deriv(int dx, int dy, double x, double y) const override;
    /// coefficients uniform in [-1, 1], degree (deg.d1, deg.d2)
    static BivariatePolynomial random(Degrees deg, std::uint64_t seed);

private:
    std::vector<std::vector<double>> c_; // c_[a][b] multiplies x^a y^b
};

/// Maximum of |d^(dx,dy)(approx - f)| over the fixed 301x301 evaluation grid
/// of the domain (both boundaries included).
double sup_error(const TensorSpline& spline, const SmoothFunction& f, int dx = 0,
                 int dy = 0);
double sup_error(const HierSpline& spline, const SmoothFunction& f, int dx = 0,
                 int dy = 0);

/// f values at the collocation lattice of a level: node (ic, jc) sits at
/// (x0 + ic*h_{x,level}/d1, y0 + jc*h_{y,level}/d2).
class CollocationSource {
public:
    virtual ~CollocationSource() = default;
    virtual double value_at(int level, int ic, int jc) = 0;
};

class AnalyticCollocationSource : public CollocationSource {
public:
    AnalyticCollocationSource(const SmoothFunction& fn, BaseGrid grid, Degrees deg)
        : fn_(fn), grid_(grid), deg_(deg) {}
    double value_at(int level, int ic, int jc) override;

private:
    const SmoothFunction& fn_;
    BaseGrid grid_;
    Degrees deg_;
};

class CountingCollocationSource : public CollocationSource {
public:
    explicit CountingCollocationSource(CollocationSource& inner) : inner_(inner) {}
    double value_at(int level, int ic, int jc) override;
    std::size_t distinct_queries() const { return seen_.size(); }
    void reset() { seen_.clear(); }

private:
    CollocationSource& inner_;
    std::unordered_set<std::uint64_t> seen_;
};

class CountingValueSource : public LevelValueSource {
public:
    explicit CountingValueSource(LevelValueSource& inner) : inner_(inner) {}
    double value_at(int level, int i, int j) override;
    std::size_t distinct_queries() const { return seen_.size(); }
    void reset() { seen_.clear(); }

private:
    LevelValueSource& inner_;
    std::unordered_set<std::uint64_t> seen_;
};

/// Collocation-based comparison operator: each coefficient solves the local
/// (d1+1)(d2+1)-square interpolation system on the collocation points of its
/// central cell, by LU elimination with partial pivoting; the local matrix is
/// translation invariant and factored once.
TensorSpline comparison_qi(CollocationSource& source, BaseGrid grid, Degrees deg,
                           int level);
/// Hierarchical version: the same local systems, per active index at its own
/// level.
HierSpline comparison_qi_hier(std::shared_ptr<const ThbBasis> basis,
                              CollocationSource& source);

/// Closed-form data demand of the single-level operators.
std::size_t tensor_eval_count(Degrees deg, const UniformGrid& grid);
std::size_t collocation_eval_count(Degrees deg, const UniformGrid& grid);

// ---------------------------------------------------------------------------
// experiment driver

struct ExperimentConfig {
    std::string function = "f1";
    Degrees degrees{3, 3};
    int levels = 5;
    std::string qi = "hier"; // tensor | that | fd | hier | that-hier | fd-hier
    int fd_order1 = 3, fd_order2 = 3;
    double eps_factor = 1.5;
    std::string out_dir; // empty: no artifacts written
    BaseGrid base{};     // defaults to 8x8 on [-1,1]^2

    bool is_hierarchical() const;
    void validate() const; // throws std::invalid_argument naming the field
};

struct ErrorReport {
    int levels = 0;
    double h_finest = 0.0;
    std::size_t dim_tensor = 0;
    std::size_t dim_hier = 0;
    double err = 0.0, err_x = 0.0, err_y = 0.0, err_xy = 0.0;
    std::size_t evals = 0;
};

struct ExperimentResult {
    std::vector<ErrorReport> rows; // one row per number of levels
    std::vector<AdaptiveResult::Iteration> trace;
    bool adaptive = false;
    bool by_tolerance = false;
    double epsilon = 0.0;
    std::unique_ptr<HierarchicalMesh> final_mesh; // adaptive runs only
};

/// Runs levels 1..K of the tensor operator, or the adaptive loop for the
/// hierarchical kinds (tolerance from the eps_factor rule at level K-1), and
/// writes table/trace/mesh artifacts when an output directory is configured.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_table_csv(std::ostream& out, const std::vector<ErrorReport>& rows);
void write_table_text(std::ostream& out, const std::vector<ErrorReport>& rows);
void write_trace_csv(std::ostream& out,
                     const std::vector<AdaptiveResult::Iteration>& trace);

/// Compare two table CSVs column by column: integer columns must match
/// exactly, floating columns within a relative tolerance (default_tol,
/// overridable per column name). Mismatches are logged; returns overall
/// success.
bool compare_tables(std::istream& produced, std::istream& expected,
                    const std::map<std::string, double>& column_tol,
                    double default_tol, std::ostream& log);

void export_mesh_text(const HierarchicalMesh& mesh, const std::string& path);
HierarchicalMesh import_mesh_text(const std::string& path);
/// Active cells as rectangles, stroke weight decreasing with the level.
void export_mesh_svg(const HierarchicalMesh& mesh, const std::string& path);

} // namespace thbqi
