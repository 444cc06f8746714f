#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace thbqi {

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    bool operator==(const Rect&) const = default;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
    Rect united(const Rect& r) const {
        return {std::min(x0, r.x0), std::min(y0, r.y0),
                std::max(x1, r.x1), std::max(y1, r.y1)};
    }
    double diameter() const { return std::hypot(width(), height()); }
};

/// Spline bi-degree (d1 along x, d2 along y).
struct Degrees {
    int d1 = 3;
    int d2 = 3;
    bool operator==(const Degrees&) const = default;
};

/// Level-0 tensor grid: n1 x n2 cells exactly tiling the domain.
struct BaseGrid {
    Rect domain{-1.0, -1.0, 1.0, 1.0};
    int n1 = 8;
    int n2 = 8;

    bool operator==(const BaseGrid&) const = default;
    double hx() const { return domain.width() / n1; }
    double hy() const { return domain.height() / n2; }
};

/// A dyadic refinement level of a BaseGrid. Cell sizes are the base sizes
/// divided by 2^level; lattice node (i,j) sits at (x0 + i*step_x, y0 + j*step_y),
/// also for indices outside [0, cells] (extended lattice).
struct UniformGrid {
    BaseGrid base;
    int level = 0;

    int cells_x() const { return base.n1 << level; }
    int cells_y() const { return base.n2 << level; }
    double step_x() const { return base.hx() / double(1 << level); }
    double step_y() const { return base.hy() / double(1 << level); }
    double node_x(int i) const { return base.domain.x0 + i * step_x(); }
    double node_y(int j) const { return base.domain.y0 + j * step_y(); }
    Rect cell_rect(int i, int j) const {
        return {node_x(i), node_y(j), node_x(i + 1), node_y(j + 1)};
    }
};

/// Cell (ix, iy) of the level-`level` grid. Children of (l,i,j) are
/// (l+1, 2i+a, 2j+b), a,b in {0,1}.
struct CellId {
    int level = 0;
    int ix = 0;
    int iy = 0;
    auto operator<=>(const CellId&) const = default;
};

/// Dense 2D array addressed by inclusive logical index ranges
/// [row_lo..row_hi] x [col_lo..col_hi]. Rows index the y direction (j),
/// columns the x direction (i), matching the data-matrix layout used
/// throughout: value grids live on j = -d2+1..N2+d2-1, i = -d1+1..N1+d1-1
/// and coefficient matrices on j = -d2..N2-1, i = -d1..N1-1.
class OffsetGrid {
public:
    OffsetGrid() = default;
    OffsetGrid(int row_lo, int row_hi, int col_lo, int col_hi, double fill = 0.0)
        : row_lo_(row_lo), col_lo_(col_lo),
          rows_(row_hi - row_lo + 1), cols_(col_hi - col_lo + 1),
          data_(std::size_t(rows_) * cols_, fill) {
        if (rows_ <= 0 || cols_ <= 0)
            throw std::invalid_argument("OffsetGrid: empty index range");
    }

    int row_lo() const { return row_lo_; }
    int row_hi() const { return row_lo_ + rows_ - 1; }
    int col_lo() const { return col_lo_; }
    int col_hi() const { return col_lo_ + cols_ - 1; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    bool contains(int j, int i) const {
        return j >= row_lo() && j <= row_hi() && i >= col_lo() && i <= col_hi();
    }
    double& at(int j, int i) {
        return data_[index(j, i)];
    }
    double at(int j, int i) const {
        return data_[index(j, i)];
    }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t index(int j, int i) const {
        if (!contains(j, i))
            throw std::out_of_range("OffsetGrid: index (" + std::to_string(j) + "," +
                                    std::to_string(i) + ") outside stored range");
        return std::size_t(j - row_lo_) * cols_ + (i - col_lo_);
    }

    int row_lo_ = 0, col_lo_ = 0;
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// A function with mixed partial derivatives available on demand.
class SmoothFunction {
public:
    virtual ~SmoothFunction() = default;
    /// d^(dx+dy) f / dx^dx dy^dy at (x, y).
    virtual double deriv(int dx, int dy, double x, double y) const = 0;
    double value(double x, double y) const { return deriv(0, 0, x, y); }
};

/// Raised when a data provider cannot supply a required sample.
class data_coverage_error : public std::runtime_error {
public:
    data_coverage_error(int level, double x, double y, const std::string& what_detail)
        : std::runtime_error("missing data at level " + std::to_string(level) +
                             ", point (" + std::to_string(x) + ", " + std::to_string(y) +
                             "): " + what_detail),
          level_(level), x_(x), y_(y) {}

    int level() const { return level_; }
    double x() const { return x_; }
    double y() const { return y_; }

private:
    int level_;
    double x_, y_;
};

inline double l1_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

} // namespace thbqi
