#pragma once

#include <functional>
#include <variant>
#include <vector>

namespace wfr {

/// Uniform 1D grid with n_points >= 64 nodes on [x_min, x_max].
class Grid1D {
public:
    Grid1D() = default;
    Grid1D(double x_min, double x_max, int n_points);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    int n_points() const { return n_; }
    double h() const { return (x_max_ - x_min_) / (n_ - 1); }
    double x(int i) const { return x_min_ + i * h(); }
    /// Trapezoid weight of node i.
    double weight(int i) const { return (i == 0 || i == n_ - 1) ? 0.5 * h() : h(); }

    bool operator==(const Grid1D& o) const { return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_; }

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    int n_ = 64;
};

/// Trapezoid integral of f over the grid.
double trapezoid(const Grid1D& g, const std::vector<double>& f);

/// Nonnegative density values on a grid, normalized by the trapezoid rule.
class DensityField {
public:
    DensityField() = default;
    /// Clamps negatives to zero and renormalizes. Throws DegenerateDensityError on zero mass.
    DensityField(Grid1D grid, std::vector<double> values);

    /// Discretize exp(log_density) (stable for very negative logs) and normalize.
    static DensityField from_log(const Grid1D& grid, const std::function<double(double)>& log_density);
    static DensityField from_log_values(const Grid1D& grid, const std::vector<double>& log_values);

    const Grid1D& grid() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    double operator[](int i) const { return v_[i]; }
    double mass() const { return trapezoid(grid_, v_); }
    /// Mass set to zero by clamping negative values at construction.
    double clamped_mass() const { return clamped_; }
    double mean() const;
    double variance() const;

private:
    Grid1D grid_;
    std::vector<double> v_;
    double clamped_ = 0.0;
};

/// Target law for the grid solver: a Gaussian or a finite Gaussian mixture.
class TargetSpec1D {
public:
    struct Component {
        double weight;
        double mean;
        double var;
    };

    static TargetSpec1D gaussian(double mean, double var);
    static TargetSpec1D mixture(std::vector<Component> comps);

    /// Normalized log density.
    double log_density(double x) const;
    /// d/dx log density.
    double score(double x) const;
    const std::vector<Component>& components() const { return comps_; }
    bool is_gaussian() const { return comps_.size() == 1; }
    double min_mean() const;
    double max_mean() const;
    double max_sd() const;

private:
    std::vector<Component> comps_;
};

}  // namespace wfr
