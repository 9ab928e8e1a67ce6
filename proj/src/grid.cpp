#include "wfrlab/grid.hpp"

#include "wfrlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wfr {

Grid1D::Grid1D(double x_min, double x_max, int n_points) : x_min_(x_min), x_max_(x_max), n_(n_points) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max)) throw NumericInputError("Grid1D: non-finite bounds");
    if (!(x_min < x_max)) throw DomainError("Grid1D: x_min must be < x_max");
    if (n_points < 64) throw DomainError("Grid1D: n_points must be >= 64");
}

double trapezoid(const Grid1D& g, const std::vector<double>& f) {
    double s = 0.0;
    for (int i = 0; i < g.n_points(); ++i) s += g.weight(i) * f[i];
    return s;
}

DensityField::DensityField(Grid1D grid, std::vector<double> values) : grid_(grid), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != grid_.n_points()) throw DomainError("DensityField: size differs from grid");
    for (int i = 0; i < grid_.n_points(); ++i) {
        if (!std::isfinite(v_[i])) throw NumericInputError("DensityField: non-finite value");
        if (v_[i] < 0.0) {
            clamped_ += -v_[i] * grid_.weight(i);
            v_[i] = 0.0;
        }
    }
    const double m = trapezoid(grid_, v_);
    if (!(m > 0.0)) throw DegenerateDensityError("DensityField: zero total mass");
    for (double& x : v_) x /= m;
}

DensityField DensityField::from_log_values(const Grid1D& grid, const std::vector<double>& lv) {
    double top = -std::numeric_limits<double>::infinity();
    for (double l : lv) top = std::max(top, l);
    if (!std::isfinite(top)) throw DegenerateDensityError("DensityField: no finite log value");
    std::vector<double> v(lv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) v[i] = std::exp(lv[i] - top);
    return DensityField(grid, std::move(v));
}

DensityField DensityField::from_log(const Grid1D& grid, const std::function<double(double)>& log_density) {
    std::vector<double> lv(grid.n_points());
    for (int i = 0; i < grid.n_points(); ++i) lv[i] = log_density(grid.x(i));
    return from_log_values(grid, lv);
}

double DensityField::mean() const {
    double s = 0.0;
    for (int i = 0; i < grid_.n_points(); ++i) s += grid_.weight(i) * v_[i] * grid_.x(i);
    return s;
}

double DensityField::variance() const {
    const double m = mean();
    double s = 0.0;
    for (int i = 0; i < grid_.n_points(); ++i) {
        const double d = grid_.x(i) - m;
        s += grid_.weight(i) * v_[i] * d * d;
    }
    return s;
}

TargetSpec1D TargetSpec1D::gaussian(double mean, double var) { return mixture({{1.0, mean, var}}); }

TargetSpec1D TargetSpec1D::mixture(std::vector<Component> comps) {
    if (comps.empty()) throw DomainError("TargetSpec1D: no components");
    double total = 0.0;
    for (const auto& c : comps) {
        if (!(c.weight > 0.0)) throw DomainError("TargetSpec1D: weights must be positive");
        if (!(c.var > 0.0)) throw DomainError("TargetSpec1D: variances must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("TargetSpec1D: weights must sum to 1");
    TargetSpec1D t;
    t.comps_ = std::move(comps);
    return t;
}

namespace {

double component_log(const TargetSpec1D::Component& c, double x) {
    const double d = x - c.mean;
    return std::log(c.weight) - 0.5 * std::log(2.0 * std::numbers::pi * c.var) - 0.5 * d * d / c.var;
}

}  // namespace

double TargetSpec1D::log_density(double x) const {
    if (comps_.size() == 1) return component_log(comps_[0], x);
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> l(comps_.size());
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        l[k] = component_log(comps_[k], x);
        top = std::max(top, l[k]);
    }
    double s = 0.0;
    for (double lk : l) s += std::exp(lk - top);
    return top + std::log(s);
}

double TargetSpec1D::score(double x) const {
    if (comps_.size() == 1) return -(x - comps_[0].mean) / comps_[0].var;
    // responsibilities-weighted component scores
    const double ld = log_density(x);
    double s = 0.0;
    for (const auto& c : comps_) s += std::exp(component_log(c, x) - ld) * (-(x - c.mean) / c.var);
    return s;
}

double TargetSpec1D::min_mean() const {
    double m = comps_[0].mean;
    for (const auto& c : comps_) m = std::min(m, c.mean);
    return m;
}

double TargetSpec1D::max_mean() const {
    double m = comps_[0].mean;
    for (const auto& c : comps_) m = std::max(m, c.mean);
    return m;
}

double TargetSpec1D::max_sd() const {
    double v = 0.0;
    for (const auto& c : comps_) v = std::max(v, c.var);
    return std::sqrt(v);
}

}  // namespace wfr
