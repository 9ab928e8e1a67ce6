// Independent reference computations shared by the unit tests.
// Nothing here calls into the library's numerical routines.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Truncated power series sum_{k<=terms} (sA)^k / k!.
inline Mat expm_series(const Mat& a, double s, int terms = 40) {
    Mat term = Mat::Identity(a.rows(), a.cols());
    Mat sum = term;
    for (int k = 1; k <= terms; ++k) {
        term = term * (s * a) / k;
        sum += term;
    }
    return sum;
}

/// Roots of the 2x2 characteristic polynomial x^2 - tr x + det.
inline std::pair<double, double> eig2(const Mat& a) {
    const double tr = a(0, 0) + a(1, 1), det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

inline double det3(const Mat& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Smallest eigenvalue of a symmetric 3x3 matrix by scanning det(A - xI) upward
/// from a Gershgorin bound and bisecting the first sign change.
inline double min_eig3_bisect(const Mat& a) {
    double lo = 1e300;
    for (int i = 0; i < 3; ++i) lo = std::min(lo, a(i, i) - (a.row(i).cwiseAbs().sum() - std::abs(a(i, i))));
    lo -= 1.0;
    auto p = [&](double x) { return det3(a - x * Mat::Identity(3, 3)); };
    const double step = 1e-3;
    double x = lo;
    while (p(x + step) > 0.0) x += step;
    double l = x, h = x + step;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (l + h);
        (p(m) > 0.0 ? l : h) = m;
    }
    return 0.5 * (l + h);
}

/// Classical RK4 for y' = f(y) with fixed step.
inline Vec rk4(const std::function<Vec(const Vec&)>& f, Vec y, double t, double dt) {
    const int n = static_cast<int>(std::ceil(t / dt - 1e-9));
    const double h = t / n;
    for (int i = 0; i < n; ++i) {
        const Vec k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double gauss_logpdf(double x, double m, double v) {
    return -0.5 * std::log(2.0 * M_PI * v) - 0.5 * (x - m) * (x - m) / v;
}

inline Mat random_sym(std::mt19937_64& rng, int d, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
    return a;
}

inline Mat random_spd(std::mt19937_64& rng, int d) {
    const Mat b = random_sym(rng, d, -1.0, 1.0);
    return b * b.transpose() + 0.5 * Mat::Identity(d, d);
}

}  // namespace oracle
