#include "wfrlab/linalg.hpp"

#include "wfrlab/errors.hpp"

#include <cmath>
#include <string>

namespace wfr {

void check_finite(const Mat& a, const char* what) {
    if (!a.allFinite()) throw NumericInputError(std::string(what) + ": non-finite entries");
}

void check_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw NumericInputError(std::string(what) + ": non-finite entries");
}

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

SymMatrix::SymMatrix(const Mat& a) {
    if (a.rows() != a.cols()) throw DomainError("SymMatrix: matrix is not square");
    if (a.rows() < 1) throw DomainError("SymMatrix: dimension must be >= 1");
    if (a.rows() > kMaxDim) throw DomainError("SymMatrix: dimension exceeds 64");
    check_finite(a, "SymMatrix");
    m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(int d) { return SymMatrix(Mat::Identity(d, d)); }
SymMatrix SymMatrix::zero(int d) { return SymMatrix(Mat::Zero(d, d)); }
SymMatrix SymMatrix::diag(const Vec& v) { return SymMatrix(Mat(v.asDiagonal())); }

SymEig sym_eig(const SymMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.mat());
    if (es.info() != Eigen::Success) throw NumericInputError("eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double spd_tolerance(double max_eig) { return 1e-12 * max_eig; }

SpdMatrix::SpdMatrix(const SymMatrix& a) : base_(a), eig_(sym_eig(a)) {
    const double lo = eig_.values(0);
    const double hi = eig_.values(eig_.values.size() - 1);
    if (!(hi > 0.0) || lo <= spd_tolerance(hi))
        throw SingularMatrixError("matrix is not positive definite (min eigenvalue " + std::to_string(lo) + ")");
}

GaussianDist::GaussianDist(Vec m, SpdMatrix c) : mean(std::move(m)), cov(std::move(c)) {
    if (mean.size() != cov.dim()) throw DomainError("GaussianDist: mean length differs from covariance dimension");
    check_finite(mean, "GaussianDist mean");
}

GaussianDist make_gaussian(const Vec& mean, const Mat& cov) {
    try {
        return GaussianDist(mean, SpdMatrix(cov));
    } catch (const SingularMatrixError& e) {
        throw DomainError(std::string("covariance is not SPD: ") + e.what());
    }
}

GaussianDist make_gaussian_1d(double mean, double var) {
    return make_gaussian(Vec::Constant(1, mean), Mat::Constant(1, 1, var));
}

SymMatrix sym_function(const SymMatrix& a, const std::function<double(double)>& f) {
    const SymEig e = sym_eig(a);
    Vec fv(e.values.size());
    for (int i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
    return SymMatrix(e.vectors * fv.asDiagonal() * e.vectors.transpose());
}

SymMatrix sym_expm(const SymMatrix& a, double s) {
    if (!std::isfinite(s)) throw NumericInputError("sym_expm: non-finite scale");
    if (s == 0.0) return SymMatrix::identity(a.dim());
    return sym_function(a, [s](double x) { return std::exp(s * x); });
}

SpdMatrix spd_inverse(const SpdMatrix& a) {
    const Vec& l = a.eigenvalues();
    const Mat& v = a.eigenvectors();
    return SpdMatrix(SymMatrix(v * l.cwiseInverse().asDiagonal() * v.transpose()));
}

double logdet(const SpdMatrix& a) { return a.eigenvalues().array().log().sum(); }

double min_eig(const SymMatrix& a) { return sym_eig(a).values(0); }

double max_eig(const SymMatrix& a) {
    const Vec v = sym_eig(a).values;
    return v(v.size() - 1);
}

SymMatrix sym_inverse(const SymMatrix& a, const char* what) {
    const SymEig e = sym_eig(a);
    const double big = e.values.cwiseAbs().maxCoeff();
    int k = 0;
    e.values.cwiseAbs().minCoeff(&k);
    if (!(big > 0.0) || std::abs(e.values(k)) <= 1e-12 * big)
        throw SingularConfigurationError(std::string(what) + " is singular", e.values(k));
    return SymMatrix(e.vectors * e.values.cwiseInverse().asDiagonal() * e.vectors.transpose());
}

}  // namespace wfr
