#pragma once

#include <Eigen/Dense>

#include <functional>

namespace wfr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr int kMaxDim = 64;

/// Symmetric matrix. The constructor averages A and A^T, so entries are exactly symmetric.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Mat& a);

    static SymMatrix identity(int d);
    static SymMatrix zero(int d);
    static SymMatrix diag(const Vec& v);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Mat m_;
};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
struct SymEig {
    Vec values;
    Mat vectors;
};

SymEig sym_eig(const SymMatrix& a);

/// SPD matrix with its eigendecomposition cached.
class SpdMatrix {
public:
    SpdMatrix() = default;
    /// Throws SingularMatrixError unless min eig > spd_tolerance(max eig).
    explicit SpdMatrix(const SymMatrix& a);
    explicit SpdMatrix(const Mat& a) : SpdMatrix(SymMatrix(a)) {}

    int dim() const { return base_.dim(); }
    const SymMatrix& sym() const { return base_; }
    const Mat& mat() const { return base_.mat(); }
    const Vec& eigenvalues() const { return eig_.values; }
    const Mat& eigenvectors() const { return eig_.vectors; }

private:
    SymMatrix base_;
    SymEig eig_;
};

/// Relative SPD threshold: 1e-12 times the largest eigenvalue.
double spd_tolerance(double max_eig);

/// Gaussian law N(mean, cov).
struct GaussianDist {
    Vec mean;
    SpdMatrix cov;

    GaussianDist() = default;
    GaussianDist(Vec m, SpdMatrix c);
    int dim() const { return static_cast<int>(mean.size()); }
};

/// Build a Gaussian from raw arrays; a non-SPD covariance is a DomainError.
GaussianDist make_gaussian(const Vec& mean, const Mat& cov);
GaussianDist make_gaussian_1d(double mean, double var);

/// e^{sA} through V e^{s Lambda} V^T.
SymMatrix sym_expm(const SymMatrix& a, double s);
/// f(A) through V f(Lambda) V^T.
SymMatrix sym_function(const SymMatrix& a, const std::function<double(double)>& f);

SpdMatrix spd_inverse(const SpdMatrix& a);
double logdet(const SpdMatrix& a);
double min_eig(const SymMatrix& a);
double max_eig(const SymMatrix& a);

/// Inverse of a nonsingular (possibly indefinite) symmetric matrix.
/// Throws SingularConfigurationError with the eigenvalue of smallest modulus
/// when |lambda| <= 1e-12 * max|lambda|.
SymMatrix sym_inverse(const SymMatrix& a, const char* what = "symmetric matrix");

double max_abs(const Mat& a);

/// Throws NumericInputError on NaN/Inf.
void check_finite(const Mat& a, const char* what);
void check_finite(const Vec& v, const char* what);

}  // namespace wfr
