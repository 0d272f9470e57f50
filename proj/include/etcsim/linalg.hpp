#pragma once

// Small dense linear algebra for observer design: companion matrices,
// Hurwitz tests and the continuous Lyapunov equation P*A + A'*P = -I.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace etcsim {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Vec to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

/// Observer matrix: -k in the first column, shifted identity in columns 2..n.
inline Mat build_companion(const Vec& k) {
    const auto n = k.size();
    if (n < 1) throw LinalgError("companion matrix needs at least one gain");
    Mat a = Mat::Zero(n, n);
    a.col(0) = -k;
    for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
    return a;
}

/// Real parts must be below this to count as stable.
inline constexpr double kHurwitzMargin = -1e-12;

inline bool is_hurwitz(const Mat& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw LinalgError("is_hurwitz needs a non-empty square matrix");
    if (!a.allFinite()) throw LinalgError("is_hurwitz: matrix has non-finite entries");
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw LinalgError("is_hurwitz: eigenvalue iteration did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (!(es.eigenvalues()[i].real() < kHurwitzMargin)) return false;
    }
    return true;
}

struct LyapunovCert {
    Mat P;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double residual_norm = 0.0;

    /// Spectral norm, equal to lambda_max for a symmetric positive definite P.
    double norm() const { return lambda_max; }
};

/// Solves P*A + A'*P = -I through the Kronecker form
/// (I (x) A' + A' (x) I) vec(P) = -vec(I).
inline LyapunovCert solve_lyapunov(const Mat& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw LinalgError("solve_lyapunov needs a non-empty square matrix");
    const auto n = a.rows();
    const Mat at = a.transpose();
    const Mat eye = Mat::Identity(n, n);
    Mat k = Mat::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // block (i, j) of I (x) A' is delta_ij * A'; of A' (x) I it is A'(i, j) * I
            if (i == j) k.block(i * n, j * n, n, n) += at;
            k.block(i * n, j * n, n, n) += at(i, j) * eye;
        }
    }
    Eigen::FullPivLU<Mat> lu(k);
    if (!lu.isInvertible()) {
        throw LinalgError("Lyapunov system is singular (observer matrix is not Hurwitz)");
    }
    const Vec rhs = -Eigen::Map<const Vec>(eye.data(), n * n);
    const Vec sol = lu.solve(rhs);

    LyapunovCert cert;
    cert.P = Eigen::Map<const Mat>(sol.data(), n, n);
    cert.P = 0.5 * (cert.P + cert.P.transpose()).eval();
    cert.residual_norm = (cert.P * a + at * cert.P + eye).norm();

    Eigen::SelfAdjointEigenSolver<Mat> es(cert.P, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw LinalgError("solve_lyapunov: eigenvalues of P did not converge");
    cert.lambda_min = es.eigenvalues().minCoeff();
    cert.lambda_max = es.eigenvalues().maxCoeff();
    if (!(cert.lambda_min > 0.0)) {
        throw LinalgError("Lyapunov solution is not positive definite (lambda_min=" +
                          std::to_string(cert.lambda_min) + ")");
    }
    return cert;
}

} // namespace etcsim
