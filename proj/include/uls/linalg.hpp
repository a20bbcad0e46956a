#pragma once

// Least-squares kernels used by the alternating solver: minimum-norm solve,
// proximally regularized solve via the stacked system [A; sqrt(lambda) I],
// and principal-component extraction. All solves go through orthogonal
// factorizations rather than normal equations.

#include "uls/core.hpp"

#include <cmath>

namespace uls {

/// Minimizer of ||RHS - A X||_F; minimum Frobenius norm among minimizers
/// when A is rank deficient.
inline Mat solve_ls(const Mat& A, const Mat& RHS) {
    require(A.rows() == RHS.rows(), "solve_ls: A and RHS must have the same row count");
    require(A.rows() >= 1 && A.cols() >= 1, "solve_ls: empty system");
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
    return cod.solve(RHS);
}

/// Minimizer of ||RHS - A X||_F^2 + lambda ||X - anchor||_F^2, solved as the
/// stacked least-squares system; unique for lambda > 0 regardless of rank(A).
/// The stacked matrix is re-factored on every call since lambda changes
/// between iterations.
inline Mat solve_ls_prox(const Mat& A, const Mat& RHS, double lambda, const Mat& anchor) {
    require(lambda >= 0.0, "solve_ls_prox: lambda must be nonnegative");
    if (lambda == 0.0) return solve_ls(A, RHS);
    const auto d = A.cols();
    require(anchor.rows() == d && anchor.cols() == RHS.cols(),
            "solve_ls_prox: anchor must be d x m");
    require(A.rows() == RHS.rows(), "solve_ls_prox: A and RHS must have the same row count");
    const double s = std::sqrt(lambda);
    Mat stacked(A.rows() + d, d);
    stacked.topRows(A.rows()) = A;
    stacked.bottomRows(d) = s * Mat::Identity(d, d);
    Mat rhs(RHS.rows() + d, RHS.cols());
    rhs.topRows(RHS.rows()) = RHS;
    rhs.bottomRows(d) = s * anchor;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(stacked);
    return cod.solve(rhs);
}

/// Top-d principal components of Data (samples x features), mean-centered
/// per feature. Returns features x d with orthonormal columns ordered by
/// decreasing explained variance. Errors if d exceeds min(samples, features)
/// or the centered data does not carry d directions of variance.
inline Mat principal_components(const Mat& data, int d) {
    const auto samples = data.rows();
    const auto features = data.cols();
    require(d >= 1, "principal_components: d must be positive");
    require(d <= std::min(samples, features),
            "principal_components: d exceeds min(samples, features)");
    Mat centered = data;
    const Eigen::RowVectorXd mean = data.colwise().mean();
    centered.rowwise() -= mean;

    Eigen::BDCSVD<Mat> svd(centered, Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    require(sv(0) > 0.0, "principal_components: data has no variance");
    const double rank_tol = 1e-12 * sv(0) * std::max<double>(samples, features);
    require(sv(d - 1) > rank_tol, "principal_components: centered data rank below d");

    Mat comps = svd.matrixV().leftCols(d);
    // Canonical sign: largest-magnitude entry of each component is positive.
    for (int j = 0; j < d; ++j) {
        int idx = 0;
        comps.col(j).cwiseAbs().maxCoeff(&idx);
        if (comps(idx, j) < 0.0) comps.col(j) = -comps.col(j);
    }
    return comps;
}

}  // namespace uls
