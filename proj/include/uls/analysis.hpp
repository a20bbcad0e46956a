#pragma once

// Information-theoretic recovery bound and evaluation metrics. All
// factorial-type quantities are computed as sums of log2 terms, never as
// big integers.

#include "uls/core.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace uls {

// ---------------------------------------------------------------------------
// Permutation priors and entropy
// ---------------------------------------------------------------------------

enum class PriorModel { Unrestricted, RLocal, KSparse };

struct PermutationPrior {
    PriorModel model;
    int n;
    int r = 0;  // block size for RLocal
    int k = 0;  // displaced count for KSparse

    static PermutationPrior unrestricted(int n) { return {PriorModel::Unrestricted, n}; }
    static PermutationPrior r_local(int n, int r) { return {PriorModel::RLocal, n, r, 0}; }
    static PermutationPrior k_sparse(int n, int k) { return {PriorModel::KSparse, n, 0, k}; }
};

namespace detail {
// sum_{i=lo}^{hi} log2(i); empty when hi < lo.
inline double log2_range_sum(int lo, int hi) {
    double s = 0.0;
    for (int i = lo; i <= hi; ++i) s += std::log2(static_cast<double>(i));
    return s;
}
}  // namespace detail

/// Entropy in bits of a uniform draw from the prior's permutation set:
/// log2(n!) unrestricted, (n/r) log2(r!) for uniform r-blocks,
/// log2(n!/(n-k)!) for the k-sparse count.
inline double entropy_bits(const PermutationPrior& prior) {
    require(prior.n >= 1, "entropy_bits: n must be positive");
    switch (prior.model) {
        case PriorModel::Unrestricted:
            return detail::log2_range_sum(2, prior.n);
        case PriorModel::RLocal:
            require(prior.r >= 1 && prior.n % prior.r == 0,
                    "entropy_bits: r must be positive and divide n");
            return (static_cast<double>(prior.n) / prior.r) * detail::log2_range_sum(2, prior.r);
        case PriorModel::KSparse:
            require(prior.k >= 0 && prior.k <= prior.n, "entropy_bits: k must lie in [0, n]");
            return detail::log2_range_sum(prior.n - prior.k + 1, prior.n);
    }
    throw std::invalid_argument("entropy_bits: unknown prior model");
}

/// Fano-style lower bound on Pr{P_hat != P*}:
///   1 - (1 + (n m / 2) log2(1 + snr)) / H(prior).
/// Raw value (may be negative); clamp only when presenting.
inline double error_lower_bound(int n, int m, double snr, const PermutationPrior& prior) {
    require(n >= 1 && m >= 1, "error_lower_bound: dimensions must be positive");
    require(snr >= 0.0, "error_lower_bound: snr must be nonnegative");
    const double H = entropy_bits(prior);
    require(H > 0.0, "error_lower_bound: prior entropy is zero, bound undefined");
    const double rate = 1.0 + 0.5 * static_cast<double>(n) * static_cast<double>(m) *
                                  std::log2(1.0 + snr);
    return 1.0 - rate / H;
}

struct BoundCurve {
    int n = 0, m = 0;
    PermutationPrior prior{PriorModel::Unrestricted, 1};
    std::vector<double> snr_grid;
    std::vector<double> lower_bounds;  // raw values, pointwise by the formula above
};

inline BoundCurve compute_bound_curve(int n, int m, const std::vector<double>& snr_grid,
                                      const PermutationPrior& prior) {
    BoundCurve curve{n, m, prior, snr_grid, {}};
    curve.lower_bounds.reserve(snr_grid.size());
    for (double snr : snr_grid) curve.lower_bounds.push_back(error_lower_bound(n, m, snr, prior));
    return curve;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Number of rows whose assigned column differs between the two
/// permutations. Partitions may differ; only total dimension must match.
inline int hamming_distortion(const BlockPermutation& p_hat, const BlockPermutation& p_star) {
    require(p_hat.n() == p_star.n(), "hamming_distortion: dimension mismatch");
    const auto a = p_hat.global_map();
    const auto b = p_star.global_map();
    int count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) count += (a[i] != b[i]) ? 1 : 0;
    return count;
}

/// ||X_hat - X_star||_F / ||X_star||_F.
inline double relative_error(const Mat& X_hat, const Mat& X_star) {
    require(X_hat.rows() == X_star.rows() && X_hat.cols() == X_star.cols(),
            "relative_error: shape mismatch");
    const double denom = X_star.norm();
    require(denom > 0.0, "relative_error: reference matrix is zero");
    return (X_hat - X_star).norm() / denom;
}

/// Operational SNR of an instance: ||X*||_F^2 / (m sigma^2).
inline double snr_of(const Mat& X_star, int m, double sigma2) {
    require(m >= 1, "snr_of: m must be positive");
    require(sigma2 > 0.0, "snr_of: sigma2 must be positive");
    return X_star.squaredNorm() / (static_cast<double>(m) * sigma2);
}

/// PSNR in dB from the mean squared residual e = (1/n)||y - y_hat||^2,
/// as 10 log10(1 / e^2). Exact reconstruction returns +infinity.
inline double psnr_db(const Vec& y, const Vec& y_hat) {
    require(y.size() == y_hat.size() && y.size() > 0, "psnr_db: shape mismatch");
    const double e = (y - y_hat).squaredNorm() / static_cast<double>(y.size());
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / (e * e));
}

/// Exact number of permutations of {1..n} displacing at most k indices,
/// n <= 8 by brute force. Note this is smaller than 2^entropy_bits of the
/// k-sparse prior, which uses the ordered-arrangement count n!/(n-k)!.
inline std::uint64_t count_permutations_max_displaced(int n, int k) {
    require(n >= 1 && n <= 8, "count_permutations_max_displaced: n must be in [1, 8]");
    require(k >= 0 && k <= n, "count_permutations_max_displaced: k must lie in [0, n]");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t count = 0;
    do {
        int displaced = 0;
        for (int i = 0; i < n; ++i) displaced += (perm[static_cast<std::size_t>(i)] != i) ? 1 : 0;
        if (displaced <= k) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

}  // namespace uls
