#pragma once

// 1-d unassigned distance geometry as unlabeled sensing. The structured
// measurement matrix B_u maps the d - 1 free coordinates (sorted decreasing,
// last point pinned at the origin) to all d(d-1)/2 pairwise differences; an
// unknown block-local permutation scrambles the observed distances.

#include "uls/core.hpp"
#include "uls/pam.hpp"
#include "uls/synth.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace uls {

/// Natural block grouping of the d(d-1)/2 distance rows: the stacked
/// identity block (d-1 rows), then one block per difference stride,
/// of sizes d-2, ..., 2, 1. A trailing singleton keeps the partition a
/// full tiling.
inline BlockPartition udgp_partition(int d) {
    require(d >= 2, "udgp_partition: need at least two points");
    std::vector<int> sizes;
    for (int r = d - 1; r >= 1; --r) sizes.push_back(r);
    return BlockPartition(std::move(sizes));
}

/// Structured measurement matrix: a stacked identity followed by blocks
/// B_i ((d-i) x (d-1), i = 2..d-1) with +1 in column i-1 and -1 in column
/// p+i-1 of row p (1-indexed). Row k of B_u x lists one pairwise
/// difference x_a - x_b, each unordered pair appearing exactly once.
inline Mat build_bu(int d) {
    require(d >= 2, "build_bu: need at least two points");
    const int n = d * (d - 1) / 2;
    Mat B = Mat::Zero(n, d - 1);
    for (int q = 0; q < d - 1; ++q) B(q, q) = 1.0;
    int row = d - 1;
    for (int i = 2; i <= d - 1; ++i) {
        for (int p = 1; p <= d - i; ++p, ++row) {
            B(row, i - 2) = 1.0;
            B(row, p + i - 2) = -1.0;
        }
    }
    return B;
}

struct UdgpInstance {
    int d = 0;
    std::optional<Vec> coords;             // ground truth, sorted decreasing, last entry 0
    std::optional<BlockPermutation> P_star;  // known when the instance was synthesized
    Vec distances;                         // observed, shuffled, possibly noisy
    BlockPartition partition;
    double sigma2 = 0.0;
    int resample_count = 0;  // coordinate draws rejected for near-duplicates
};

namespace detail {
// Sort decreasing and translate so the minimum sits at the origin.
inline Vec canonicalize_coords(Vec coords) {
    std::sort(coords.data(), coords.data() + coords.size(), std::greater<double>());
    coords.array() -= coords(coords.size() - 1);
    return coords;
}
}  // namespace detail

/// Instance from explicit point coordinates. Coordinates are canonicalized;
/// the scrambling permutation is drawn uniformly from the block structure;
/// noise (variance sigma2) is added after scrambling.
inline UdgpInstance make_udgp_instance(const Vec& coords_in, double sigma2,
                                       std::mt19937_64& rng) {
    const int d = static_cast<int>(coords_in.size());
    require(d >= 2, "make_udgp_instance: need at least two points");
    require(sigma2 >= 0.0, "make_udgp_instance: sigma2 must be nonnegative");
    Vec coords = detail::canonicalize_coords(coords_in);
    for (int i = 0; i + 1 < d; ++i)
        require(coords(i) - coords(i + 1) > 1e-12, "make_udgp_instance: duplicate points");

    UdgpInstance inst{d, coords, std::nullopt, Vec(), udgp_partition(d), sigma2, 0};
    const Mat Bu = build_bu(d);
    const Vec x_star = coords.head(d - 1);
    Mat y = Bu * x_star;
    inst.P_star = sample_r_local(inst.partition, rng);
    y = apply_permutation(*inst.P_star, y);
    if (sigma2 > 0.0) {
        std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
        for (int i = 0; i < y.rows(); ++i) y(i, 0) += normal(rng);
    }
    inst.distances = y.col(0);
    return inst;
}

/// Instance with d points sampled i.i.d. normal with the given variance;
/// draws with near-duplicate points are rejected and redrawn.
inline UdgpInstance sample_udgp_instance(int d, double variance, double sigma2,
                                         std::mt19937_64& rng) {
    require(d >= 3, "sample_udgp_instance: need at least three points");
    require(variance > 0.0, "sample_udgp_instance: variance must be positive");
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    int resamples = 0;
    for (;;) {
        Vec pts(d);
        for (int i = 0; i < d; ++i) pts(i) = normal(rng);
        Vec sorted = detail::canonicalize_coords(pts);
        bool distinct = true;
        for (int i = 0; i + 1 < d; ++i)
            if (sorted(i) - sorted(i + 1) <= 1e-12) {
                distinct = false;
                break;
            }
        if (!distinct) {
            ++resamples;
            continue;
        }
        UdgpInstance inst = make_udgp_instance(sorted, sigma2, rng);
        inst.resample_count = resamples;
        return inst;
    }
}

/// View the uDGP instance as an unlabeled sensing instance on B_u.
inline SenseInstance to_sense_instance(const UdgpInstance& inst) {
    Mat Y(inst.distances.size(), 1);
    Y.col(0) = inst.distances;
    std::optional<Truth> truth;
    if (inst.coords && inst.P_star) {
        Mat X(inst.d - 1, 1);
        X.col(0) = inst.coords->head(inst.d - 1);
        truth = Truth{*inst.P_star, std::move(X), inst.sigma2};
    }
    return SenseInstance(build_bu(inst.d), std::move(Y), inst.partition, std::move(truth));
}

struct UdgpRecovery {
    Vec coords_estimate;  // length d, canonical frame
    std::optional<double> relative_error;  // vs ground truth when available
    PamResult pam;
};

/// Solve the instance and map the signal estimate back to point
/// coordinates (append the origin, sort decreasing, re-anchor the minimum
/// at zero). Relative error is computed in the canonical frame.
inline UdgpRecovery recover_points(const UdgpInstance& inst, const PamConfig& config) {
    const SenseInstance sense = to_sense_instance(inst);
    PamResult pam = run_pam(sense, config);

    Vec raw(inst.d);
    raw.head(inst.d - 1) = pam.X_hat.col(0);
    raw(inst.d - 1) = 0.0;
    Vec estimate = detail::canonicalize_coords(raw);

    std::optional<double> rel;
    if (inst.coords) rel = (estimate - *inst.coords).norm() / inst.coords->norm();
    return UdgpRecovery{std::move(estimate), rel, std::move(pam)};
}

}  // namespace uls
