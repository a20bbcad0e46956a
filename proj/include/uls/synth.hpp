#pragma once

// Seeded random generation of permutations and sensing instances for
// Monte-Carlo experiments. Every generator is a pure function of
// (parameters, rng state); per-trial streams are derived by mixing the
// master seed with stream indices so trials never share a stream.

#include "uls/core.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace uls {

// ---------------------------------------------------------------------------
// RNG streams
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream key for (master seed, stream index); distinct indices give
/// distinct keys by the bijectivity of the mixer.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x51ed270b7a638ff7ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_seed(master, stream));
}

// ---------------------------------------------------------------------------
// Permutation sampling
// ---------------------------------------------------------------------------

/// Uniform draw from the block structure: independent Fisher-Yates shuffle
/// inside each block.
inline BlockPermutation sample_r_local(const BlockPartition& partition, std::mt19937_64& rng) {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(static_cast<std::size_t>(partition.block_count()));
    for (int b = 0; b < partition.block_count(); ++b) {
        const int r = partition.size(b);
        std::vector<int> sigma(static_cast<std::size_t>(r));
        std::iota(sigma.begin(), sigma.end(), 0);
        for (int i = r - 1; i > 0; --i) {
            std::uniform_int_distribution<int> pick(0, i);
            std::swap(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(pick(rng))]);
        }
        blocks.push_back(std::move(sigma));
    }
    return BlockPermutation(partition, std::move(blocks));
}

/// Permutation with exactly n - k fixed points: a uniform k-subset of
/// displaced indices carrying a uniform derangement (rejection sampled).
/// k = 0 yields the identity; k = 1 is impossible.
inline BlockPermutation sample_k_sparse(int n, int k, std::mt19937_64& rng) {
    require(n >= 1, "sample_k_sparse: n must be positive");
    require(k >= 0 && k <= n, "sample_k_sparse: k must lie in [0, n]");
    require(k != 1, "sample_k_sparse: no permutation displaces exactly one index");

    std::vector<int> map(static_cast<std::size_t>(n));
    std::iota(map.begin(), map.end(), 0);
    if (k > 0) {
        // Uniform k-subset via partial Fisher-Yates.
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<int> subset(idx.begin(), idx.begin() + k);
        std::sort(subset.begin(), subset.end());

        std::vector<int> dest(subset.begin(), subset.end());
        for (;;) {
            for (int i = k - 1; i > 0; --i) {
                std::uniform_int_distribution<int> pick(0, i);
                std::swap(dest[static_cast<std::size_t>(i)], dest[static_cast<std::size_t>(pick(rng))]);
            }
            bool deranged = true;
            for (int i = 0; i < k; ++i)
                if (dest[static_cast<std::size_t>(i)] == subset[static_cast<std::size_t>(i)]) {
                    deranged = false;
                    break;
                }
            if (deranged) break;
        }
        for (int i = 0; i < k; ++i)
            map[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])] =
                dest[static_cast<std::size_t>(i)];
    }
    return BlockPermutation::from_global_map(BlockPartition::single(n), map);
}

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

enum class PermModel { RLocal, KSparse };

struct GenSpec {
    int n, d, m;
    BlockPartition partition;  // used by the solver; RLocal draws from it
    double snr;                // infinite => noiseless
    std::uint64_t seed;
    PermModel model;
    int k;  // displaced count for KSparse

    GenSpec(int n_, int d_, int m_, BlockPartition partition_, double snr_, std::uint64_t seed_,
            PermModel model_ = PermModel::RLocal, int k_ = 0)
        : n(n_), d(d_), m(m_), partition(std::move(partition_)), snr(snr_), seed(seed_),
          model(model_), k(k_) {
        require(n >= 1 && d >= 1 && m >= 1, "GenSpec: dimensions must be positive");
        require(partition.n() == n, "GenSpec: partition must tile n rows");
        require(snr > 0.0, "GenSpec: snr must be positive (or infinite for noiseless)");
        if (model == PermModel::KSparse)
            require(k >= 0 && k <= n && k != 1, "GenSpec: invalid k for the k-sparse model");
    }
};

/// B, X* i.i.d. standard normal; sigma chosen so the realized SNR
/// ||X*||_F^2 / (m sigma^2) equals the requested value; Y = P* B X* + W.
/// Draw order is fixed (B, X*, P*, W) so instances are reproducible.
inline SenseInstance gen_instance(const GenSpec& spec) {
    auto rng = make_rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Mat B(spec.n, spec.d);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.d; ++j) B(i, j) = normal(rng);
    Mat X(spec.d, spec.m);
    for (int i = 0; i < spec.d; ++i)
        for (int j = 0; j < spec.m; ++j) X(i, j) = normal(rng);

    BlockPermutation P = spec.model == PermModel::RLocal
                             ? sample_r_local(spec.partition, rng)
                             : sample_k_sparse(spec.n, spec.k, rng);

    double sigma2 = 0.0;
    Mat Y = apply_permutation(P, (B * X).eval());
    if (std::isfinite(spec.snr)) {
        const double sigma = X.norm() / std::sqrt(static_cast<double>(spec.m) * spec.snr);
        sigma2 = sigma * sigma;
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.m; ++j) Y(i, j) += sigma * normal(rng);
    }
    return SenseInstance(std::move(B), std::move(Y), spec.partition,
                         Truth{std::move(P), std::move(X), sigma2});
}

}  // namespace uls
