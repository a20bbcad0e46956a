#pragma once

// Core domain types for unlabeled sensing: dense matrices, block partitions,
// block-diagonal permutations, and problem instances.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uls {

inline constexpr const char* kVersion = "0.1.0";

// Dense real matrix, row-major storage with explicit dimensions.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// BlockPartition: ordered block sizes [r_1, ..., r_K] tiling {0, ..., n-1}.
// ---------------------------------------------------------------------------

class BlockPartition {
public:
    explicit BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
        require(!sizes_.empty(), "BlockPartition: needs at least one block");
        offsets_.reserve(sizes_.size() + 1);
        offsets_.push_back(0);
        for (int r : sizes_) {
            require(r >= 1, "BlockPartition: block sizes must be positive");
            offsets_.push_back(offsets_.back() + r);
        }
    }

    /// n blocks of size 1 would be spelled uniform(n, 1).
    static BlockPartition uniform(int n, int r) {
        require(n >= 1 && r >= 1, "BlockPartition::uniform: n and r must be positive");
        require(n % r == 0, "BlockPartition::uniform: r must divide n");
        return BlockPartition(std::vector<int>(static_cast<std::size_t>(n / r), r));
    }

    /// One block covering everything (unrestricted permutations).
    static BlockPartition single(int n) { return BlockPartition(std::vector<int>{n}); }

    int n() const { return offsets_.back(); }
    int block_count() const { return static_cast<int>(sizes_.size()); }
    int size(int b) const { return sizes_.at(static_cast<std::size_t>(b)); }
    int offset(int b) const { return offsets_.at(static_cast<std::size_t>(b)); }
    const std::vector<int>& sizes() const { return sizes_; }

    /// Block index owning global row i.
    int block_of(int i) const {
        require(i >= 0 && i < n(), "BlockPartition::block_of: row out of range");
        auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
        return static_cast<int>(it - offsets_.begin()) - 1;
    }

    bool operator==(const BlockPartition& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;  // prefix sums, offsets_[K] == n
};

// ---------------------------------------------------------------------------
// BlockPermutation: one within-block bijection per block, stored as index
// arrays (dense n x n form only materialized on demand). For block b,
// assignment(b)[i] is the within-block destination row of source row i, so
// the dense matrix has a 1 at (offset + sigma(i), offset + i).
// ---------------------------------------------------------------------------

class BlockPermutation {
public:
    BlockPermutation(BlockPartition partition, std::vector<std::vector<int>> assignments)
        : partition_(std::move(partition)), blocks_(std::move(assignments)) {
        require(static_cast<int>(blocks_.size()) == partition_.block_count(),
                "BlockPermutation: one assignment array per block required");
        for (int b = 0; b < partition_.block_count(); ++b) {
            const auto& sigma = blocks_[static_cast<std::size_t>(b)];
            const int r = partition_.size(b);
            require(static_cast<int>(sigma.size()) == r,
                    "BlockPermutation: assignment length must match block size");
            std::vector<bool> seen(static_cast<std::size_t>(r), false);
            for (int dst : sigma) {
                require(dst >= 0 && dst < r, "BlockPermutation: destination out of block range");
                require(!seen[static_cast<std::size_t>(dst)],
                        "BlockPermutation: assignment is not a bijection");
                seen[static_cast<std::size_t>(dst)] = true;
            }
        }
    }

    static BlockPermutation identity(const BlockPartition& partition) {
        std::vector<std::vector<int>> blocks;
        blocks.reserve(static_cast<std::size_t>(partition.block_count()));
        for (int b = 0; b < partition.block_count(); ++b) {
            std::vector<int> sigma(static_cast<std::size_t>(partition.size(b)));
            std::iota(sigma.begin(), sigma.end(), 0);
            blocks.push_back(std::move(sigma));
        }
        return BlockPermutation(partition, std::move(blocks));
    }

    /// Rebuild from a global source->destination map; fails if any entry
    /// crosses a block boundary.
    static BlockPermutation from_global_map(const BlockPartition& partition,
                                            const std::vector<int>& src_to_dest) {
        require(static_cast<int>(src_to_dest.size()) == partition.n(),
                "BlockPermutation::from_global_map: map length must equal n");
        std::vector<std::vector<int>> blocks;
        blocks.reserve(static_cast<std::size_t>(partition.block_count()));
        for (int b = 0; b < partition.block_count(); ++b) {
            const int off = partition.offset(b);
            const int r = partition.size(b);
            std::vector<int> sigma(static_cast<std::size_t>(r));
            for (int i = 0; i < r; ++i) {
                const int dst = src_to_dest[static_cast<std::size_t>(off + i)];
                require(dst >= off && dst < off + r,
                        "BlockPermutation::from_global_map: entry crosses block boundary");
                sigma[static_cast<std::size_t>(i)] = dst - off;
            }
            blocks.push_back(std::move(sigma));
        }
        return BlockPermutation(partition, std::move(blocks));
    }

    /// Validates a dense 0/1 matrix and converts it to block form.
    static BlockPermutation from_dense(const Mat& P, const BlockPartition& partition) {
        const int n = partition.n();
        require(P.rows() == n && P.cols() == n, "BlockPermutation::from_dense: wrong shape");
        std::vector<int> src_to_dest(static_cast<std::size_t>(n), -1);
        std::vector<bool> row_used(static_cast<std::size_t>(n), false);
        for (int j = 0; j < n; ++j) {
            int dst = -1;
            for (int i = 0; i < n; ++i) {
                const double v = P(i, j);
                if (v == 1.0) {
                    require(dst < 0, "BlockPermutation::from_dense: multiple ones in a column");
                    dst = i;
                } else {
                    require(v == 0.0, "BlockPermutation::from_dense: entries must be 0 or 1");
                }
            }
            require(dst >= 0, "BlockPermutation::from_dense: empty column");
            require(!row_used[static_cast<std::size_t>(dst)],
                    "BlockPermutation::from_dense: multiple ones in a row");
            row_used[static_cast<std::size_t>(dst)] = true;
            src_to_dest[static_cast<std::size_t>(j)] = dst;
        }
        return from_global_map(partition, src_to_dest);
    }

    const BlockPartition& partition() const { return partition_; }
    const std::vector<int>& assignment(int b) const {
        return blocks_.at(static_cast<std::size_t>(b));
    }

    int n() const { return partition_.n(); }

    /// Global destination row of global source row i.
    int map(int i) const {
        const int b = partition_.block_of(i);
        const int off = partition_.offset(b);
        return off + blocks_[static_cast<std::size_t>(b)][static_cast<std::size_t>(i - off)];
    }

    /// Flattened source->destination map over all n rows.
    std::vector<int> global_map() const {
        std::vector<int> out(static_cast<std::size_t>(n()));
        for (int b = 0; b < partition_.block_count(); ++b) {
            const int off = partition_.offset(b);
            const auto& sigma = blocks_[static_cast<std::size_t>(b)];
            for (int i = 0; i < partition_.size(b); ++i)
                out[static_cast<std::size_t>(off + i)] = off + sigma[static_cast<std::size_t>(i)];
        }
        return out;
    }

    bool operator==(const BlockPermutation& other) const {
        return partition_ == other.partition_ && blocks_ == other.blocks_;
    }

private:
    BlockPartition partition_;
    std::vector<std::vector<int>> blocks_;
};

// ---------------------------------------------------------------------------
// Permutation operations
// ---------------------------------------------------------------------------

/// Materialize the dense n x n matrix (tests and export only).
inline Mat permutation_to_dense(const BlockPermutation& p) {
    const int n = p.n();
    Mat P = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) P(p.map(i), i) = 1.0;
    return P;
}

/// P * M without materializing P: row sigma(i) of the result is row i of M.
inline Mat apply_permutation(const BlockPermutation& p, const Mat& M) {
    require(static_cast<int>(M.rows()) == p.n(),
            "apply_permutation: row count must match permutation dimension");
    Mat out(M.rows(), M.cols());
    for (int i = 0; i < p.n(); ++i) out.row(p.map(i)) = M.row(i);
    return out;
}

inline BlockPermutation invert(const BlockPermutation& p) {
    const auto& partition = p.partition();
    std::vector<std::vector<int>> blocks;
    blocks.reserve(static_cast<std::size_t>(partition.block_count()));
    for (int b = 0; b < partition.block_count(); ++b) {
        const auto& sigma = p.assignment(b);
        std::vector<int> inv(sigma.size());
        for (int i = 0; i < static_cast<int>(sigma.size()); ++i)
            inv[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = i;
        blocks.push_back(std::move(inv));
    }
    return BlockPermutation(partition, std::move(blocks));
}

/// compose(a, b) applies b first, then a: sigma(i) = sigma_a(sigma_b(i)).
inline BlockPermutation compose(const BlockPermutation& a, const BlockPermutation& b) {
    require(a.partition() == b.partition(), "compose: partitions must match");
    const auto& partition = a.partition();
    std::vector<std::vector<int>> blocks;
    blocks.reserve(static_cast<std::size_t>(partition.block_count()));
    for (int blk = 0; blk < partition.block_count(); ++blk) {
        const auto& sa = a.assignment(blk);
        const auto& sb = b.assignment(blk);
        std::vector<int> sigma(sa.size());
        for (std::size_t i = 0; i < sa.size(); ++i)
            sigma[i] = sa[static_cast<std::size_t>(sb[i])];
        blocks.push_back(std::move(sigma));
    }
    return BlockPermutation(partition, std::move(blocks));
}

// ---------------------------------------------------------------------------
// SenseInstance: Y = P B X + W with optional ground truth for scoring.
// ---------------------------------------------------------------------------

struct Truth {
    BlockPermutation P_star;
    Mat X_star;
    double sigma2 = 0.0;
};

class SenseInstance {
public:
    SenseInstance(Mat B, Mat Y, BlockPartition partition,
                  std::optional<Truth> truth = std::nullopt)
        : B_(std::move(B)), Y_(std::move(Y)), partition_(std::move(partition)),
          truth_(std::move(truth)) {
        require(B_.rows() == partition_.n() && Y_.rows() == partition_.n(),
                "SenseInstance: B and Y must have partition.n rows");
        require(all_finite(B_) && all_finite(Y_), "SenseInstance: entries must be finite");
        if (truth_) {
            require(truth_->P_star.n() == partition_.n(),
                    "SenseInstance: truth permutation dimension mismatch");
            require(truth_->X_star.rows() == B_.cols(),
                    "SenseInstance: X_star must have B.cols rows");
            require(truth_->X_star.cols() == Y_.cols(),
                    "SenseInstance: X_star must have Y.cols columns");
            require(truth_->sigma2 >= 0.0, "SenseInstance: sigma2 must be nonnegative");
        }
    }

    const Mat& B() const { return B_; }
    const Mat& Y() const { return Y_; }
    const BlockPartition& partition() const { return partition_; }
    const std::optional<Truth>& truth() const { return truth_; }

    int n() const { return partition_.n(); }
    int d() const { return static_cast<int>(B_.cols()); }
    int m() const { return static_cast<int>(Y_.cols()); }

private:
    Mat B_;
    Mat Y_;
    BlockPartition partition_;
    std::optional<Truth> truth_;
};

}  // namespace uls
